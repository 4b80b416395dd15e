"""
Experiments Module
Target-network estimation and Monte-Carlo risk-gap curves for the binary
autoregressions, with seed derivation that makes every replication
reproducible independently of scheduling.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd

from .config import (
    DESK_N_GRID, PAPER_N_GRID, DESK_REPLICATIONS, PAPER_REPLICATIONS, DEFAULT_TARGET_M,
    DEFAULT_BURN_IN, MAX_FAILURE_SHARE, CSV_LINE_TERMINATOR
)
from .erm_training import TrainConfig, TrainingDivergenceError, empirical_surrogate_risk, train_erm
from .neuralnet import Architecture, NetworkParams
from .process_sim import (
    BinaryDgpSpec, InvalidModelError, bayes_hinge_risk, make_supervised, simulate_binary, supervised_layout
)

logger = logging.getLogger(__name__)

PROFILES = {
    "desk": (DESK_N_GRID, DESK_REPLICATIONS),
    "paper": (PAPER_N_GRID, PAPER_REPLICATIONS),
}

GAP_CURVE_COLUMNS = ["n", "gap_target_mean", "gap_target_se", "gap_bayes_mean", "gap_bayes_se", "failed"]
REPLICATION_COLUMNS = ["n", "rep", "seed", "test_risk", "gap_target", "gap_bayes", "failed"]


class ExperimentAbortedError(RuntimeError):
    """Raised when the share of failed replications exceeds the allowed maximum"""


def input_dim(dgp: BinaryDgpSpec) -> int:
    p, q = supervised_layout(dgp)
    return p + (q if dgp.covariate_spec is not None else 0)


@dataclass(frozen=True)
class ExperimentPlan:
    """
    Monte-Carlo experiment settings.

    ``fixed_test_size`` replaces the default test trajectory length (equal to
    the training size n) by a constant; ``jobs`` is the number of worker
    processes for the replication fan-out.
    """
    dgp: BinaryDgpSpec
    n_grid: Tuple[int, ...] = DESK_N_GRID
    replications: int = DESK_REPLICATIONS
    target_m: int = DEFAULT_TARGET_M
    arch: Optional[Architecture] = None
    train: TrainConfig = field(default_factory=TrainConfig)
    master_seed: int = 0
    fixed_test_size: Optional[int] = None
    burn_in: int = DEFAULT_BURN_IN
    jobs: int = 1

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        if not grid:
            raise ValueError("n_grid must not be empty")
        if any(n < 2 for n in grid):
            raise ValueError("n_grid values must be at least 2")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if not isinstance(self.replications, (int, np.integer)) or self.replications < 1:
            raise ValueError("replications must be a positive integer")
        if not isinstance(self.target_m, (int, np.integer)) or self.target_m < 2:
            raise ValueError("target_m must be an integer >= 2")
        if self.fixed_test_size is not None and self.fixed_test_size < 2:
            raise ValueError("fixed_test_size must be at least 2")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        arch = self.arch or Architecture.feedforward(input_dim(self.dgp))
        if arch.input_dim != input_dim(self.dgp):
            raise ValueError(f"architecture input {arch.input_dim} does not match the DGP layout {input_dim(self.dgp)}")
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "arch", arch)

    @classmethod
    def preset(cls, profile: str, dgp: Optional[BinaryDgpSpec] = None, **overrides) -> "ExperimentPlan":
        """Desk-scale ("desk") or full-scale ("paper") grid and replication count."""
        if profile not in PROFILES:
            raise ValueError(f"profile must be one of {sorted(PROFILES)}, got {profile!r}")
        n_grid, replications = PROFILES[profile]
        settings = {"n_grid": n_grid, "replications": replications}
        settings.update(overrides)
        return cls(dgp or BinaryDgpSpec.dgp1(), **settings)

    def with_jobs(self, jobs: int) -> "ExperimentPlan":
        return replace(self, jobs=jobs)


def replication_seeds(master_seed: int, n: int, rep: int) -> Tuple[int, int, int]:
    """(train trajectory, test trajectory, network) seeds derived from (master_seed, n, rep)."""
    state = np.random.SeedSequence([master_seed, n, rep]).generate_state(3)
    return int(state[0]), int(state[1]), int(state[2])


class TargetEstimate(NamedTuple):
    params: NetworkParams
    target_risk: float
    bayes_risk: float


def estimate_target(plan: ExperimentPlan) -> TargetEstimate:
    """
    Estimate the in-class target network on one long trajectory.

    Trains on a ``target_m``-point sample and evaluates the hinge risk of the
    trained network and of the Bayes predictor on that same sample.

    Raises:
        TrainingDivergenceError: If training diverges
    """
    sim_seed, train_seed = (int(s) for s in np.random.SeedSequence([plan.master_seed]).generate_state(2))
    p, q = supervised_layout(plan.dgp)
    traj = simulate_binary(plan.dgp, plan.target_m + p, sim_seed, plan.burn_in)
    sample = make_supervised(traj, p, q)
    params, log = train_erm(sample, plan.arch, plan.train.with_seed(train_seed))
    target_risk = empirical_surrogate_risk(plan.arch, params, sample)
    bayes_risk = bayes_hinge_risk(plan.dgp, traj)
    logger.info(f"Target network: risk {target_risk:.6f} (Bayes {bayes_risk:.6f}), "
                f"best epoch {log.best_epoch} of {log.stopped_epoch}")
    return TargetEstimate(params, target_risk, bayes_risk)


class ReplicationResult(NamedTuple):
    n: int
    rep: int
    seed: int
    test_risk: float
    failed: bool


def run_replication(plan: ExperimentPlan, n: int, rep: int) -> ReplicationResult:
    """Train on an n-point trajectory and evaluate on an independent one."""
    train_seed, test_seed, net_seed = replication_seeds(plan.master_seed, n, rep)
    p, q = supervised_layout(plan.dgp)
    test_n = plan.fixed_test_size or n
    try:
        train = make_supervised(simulate_binary(plan.dgp, n + p, train_seed, plan.burn_in), p, q)
        test = make_supervised(simulate_binary(plan.dgp, test_n + p, test_seed, plan.burn_in), p, q)
        params, _ = train_erm(train, plan.arch, plan.train.with_seed(net_seed))
        risk = empirical_surrogate_risk(plan.arch, params, test)
    except (TrainingDivergenceError, InvalidModelError, FloatingPointError) as exc:
        logger.warning(f"Replication n={n} rep={rep} failed: {exc}")
        return ReplicationResult(n, rep, train_seed, float("nan"), True)
    return ReplicationResult(n, rep, train_seed, risk, False)


def _replication_job(task):
    plan, n, rep = task
    return run_replication(plan, n, rep)


class GapRow(NamedTuple):
    n: int
    gap_target_mean: float
    gap_target_se: float
    gap_bayes_mean: float
    gap_bayes_se: float
    failed: int


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    if values.size == 0:
        return float("nan"), float("nan")
    if values.size == 1:
        return float(values[0]), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


@dataclass
class GapCurve:
    """Aggregated gap curve plus the per-replication values it was folded from"""
    rows: List[GapRow]
    replications: List[ReplicationResult]
    target_risk: float
    bayes_risk: float

    @property
    def failed(self) -> int:
        return sum(r.failed for r in self.replications)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=GAP_CURVE_COLUMNS)

    def replications_frame(self) -> pd.DataFrame:
        records = [
            (r.n, r.rep, r.seed, r.test_risk, r.test_risk - self.target_risk, r.test_risk - self.bayes_risk, int(r.failed))
            for r in self.replications
        ]
        return pd.DataFrame(records, columns=REPLICATION_COLUMNS)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)

    def replications_to_csv(self, path) -> None:
        self.replications_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)


def aggregate(results: List[ReplicationResult], grid: Tuple[int, ...], target_risk: float,
              bayes_risk: float) -> List[GapRow]:
    """Fold replication results into one GapRow per n, in grid order."""
    rows = []
    for n in grid:
        at_n = [r for r in results if r.n == n]
        risks = np.array([r.test_risk for r in at_n if not r.failed], dtype=float)
        gt_mean, gt_se = _mean_se(risks - target_risk)
        gb_mean, gb_se = _mean_se(risks - bayes_risk)
        rows.append(GapRow(n, gt_mean, gt_se, gb_mean, gb_se, sum(r.failed for r in at_n)))
    return rows


def run_gap_curve(plan: ExperimentPlan, target: Optional[TargetEstimate] = None) -> GapCurve:
    """
    Monte-Carlo gap curve over the plan's n grid.

    Replications run in ``plan.jobs`` worker processes and are folded in
    (n, rep) order, so the result does not depend on scheduling.

    Args:
        plan: Experiment settings
        target: Precomputed target estimate (computed from the plan when omitted)

    Returns:
        GapCurve: one row per n plus every replication value

    Raises:
        ExperimentAbortedError: If more than 2% of replications fail
    """
    target = target or estimate_target(plan)
    tasks = [(plan, n, rep) for n in plan.n_grid for rep in range(plan.replications)]
    logger.info(f"Running {len(tasks)} replications over {len(plan.n_grid)} sample sizes with {plan.jobs} job(s)")
    if plan.jobs <= 1:
        results = [_replication_job(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            results = list(pool.map(_replication_job, tasks, chunksize=max(1, len(tasks) // (4 * plan.jobs))))

    failed = sum(r.failed for r in results)
    if failed > MAX_FAILURE_SHARE * len(results):
        raise ExperimentAbortedError(f"{failed} of {len(results)} replications failed "
                                     f"(limit {MAX_FAILURE_SHARE:.0%})")
    rows = aggregate(results, plan.n_grid, target.target_risk, target.bayes_risk)
    for row in rows:
        logger.info(f"n={row.n}: gap to target {row.gap_target_mean:.6f} (se {row.gap_target_se:.6f})")
    return GapCurve(rows, results, target.target_risk, target.bayes_risk)
