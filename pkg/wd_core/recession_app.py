"""
Recession Classification Module
Loads the quarterly US recession indicator, fits the one-lag binary
autoregression by maximum likelihood and trains the network classifier on a
chronological half split.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
import requests
from scipy.optimize import minimize

from .config import (
    USRECQ_FIXTURE, USRECQ_URL, MLE_GRID_STEP, MLE_SIMPLEX_TOL, MLE_MIN_LENGTH, CSV_LINE_TERMINATOR
)
from .erm_training import EvalReport, TrainConfig, empirical_01_risk, train_erm
from .neuralnet import Architecture
from .process_sim import Trajectory, make_supervised

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DATE_COLUMNS = ("DATE", "observation_date")
QUARTER_START_MONTHS = (1, 4, 7, 10)


class RecessionDataError(ValueError):
    """Malformed indicator file; ``row`` is the 1-based line number in the file"""

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(f"row {row}: {message}" if row is not None else message)
        self.row = row


@dataclass(frozen=True)
class QuarterlySeries:
    """Quarter start dates with +-1 recession labels"""
    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dates = np.array(self.dates, dtype="datetime64[D]")
        values = np.array(self.values, dtype=float)
        if dates.shape != values.shape:
            raise ValueError("dates and values must have equal length")
        if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing")
        if not np.all(np.isin(values, (-1.0, 1.0))):
            raise ValueError("values must be -1 or +1")
        dates.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_labels(cls, labels: Sequence[float], start: str = "1933-01-01") -> "QuarterlySeries":
        """Attach consecutive quarter dates to a +-1 label sequence."""
        months = pd.date_range(start=start, periods=len(labels), freq="QS")
        return cls(months.values.astype("datetime64[D]"), labels)

    def trajectory(self) -> Trajectory:
        return Trajectory(self.values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"DATE": pd.to_datetime(self.dates).strftime("%Y-%m-%d"),
                             "USRECQ": decode_labels(self.values)})


def encode_labels(indicator) -> np.ndarray:
    """0 -> -1, 1 -> +1."""
    return 2.0 * np.asarray(indicator, dtype=float) - 1.0


def decode_labels(labels) -> np.ndarray:
    """-1 -> 0, +1 -> 1."""
    return ((np.asarray(labels, dtype=float) + 1.0) / 2.0).astype(int)


def load_usrecq(path=USRECQ_FIXTURE) -> QuarterlySeries:
    """
    Load a quarterly 0/1 recession indicator CSV.

    Args:
        path: CSV with a DATE (or observation_date) column of quarter start
            dates and one 0/1 indicator column

    Returns:
        QuarterlySeries: date-sorted series recoded to +-1

    Raises:
        RecessionDataError: On malformed dates or values, or duplicate dates,
            naming the offending file row
    """
    path = Path(path)
    if not path.is_absolute() and not path.exists() and (PROJECT_ROOT / path).exists():
        path = PROJECT_ROOT / path
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    date_col = next((c for c in DATE_COLUMNS if c in frame.columns), None)
    if date_col is None:
        raise RecessionDataError(f"{path}: missing date column (expected one of {DATE_COLUMNS})", 1)
    value_cols = [c for c in frame.columns if c != date_col]
    if len(value_cols) != 1:
        raise RecessionDataError(f"{path}: expected exactly one indicator column, got {value_cols}", 1)
    value_col = value_cols[0]

    dates, indicator, seen = [], [], {}
    for offset, (raw_date, raw_value) in enumerate(zip(frame[date_col], frame[value_col])):
        row = offset + 2
        stamp = pd.to_datetime(raw_date.strip(), format="%Y-%m-%d", errors="coerce")
        if pd.isna(stamp):
            raise RecessionDataError(f"malformed date {raw_date!r}", row)
        if stamp.day != 1 or stamp.month not in QUARTER_START_MONTHS:
            raise RecessionDataError(f"{raw_date} is not the first day of a quarter", row)
        try:
            value = float(raw_value)
        except ValueError:
            raise RecessionDataError(f"non-numeric indicator {raw_value!r}", row) from None
        if value not in (0.0, 1.0):
            raise RecessionDataError(f"indicator must be 0 or 1, got {raw_value!r}", row)
        if stamp in seen:
            raise RecessionDataError(f"duplicate date {raw_date} (first seen on row {seen[stamp]})", row)
        seen[stamp] = row
        dates.append(stamp)
        indicator.append(value)

    stamps = pd.DatetimeIndex(dates).values.astype("datetime64[D]")
    order = np.argsort(stamps, kind="stable")
    series = QuarterlySeries(stamps[order], encode_labels(indicator)[order])
    logger.info(f"Loaded {len(series)} quarterly observations from {path}")
    return series


def fetch_usrecq(dest, url: str = USRECQ_URL, timeout: float = 30.0) -> QuarterlySeries:
    """Download the public indicator series to ``dest`` and validate it."""
    logger.info(f"Fetching recession indicator from {url}")
    response = requests.get(url, timeout=timeout)
    response.raise_for_status()
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(response.text)
    return load_usrecq(dest)


def _labels(series) -> np.ndarray:
    values = series.values if isinstance(series, QuarterlySeries) else np.asarray(series, dtype=float)
    if not np.all(np.isin(values, (-1.0, 1.0))):
        raise ValueError("series must contain only -1 and +1")
    return values


def _transition_counts(labels: np.ndarray):
    prev, nxt = labels[:-1], labels[1:]
    from_minus = prev < 0
    return (int(np.sum(from_minus & (nxt > 0))), int(np.sum(from_minus & (nxt < 0))),
            int(np.sum(~from_minus & (nxt > 0))), int(np.sum(~from_minus & (nxt < 0))))


def _loglik_from_counts(counts, alpha0, alpha1):
    up_m, down_m, up_p, down_p = counts
    p_m = 0.5 * (1.0 + alpha0 - alpha1)
    p_p = 0.5 * (1.0 + alpha0 + alpha1)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = [
            np.where(up_m > 0, up_m * np.log(p_m), 0.0),
            np.where(down_m > 0, down_m * np.log1p(-p_m), 0.0),
            np.where(up_p > 0, up_p * np.log(p_p), 0.0),
            np.where(down_p > 0, down_p * np.log1p(-p_p), 0.0),
        ]
    return sum(terms)


def _feasible(alpha0, alpha1) -> bool:
    return abs(alpha0) + abs(alpha1) < 1.0


def loglik_ar1(series, alpha0: float, alpha1: float) -> float:
    """
    Log-likelihood sum_{t>=2} [1{y_t=1} log p_t + 1{y_t=-1} log(1-p_t)] with
    p_t = (1 + alpha0 + alpha1 y_{t-1}) / 2.

    Raises:
        ValueError: If |alpha0| + |alpha1| >= 1
    """
    if not _feasible(alpha0, alpha1):
        raise ValueError(f"infeasible parameters: |alpha0| + |alpha1| = {abs(alpha0) + abs(alpha1)} >= 1")
    return float(_loglik_from_counts(_transition_counts(_labels(series)), alpha0, alpha1))


@dataclass
class Ar1LogitFit:
    alpha0: float
    alpha1: float
    log_likelihood: float
    converged: bool
    grid_log_likelihood: float
    boundary_direction: Optional[str] = None

    def pretty(self) -> str:
        status = "converged" if self.converged else f"not converged ({self.boundary_direction or 'simplex'})"
        return (f"alpha0={self.alpha0:.6f} alpha1={self.alpha1:.6f} "
                f"loglik={self.log_likelihood:.6f} {status}")


def _boundary_direction(counts) -> Optional[str]:
    up_m, down_m, up_p, down_p = counts
    parts = []
    for label, up, down in (("P(+1|-1)", up_m, down_m), ("P(+1|+1)", up_p, down_p)):
        if up + down == 0:
            parts.append(f"{label} unidentified")
        elif up == 0:
            parts.append(f"{label} -> 0")
        elif down == 0:
            parts.append(f"{label} -> 1")
    return ", ".join(parts) or None


def fit_mle(series) -> Ar1LogitFit:
    """
    Maximum likelihood over |alpha0| + |alpha1| < 1.

    A 0.01 grid locates the best start; Nelder-Mead refines it with the
    objective set to +inf outside the region. The fit converges when the
    final simplex diameter is below 1e-6 and the maximum is interior; series
    whose maximizer lies on the boundary (for example constant or alternating
    series) report converged=False and the boundary direction.
    """
    labels = _labels(series)
    if labels.size < MLE_MIN_LENGTH:
        raise ValueError(f"series length must be at least {MLE_MIN_LENGTH}, got {labels.size}")
    counts = _transition_counts(labels)

    axis = np.round(np.arange(-1.0 + MLE_GRID_STEP, 1.0, MLE_GRID_STEP), 10)
    a0, a1 = np.meshgrid(axis, axis, indexing="ij")
    inside = np.abs(a0) + np.abs(a1) < 1.0 - 1e-9
    grid = np.where(inside, _loglik_from_counts(counts, a0, a1), -np.inf)
    best = np.unravel_index(np.argmax(grid), grid.shape)
    start = np.array([a0[best], a1[best]])
    grid_best = float(grid[best])

    def objective(theta):
        if not _feasible(theta[0], theta[1]):
            return np.inf
        return -float(_loglik_from_counts(counts, theta[0], theta[1]))

    result = minimize(objective, start, method="Nelder-Mead",
                      options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
    simplex = result.final_simplex[0]
    diameter = max(float(np.linalg.norm(p - q)) for p in simplex for q in simplex)
    alpha0, alpha1 = (float(v) for v in result.x)
    loglik = -float(result.fun)
    if loglik < grid_best:
        alpha0, alpha1, loglik = float(start[0]), float(start[1]), grid_best
    direction = _boundary_direction(counts)
    converged = diameter < MLE_SIMPLEX_TOL and direction is None
    if direction:
        logger.warning(f"MLE maximizer on the boundary: {direction}")
    logger.info(f"MLE alpha0={alpha0:.6f} alpha1={alpha1:.6f} loglik={loglik:.6f}")
    return Ar1LogitFit(alpha0, alpha1, loglik, converged, grid_best, direction)


@dataclass
class RecessionReport:
    train_report: EvalReport
    test_report: EvalReport
    fit: Optional[Ar1LogitFit]
    split_index: int
    n_pairs: int
    seed: int

    @property
    def recession_recall(self) -> float:
        return self.test_report.recall_plus

    def to_frame(self) -> pd.DataFrame:
        rows = [("seed", self.seed), ("n_pairs", self.n_pairs), ("split_index", self.split_index)]
        if self.fit is not None:
            rows += [("mle_alpha0", self.fit.alpha0), ("mle_alpha1", self.fit.alpha1),
                     ("mle_loglik", self.fit.log_likelihood), ("mle_converged", int(self.fit.converged))]
        for prefix, report in (("train", self.train_report), ("test", self.test_report)):
            rows += [(f"{prefix}_{name}", value) for name, value in report.to_frame().itertuples(index=False)]
        return pd.DataFrame(rows, columns=["name", "value"])

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)

    def pretty(self) -> str:
        lines = [f"pairs: {self.n_pairs} (train {self.split_index}, test {self.n_pairs - self.split_index})"]
        if self.fit is not None:
            lines.append(f"MLE: {self.fit.pretty()}")
        lines += ["test:", self.test_report.pretty()]
        return "\n".join(lines)


def run_recession_pipeline(series, arch: Optional[Architecture] = None,
                           train_config: Optional[TrainConfig] = None) -> RecessionReport:
    """
    Train on the first ceil((T-1)/2) lag-1 pairs and evaluate on the rest.

    Args:
        series: QuarterlySeries or +-1 label sequence of length >= 4
        arch: Network architecture with input dimension 1 (2 x 16 ReLU, Tanh output by default)
        train_config: Training settings; its seed makes the run deterministic

    Returns:
        RecessionReport: train and test EvalReports plus the MLE fit (None for
        series shorter than the MLE minimum length)
    """
    labels = _labels(series)
    if labels.size < 4:
        raise ValueError("series length must be at least 4")
    arch = arch or Architecture.feedforward(1)
    train_config = train_config or TrainConfig()
    sample = make_supervised(Trajectory(labels), 1)
    split = math.ceil(len(sample) / 2)
    train, test = sample.split(split)
    params, _ = train_erm(train, arch, train_config)
    fit = fit_mle(labels) if labels.size >= MLE_MIN_LENGTH else None
    report = RecessionReport(
        train_report=empirical_01_risk(arch, params, train),
        test_report=empirical_01_risk(arch, params, test),
        fit=fit,
        split_index=split,
        n_pairs=len(sample),
        seed=train_config.seed,
    )
    logger.info(f"Recession pipeline seed {train_config.seed}: test accuracy {report.test_report.accuracy:.4f}")
    return report


def _pipeline_job(args):
    labels, arch, config = args
    return run_recession_pipeline(labels, arch, config)


def run_recession_seeds(series, seeds: Sequence[int], arch: Optional[Architecture] = None,
                        train_config: Optional[TrainConfig] = None, jobs: int = 1) -> List[RecessionReport]:
    """Run the pipeline once per seed, in parallel when ``jobs`` > 1; results follow ``seeds`` order."""
    labels = _labels(series)
    base = train_config or TrainConfig()
    tasks = [(labels, arch, base.with_seed(seed)) for seed in seeds]
    if jobs <= 1 or len(tasks) <= 1:
        return [_pipeline_job(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_pipeline_job, tasks))


def median_confusion(reports: Sequence[RecessionReport]) -> np.ndarray:
    """Cell-wise median of the test confusion matrices."""
    return np.median(np.stack([r.test_report.confusion for r in reports]), axis=0)
