"""
Process Simulation Module
Simulates stationary weakly dependent trajectories (binary autoregressions with
optional AR(1) covariates, finite-lag affine causal models) and computes exact
Bayes-predictor oracles.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.signal import lfilter

from .config import (
    DEFAULT_BURN_IN, DEFAULT_COVARIATE_AR, DEFAULT_COVARIATE_STD, DEFAULT_ACX_INNOVATION_STD,
    LINK_TOLERANCE, COVARIATE_GRID_SIZE, COVARIATE_GRID_HALF_WIDTH,
    DGP1_COEFFICIENTS, DGP2_COEFFICIENTS, CSV_LINE_TERMINATOR
)
from .kvconfig import read_key_value_file, parse_bool, parse_float_list

logger = logging.getLogger(__name__)

SQRT3 = float(np.sqrt(3.0))


class InvalidModelError(ValueError):
    """Raised when a model specification cannot generate a valid process"""


class DgpKind(Enum):
    """Binary data generating processes"""
    DGP1 = "dgp1"
    DGP2 = "dgp2"
    CUSTOM_AFFINE = "custom"


class AcxModelKind(Enum):
    """Finite-lag affine causal models with exogenous covariates"""
    ARX1 = "arx1"
    ARCH1X = "arch1x"


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator used by every simulator."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class CovariateSpec:
    """Stationary AR(1) covariate X_t = a X_{t-1} + e_t with Gaussian e_t"""
    ar_coefficient: float = DEFAULT_COVARIATE_AR
    innovation_std: float = DEFAULT_COVARIATE_STD

    def __post_init__(self):
        if not -1.0 < self.ar_coefficient < 1.0:
            raise InvalidModelError(f"ar_coefficient must lie in (-1, 1), got {self.ar_coefficient}")
        if not self.innovation_std > 0:
            raise InvalidModelError(f"innovation_std must be positive, got {self.innovation_std}")

    @property
    def stationary_std(self) -> float:
        return self.innovation_std / np.sqrt(1.0 - self.ar_coefficient ** 2)


@dataclass(frozen=True)
class BinaryDgpSpec:
    """
    Binary autoregression Y_t in {-1, +1} with P(Y_t = 1 | past) = (1 + f(past)) / 2.

    Coefficient layouts:
        DGP1: (intercept, lag-1)
        DGP2: (intercept, positive-part, negative-part, lag-2, covariate kernel)
        CustomAffine: (intercept, phi_1..phi_p[, psi_1..psi_p]) where the psi
            terms multiply the bounded kernel 1 / (1 + X_{t-k}^2)
    """
    kind: DgpKind
    lag_order: int
    coefficients: Tuple[float, ...]
    covariate_spec: Optional[CovariateSpec] = None

    def __post_init__(self):
        if not isinstance(self.kind, DgpKind):
            raise TypeError("kind must be a DgpKind")
        if not isinstance(self.lag_order, (int, np.integer)) or self.lag_order < 1:
            raise InvalidModelError("lag_order must be a positive integer")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        expected = _expected_coefficient_count(self.kind, self.lag_order, self.covariate_spec is not None)
        if self.kind is DgpKind.DGP1 and self.lag_order != 1:
            raise InvalidModelError("DGP1 has lag_order 1")
        if self.kind is DgpKind.DGP1 and self.covariate_spec is not None:
            raise InvalidModelError("DGP1 has no covariate")
        if self.kind is DgpKind.DGP2 and (self.lag_order != 2 or self.covariate_spec is None):
            raise InvalidModelError("DGP2 has lag_order 2 and an AR(1) covariate")
        if len(self.coefficients) != expected:
            raise InvalidModelError(
                f"{self.kind.value} with lag_order {self.lag_order} needs {expected} coefficients, "
                f"got {len(self.coefficients)}"
            )
        if not np.all(np.isfinite(self.coefficients)):
            raise InvalidModelError("coefficients must be finite")
        contraction = lag_lipschitz_sum(self)
        if contraction >= 1.0:
            raise InvalidModelError(f"sum of absolute lag coefficients must be < 1, got {contraction}")
        low, high = link_range(self)
        if low < -1.0 - LINK_TOLERANCE or high > 1.0 + LINK_TOLERANCE:
            raise InvalidModelError(f"link f escapes [-1, 1] on the reachable states: range [{low}, {high}]")

    @classmethod
    def dgp1(cls) -> "BinaryDgpSpec":
        return cls(DgpKind.DGP1, 1, DGP1_COEFFICIENTS)

    @classmethod
    def dgp2(cls, covariate_spec: Optional[CovariateSpec] = None) -> "BinaryDgpSpec":
        return cls(DgpKind.DGP2, 2, DGP2_COEFFICIENTS, covariate_spec or CovariateSpec())

    @classmethod
    def custom_affine(cls, intercept, lag_coefficients, covariate_coefficients=None,
                      covariate_spec: Optional[CovariateSpec] = None) -> "BinaryDgpSpec":
        lag_coefficients = tuple(lag_coefficients)
        coefficients = (intercept,) + lag_coefficients
        if covariate_coefficients is not None:
            covariate_coefficients = tuple(covariate_coefficients)
            if len(covariate_coefficients) != len(lag_coefficients):
                raise InvalidModelError("covariate_coefficients must have one entry per lag")
            coefficients += covariate_coefficients
            covariate_spec = covariate_spec or CovariateSpec()
        elif covariate_spec is not None:
            raise InvalidModelError("covariate_spec given without covariate_coefficients")
        return cls(DgpKind.CUSTOM_AFFINE, len(lag_coefficients), coefficients, covariate_spec)

    @property
    def covariate_lags(self) -> int:
        """Number of lagged covariate values the link reads."""
        if self.covariate_spec is None:
            return 0
        return 1 if self.kind is DgpKind.DGP2 else self.lag_order


def _expected_coefficient_count(kind: DgpKind, p: int, has_covariate: bool) -> int:
    if kind is DgpKind.DGP1:
        return 2
    if kind is DgpKind.DGP2:
        return 5
    return 1 + p + (p if has_covariate else 0)


def lag_lipschitz_sum(spec: BinaryDgpSpec) -> float:
    """Sum over lags of the Lipschitz coefficient of f in each label lag."""
    c = spec.coefficients
    if spec.kind is DgpKind.DGP1:
        return abs(c[1])
    if spec.kind is DgpKind.DGP2:
        return max(abs(c[1]), abs(c[2])) + abs(c[3])
    return float(np.sum(np.abs(c[1:1 + spec.lag_order])))


def covariate_kernel(x):
    return 1.0 / (1.0 + np.square(x))


def link_values(spec: BinaryDgpSpec, states: np.ndarray) -> np.ndarray:
    """
    Evaluate f row-wise on a matrix of states laid out as
    (Y_{t-1}, ..., Y_{t-p}, X_{t-1}, ..., X_{t-q}).
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    width = spec.lag_order + spec.covariate_lags
    if states.shape[1] != width:
        raise InvalidModelError(f"state must have {width} entries, got {states.shape[1]}")
    c = spec.coefficients
    if spec.kind is DgpKind.DGP1:
        return c[0] + c[1] * states[:, 0]
    if spec.kind is DgpKind.DGP2:
        y1, y2, x1 = states[:, 0], states[:, 1], states[:, 2]
        return (c[0] + c[1] * np.maximum(y1, 0.0) + c[2] * np.minimum(y1, 0.0)
                + c[3] * y2 + c[4] * covariate_kernel(x1))
    p = spec.lag_order
    f = c[0] + states[:, :p] @ np.asarray(c[1:1 + p])
    if spec.covariate_lags:
        f = f + covariate_kernel(states[:, p:]) @ np.asarray(c[1 + p:])
    return f


def link_value(spec: BinaryDgpSpec, state) -> float:
    """f(state) for a single state vector."""
    state = np.asarray(state, dtype=float)
    if state.ndim != 1:
        raise InvalidModelError("state must be a vector")
    return float(link_values(spec, state[None, :])[0])


def link_range(spec: BinaryDgpSpec) -> Tuple[float, float]:
    """
    Range of f over {-1, 1}^p crossed with a covariate grid.

    The covariate terms are additive and separate from the label terms, so the
    range is the label range plus the per-lag covariate ranges over the grid.
    """
    labels = np.array(list(itertools.product((-1.0, 1.0), repeat=spec.lag_order)))
    q = spec.covariate_lags
    if q == 0:
        f = link_values(spec, labels)
        return float(f.min()), float(f.max())
    grid = np.linspace(-COVARIATE_GRID_HALF_WIDTH, COVARIATE_GRID_HALF_WIDTH, COVARIATE_GRID_SIZE)
    kernel = covariate_kernel(grid)
    weights = np.asarray(spec.coefficients[-q:])
    label_part = link_values(spec, np.hstack([labels, np.zeros((len(labels), q))])) - weights.sum()
    cov_low = sum(float(np.min(w * kernel)) for w in weights)
    cov_high = sum(float(np.max(w * kernel)) for w in weights)
    return float(label_part.min() + cov_low), float(label_part.max() + cov_high)


def sign(values):
    """sign with sign(0) = +1."""
    return np.where(np.asarray(values) >= 0, 1, -1)


def bayes_predict(spec: BinaryDgpSpec, state) -> int:
    """
    Bayes classifier h0(state) = sign(f(state)).

    Args:
        spec: Binary DGP specification
        state: Label lags followed by covariate lags

    Returns:
        int: +1 or -1 (ties at f = 0 go to +1)

    Raises:
        InvalidModelError: If the state has the wrong arity
    """
    return int(sign(link_value(spec, state)))


@dataclass(frozen=True)
class Trajectory:
    """Immutable sample of labels with optional aligned covariate vectors"""
    labels: np.ndarray
    covariates: Optional[np.ndarray] = None
    seed: Optional[int] = None

    def __post_init__(self):
        labels = np.array(self.labels, dtype=float)
        if labels.ndim != 1:
            raise ValueError("labels must be one dimensional")
        object.__setattr__(self, "labels", labels)
        labels.setflags(write=False)
        if self.covariates is not None:
            covariates = np.array(self.covariates, dtype=float)
            if covariates.ndim == 1:
                covariates = covariates[:, None]
            if covariates.shape[0] != labels.shape[0]:
                raise ValueError(
                    f"labels and covariates must have equal length, got {labels.shape[0]} and {covariates.shape[0]}"
                )
            covariates.setflags(write=False)
            object.__setattr__(self, "covariates", covariates)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def covariate_dim(self) -> int:
        return 0 if self.covariates is None else int(self.covariates.shape[1])

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"t": np.arange(len(self)), "y": self.labels})
        for k in range(self.covariate_dim):
            frame[f"x{k + 1}"] = self.covariates[:, k]
        return frame

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)


def read_trajectory_csv(path, seed: Optional[int] = None) -> Trajectory:
    """Load a trajectory written by ``Trajectory.to_csv``."""
    frame = pd.read_csv(path, float_precision="round_trip")
    if "y" not in frame.columns:
        raise ValueError(f"{path}: missing 'y' column")
    x_cols = sorted((c for c in frame.columns if c.startswith("x") and c[1:].isdigit()), key=lambda c: int(c[1:]))
    covariates = frame[x_cols].to_numpy(dtype=float) if x_cols else None
    return Trajectory(frame["y"].to_numpy(dtype=float), covariates, seed)


def _check_sizes(n, burn_in):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    if not isinstance(burn_in, (int, np.integer)) or burn_in < 0:
        raise ValueError("burn_in must be a non-negative integer")


def _simulate_covariates(spec: Optional[CovariateSpec], total: int, rng: np.random.Generator) -> Optional[np.ndarray]:
    if spec is None:
        return None
    shocks = rng.normal(0.0, spec.innovation_std, size=total)
    return lfilter([1.0], [1.0, -spec.ar_coefficient], shocks)


def simulate_binary(spec: BinaryDgpSpec, n: int, seed: int, burn_in: int = DEFAULT_BURN_IN) -> Trajectory:
    """
    Simulate a binary autoregression.

    Y_t = +1 with probability p_t = (1 + f(Y_{t-1..t-p}, X_{t-1..t-q})) / 2.
    Initial label lags are drawn uniformly from {-1, +1} and the covariate
    chain starts from zero; the first ``burn_in`` steps are discarded.

    Args:
        spec: Binary DGP specification
        n: Number of retained observations
        seed: Seed of the PCG64 stream
        burn_in: Number of discarded initial steps

    Returns:
        Trajectory: n labels and, for covariate models, the aligned covariates

    Raises:
        ValueError: If n or burn_in are invalid
        InvalidModelError: If p_t leaves [0, 1]
    """
    _check_sizes(n, burn_in)
    rng = make_rng(seed)
    p = spec.lag_order
    q = spec.covariate_lags
    total = n + burn_in
    initial = np.where(rng.random(p) < 0.5, -1.0, 1.0)
    uniforms = rng.random(total)
    x = _simulate_covariates(spec.covariate_spec, total, rng)

    y = np.empty(total + p)
    y[:p] = initial[::-1]
    c = spec.coefficients
    for t in range(total):
        i = t + p
        if spec.kind is DgpKind.DGP1:
            f = c[0] + c[1] * y[i - 1]
        elif spec.kind is DgpKind.DGP2:
            y1 = y[i - 1]
            x1 = x[t - 1] if t >= 1 else 0.0
            f = (c[0] + c[1] * max(y1, 0.0) + c[2] * min(y1, 0.0) + c[3] * y[i - 2]
                 + c[4] / (1.0 + x1 * x1))
        else:
            f = c[0]
            for k in range(1, p + 1):
                f += c[k] * y[i - k]
            for k in range(1, q + 1):
                xk = x[t - k] if t >= k else 0.0
                f += c[p + k] / (1.0 + xk * xk)
        p_t = 0.5 * (1.0 + f)
        if not 0.0 <= p_t <= 1.0:
            raise InvalidModelError(f"p_t = {p_t} outside [0, 1] at step {t}")
        y[i] = 1.0 if uniforms[t] < p_t else -1.0

    labels = y[p + burn_in:]
    covariates = None if x is None else x[burn_in:]
    logger.info(f"Simulated {spec.kind.value}: n={n}, burn_in={burn_in}, seed={seed}")
    return Trajectory(labels, covariates, seed)


class ChainOracle(NamedTuple):
    """Exact stationary quantities of a covariate-free binary chain"""
    stationary_prob_plus: float
    zero_one_risk: float
    hinge_risk: float


def _stationary_distribution(transition: np.ndarray) -> np.ndarray:
    k = transition.shape[0]
    system = np.vstack([transition.T - np.eye(k), np.ones((1, k))])
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def exact_risk_oracle(spec: BinaryDgpSpec) -> ChainOracle:
    """
    Exact stationary P(Y = 1), 0-1 risk and hinge risk of the Bayes classifier.

    The label lags form a finite Markov chain over {-1, 1}^p; the stationary
    distribution is solved from pi = pi P with sum(pi) = 1. The hinge risk of a
    +-1 predictor on +-1 labels is exactly twice its 0-1 risk.

    Raises:
        InvalidModelError: If the spec reads a covariate
    """
    if spec.covariate_lags:
        raise InvalidModelError("exact oracle requires a covariate-free chain (DGP1 shape)")
    p = spec.lag_order
    states = np.array(list(itertools.product((-1.0, 1.0), repeat=p)))
    index = {tuple(s): i for i, s in enumerate(states)}
    p_up = 0.5 * (1.0 + link_values(spec, states))
    transition = np.zeros((len(states), len(states)))
    for i, s in enumerate(states):
        for label, prob in ((1.0, p_up[i]), (-1.0, 1.0 - p_up[i])):
            nxt = (label,) + tuple(s[:-1])
            transition[i, index[nxt]] += prob
    pi = _stationary_distribution(transition)
    predictions = sign(link_values(spec, states))
    miss = np.where(predictions > 0, 1.0 - p_up, p_up)
    r01 = float(pi @ miss)
    return ChainOracle(float(pi @ p_up), r01, 2.0 * r01)


@dataclass(frozen=True)
class AcxSpec:
    """
    Finite-lag affine causal model with an exogenous AR(1) covariate.

    Y_t = f + sqrt(H) xi_t with
        f = phi_0 + sum_k phi_k Y_{t-k}   (+ beta X_{t-1} for ARX1)
        H = omega + sum_k a_k Y_{t-k}^2   (+ beta X_{t-1}^2 for ARCH1X)
    f_coefficients = (phi_0, phi_1, ...), m_coefficients = (omega, a_1, ...),
    xi_t = innovation_std * U with U uniform on [-sqrt(3), sqrt(3)].
    """
    f_coefficients: Tuple[float, ...]
    m_coefficients: Tuple[float, ...]
    innovation_std: float = DEFAULT_ACX_INNOVATION_STD
    model_kind: AcxModelKind = AcxModelKind.ARX1
    covariate_coefficient: float = 0.0
    covariate_spec: CovariateSpec = field(default_factory=CovariateSpec)

    def __post_init__(self):
        if not isinstance(self.model_kind, AcxModelKind):
            raise TypeError("model_kind must be an AcxModelKind")
        f = tuple(float(v) for v in self.f_coefficients)
        m = tuple(float(v) for v in self.m_coefficients)
        object.__setattr__(self, "f_coefficients", f)
        object.__setattr__(self, "m_coefficients", m)
        if len(f) < 1 or len(m) < 1:
            raise InvalidModelError("f_coefficients and m_coefficients need at least the constant term")
        if not self.innovation_std > 0:
            raise InvalidModelError("innovation_std must be positive")
        if m[0] <= 0 or any(a < 0 for a in m[1:]):
            raise InvalidModelError("m_coefficients must have omega > 0 and non-negative lag terms")
        if self.model_kind is AcxModelKind.ARCH1X and self.covariate_coefficient < 0:
            raise InvalidModelError("ARCH1X covariate_coefficient must be non-negative")
        if not np.all(np.isfinite(f + m + (self.covariate_coefficient,))):
            raise InvalidModelError("coefficients must be finite")

    @property
    def max_lag(self) -> int:
        return max(len(self.f_coefficients), len(self.m_coefficients)) - 1


def acx_contraction_sum(spec: AcxSpec) -> float:
    """
    Left side of the AC-X contraction condition with r = 2.

    sum_k max(alpha_k(g), |phi_k| + ||xi||_2^2 a_k), where only k = 1 carries the
    covariate's AR coefficient.
    """
    var = spec.innovation_std ** 2
    total = 0.0
    for k in range(1, max(spec.max_lag, 1) + 1):
        phi = spec.f_coefficients[k] if k < len(spec.f_coefficients) else 0.0
        a = spec.m_coefficients[k] if k < len(spec.m_coefficients) else 0.0
        g = abs(spec.covariate_spec.ar_coefficient) if k == 1 else 0.0
        total += max(g, abs(phi) + var * a)
    return total


def simulate_acx(spec: AcxSpec, n: int, seed: int, burn_in: int = DEFAULT_BURN_IN) -> Trajectory:
    """
    Simulate a finite-lag AC-X model.

    Raises:
        InvalidModelError: If the contraction sum is >= 1 (checked before sampling)
    """
    _check_sizes(n, burn_in)
    contraction = acx_contraction_sum(spec)
    if contraction >= 1.0:
        raise InvalidModelError(f"AC-X contraction sum must be < 1, got {contraction}")
    rng = make_rng(seed)
    total = n + burn_in
    lags = spec.max_lag
    xi = spec.innovation_std * rng.uniform(-SQRT3, SQRT3, size=total)
    x = _simulate_covariates(spec.covariate_spec, total, rng)
    phi = np.asarray(spec.f_coefficients[1:])
    alpha = np.asarray(spec.m_coefficients[1:])
    beta = spec.covariate_coefficient

    y = np.zeros(total + lags)
    for t in range(total):
        i = t + lags
        x_prev = x[t - 1] if t >= 1 else 0.0
        mean = spec.f_coefficients[0]
        if phi.size:
            mean += float(phi @ y[i - phi.size:i][::-1])
        h = spec.m_coefficients[0]
        if alpha.size:
            past = y[i - alpha.size:i][::-1]
            h += float(alpha @ (past * past))
        if spec.model_kind is AcxModelKind.ARX1:
            mean += beta * x_prev
        else:
            h += beta * x_prev * x_prev
        y[i] = mean + np.sqrt(h) * xi[t]

    logger.info(f"Simulated {spec.model_kind.value}: n={n}, burn_in={burn_in}, contraction={contraction:.4f}")
    return Trajectory(y[lags + burn_in:], x[burn_in:], seed)


@dataclass(frozen=True)
class SupervisedSample:
    """Inputs X (one row per pair) and targets y built from a trajectory"""
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y must have the same number of rows")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return int(self.y.shape[0])

    @property
    def dim(self) -> int:
        return int(self.X.shape[1])

    def split(self, index: int) -> Tuple["SupervisedSample", "SupervisedSample"]:
        """Chronological split into rows [0, index) and [index, end)."""
        return SupervisedSample(self.X[:index], self.y[:index]), SupervisedSample(self.X[index:], self.y[index:])


def supervised_layout(spec: BinaryDgpSpec) -> Tuple[int, int]:
    """(lag_order, covariate_lags) used to train on data from ``spec``."""
    return spec.lag_order, spec.covariate_lags


def make_supervised(traj: Trajectory, lag_order: int, covariate_lags: Optional[int] = None) -> SupervisedSample:
    """
    Build lagged input/target pairs.

    The input for target Y_t is (Y_{t-1}, ..., Y_{t-p}, X_{t-1}, ..., X_{t-q}),
    each covariate lag contributing its full vector. ``covariate_lags``
    defaults to ``lag_order`` when the trajectory carries covariates.

    Raises:
        ValueError: If the trajectory is not longer than lag_order
    """
    if not isinstance(lag_order, (int, np.integer)) or lag_order < 1:
        raise ValueError("lag_order must be a positive integer")
    if covariate_lags is None:
        covariate_lags = lag_order if traj.covariates is not None else 0
    if covariate_lags < 0 or covariate_lags > lag_order:
        raise ValueError("covariate_lags must lie in [0, lag_order]")
    if covariate_lags and traj.covariates is None:
        raise ValueError("covariate_lags requested on a trajectory without covariates")
    length = len(traj)
    if length <= lag_order:
        raise ValueError(f"trajectory of length {length} is too short for lag_order {lag_order}")
    columns = [traj.labels[lag_order - k:length - k] for k in range(1, lag_order + 1)]
    for k in range(1, covariate_lags + 1):
        block = traj.covariates[lag_order - k:length - k]
        columns.extend(block[:, j] for j in range(block.shape[1]))
    X = np.column_stack(columns)
    return SupervisedSample(X, traj.labels[lag_order:])


def bayes_hinge_risk(spec: BinaryDgpSpec, traj: Trajectory) -> float:
    """Empirical hinge risk of h0 on a trajectory, aligned like ``make_supervised``."""
    p, q = supervised_layout(spec)
    sample = make_supervised(traj, p, q)
    predictions = sign(link_values(spec, sample.X))
    return float(np.mean(np.maximum(1.0 - sample.y * predictions, 0.0)))


class TransitionCounts(NamedTuple):
    """Empirical one-step transition frequencies of a +-1 sequence"""
    p_up_from_minus: float
    p_up_from_plus: float
    n_from_minus: int
    n_from_plus: int


def transition_frequencies(traj: Trajectory) -> TransitionCounts:
    prev, nxt = traj.labels[:-1], traj.labels[1:]
    from_minus = prev < 0
    n_minus = int(from_minus.sum())
    n_plus = int((~from_minus).sum())
    up_minus = float(np.mean(nxt[from_minus] > 0)) if n_minus else float("nan")
    up_plus = float(np.mean(nxt[~from_minus] > 0)) if n_plus else float("nan")
    return TransitionCounts(up_minus, up_plus, n_minus, n_plus)


def _covariate_from_values(values) -> CovariateSpec:
    return CovariateSpec(
        float(values.get("covariate_ar", DEFAULT_COVARIATE_AR)),
        float(values.get("covariate_std", DEFAULT_COVARIATE_STD)),
    )


def binary_spec_from_mapping(values) -> BinaryDgpSpec:
    """Build a BinaryDgpSpec from string key/value pairs (kind, coefficients, ...)."""
    try:
        kind = DgpKind(values.get("kind", values.get("dgp", "dgp1")).lower())
    except ValueError as exc:
        raise ValueError(f"unknown dgp kind {values.get('kind')!r}") from exc
    if kind is DgpKind.DGP1 and "coefficients" not in values:
        return BinaryDgpSpec.dgp1()
    if kind is DgpKind.DGP2 and "coefficients" not in values:
        return BinaryDgpSpec.dgp2(_covariate_from_values(values))
    coefficients = parse_float_list(values.get("coefficients", ""), "coefficients")
    if kind is DgpKind.CUSTOM_AFFINE:
        lag_order = int(values.get("lag_order", 1))
        has_cov = parse_bool(values.get("covariates", "false"), "covariates")
        cov = _covariate_from_values(values) if has_cov else None
        return BinaryDgpSpec(kind, lag_order, coefficients, cov)
    cov = _covariate_from_values(values) if kind is DgpKind.DGP2 else None
    return BinaryDgpSpec(kind, 1 if kind is DgpKind.DGP1 else 2, coefficients, cov)


def load_binary_spec(path: Union[str, Path]) -> BinaryDgpSpec:
    """Load a binary DGP from a key=value file."""
    return binary_spec_from_mapping(read_key_value_file(path))


def load_acx_spec(path: Union[str, Path]) -> AcxSpec:
    """Load an AC-X model from a key=value file."""
    values = read_key_value_file(path)
    try:
        kind = AcxModelKind(values.get("model_kind", "arx1").lower())
    except ValueError as exc:
        raise ValueError(f"unknown model_kind {values.get('model_kind')!r}") from exc
    return AcxSpec(
        parse_float_list(values.get("f_coefficients", "0"), "f_coefficients"),
        parse_float_list(values.get("m_coefficients", "1"), "m_coefficients"),
        float(values.get("innovation_std", DEFAULT_ACX_INNOVATION_STD)),
        kind,
        float(values.get("covariate_coefficient", 0.0)),
        _covariate_from_values(values),
    )
