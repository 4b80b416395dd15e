"""
Weak Dependence Module
Lipschitz-coefficient sequences, tail sums, tau(j) bounds, decay envelopes
and finite verification of the factorial-moment condition (A3).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, List, NamedTuple, Optional, Union

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.special import gammaln

from .config import (
    RIEMANNIAN_TRUNCATION, DEFAULT_A3_K_MAX, DEFAULT_A3_J_MAX, A3_FIT_INFLATION, DEFAULT_ENVELOPE_J_MAX,
    CSV_LINE_TERMINATOR
)

logger = logging.getLogger(__name__)

VERDICT_TOLERANCE = 1e-12


class SequenceKind(Enum):
    GEOMETRIC = "geometric"
    RIEMANNIAN = "riemannian"


@dataclass(frozen=True)
class CoefficientSequence:
    """
    alpha_k = c a^k (geometric) or alpha_k = c (k+1)^{-gamma} (Riemannian), k >= 1.
    """
    kind: SequenceKind
    scale: float
    ratio: float = 0.0
    exponent: float = 2.0
    truncation: int = RIEMANNIAN_TRUNCATION

    def __post_init__(self):
        if not isinstance(self.kind, SequenceKind):
            raise TypeError("kind must be a SequenceKind")
        if self.scale < 0:
            raise ValueError("scale c must be non-negative")
        if self.kind is SequenceKind.GEOMETRIC and not 0 <= self.ratio < 1:
            raise ValueError(f"geometric ratio a must lie in [0, 1), got {self.ratio}")
        if self.kind is SequenceKind.RIEMANNIAN and not self.exponent > 1:
            raise ValueError(f"Riemannian exponent gamma must be > 1, got {self.exponent}")
        if self.truncation < 1:
            raise ValueError("truncation must be a positive integer")

    @classmethod
    def geometric(cls, scale: float, ratio: float) -> "CoefficientSequence":
        return cls(SequenceKind.GEOMETRIC, scale, ratio=ratio)

    @classmethod
    def riemannian(cls, scale: float, exponent: float, truncation: int = RIEMANNIAN_TRUNCATION) -> "CoefficientSequence":
        return cls(SequenceKind.RIEMANNIAN, scale, exponent=exponent, truncation=truncation)

    def coefficients(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if self.kind is SequenceKind.GEOMETRIC:
            return self.scale * self.ratio ** k
        return self.scale * (k + 1.0) ** (-self.exponent)

    @property
    def contracting(self) -> bool:
        return total_sum(self) < 1.0


@lru_cache(maxsize=16)
def _riemannian_cumsum(exponent: float, truncation: int) -> np.ndarray:
    """Cumulative sums of (k+1)^{-gamma} for k = 1..K; entry i holds the sum up to k = i."""
    k = np.arange(1, truncation + 1, dtype=float)
    out = np.empty(truncation + 1)
    out[0] = 0.0
    np.cumsum((k + 1.0) ** (-exponent), out=out[1:])
    out.setflags(write=False)
    return out


def _riemannian_integral_tail(seq: CoefficientSequence, start: int) -> float:
    """Upper bound c (start+1)^{1-gamma} / (gamma-1) on sum_{k > start} c (k+1)^{-gamma}."""
    return seq.scale * (start + 1.0) ** (1.0 - seq.exponent) / (seq.exponent - 1.0)


def truncation_certificate(seq: CoefficientSequence) -> float:
    """Bound on the error of Riemannian sums truncated at K (0 for geometric sequences)."""
    if seq.kind is SequenceKind.GEOMETRIC:
        return 0.0
    return _riemannian_integral_tail(seq, seq.truncation)


def total_sum(seq: CoefficientSequence) -> float:
    """
    alpha = sum_{k>=1} alpha_k.

    Geometric sequences use c a / (1 - a). Riemannian sums are the partial sum to
    the truncation K; the exact total lies within ``truncation_certificate`` above it.
    """
    if seq.kind is SequenceKind.GEOMETRIC:
        return seq.scale * seq.ratio / (1.0 - seq.ratio)
    return float(seq.scale * _riemannian_cumsum(seq.exponent, seq.truncation)[-1])


def tail_sums(seq: CoefficientSequence, iotas) -> np.ndarray:
    """sum_{k >= iota+1} alpha_k for every iota (vectorised)."""
    iotas = np.asarray(iotas)
    if np.any(iotas < 1):
        raise ValueError("iota must be a positive integer")
    if seq.kind is SequenceKind.GEOMETRIC:
        return seq.scale * seq.ratio ** (iotas + 1.0) / (1.0 - seq.ratio)
    cum = _riemannian_cumsum(seq.exponent, seq.truncation)
    inside = np.minimum(iotas, seq.truncation)
    truncated = seq.scale * (cum[-1] - cum[inside])
    beyond = seq.scale * (iotas + 1.0) ** (1.0 - seq.exponent) / (seq.exponent - 1.0)
    return np.where(iotas < seq.truncation, truncated, beyond)


def tail_sum(seq: CoefficientSequence, iota: int) -> float:
    """
    Tail sum_{k >= iota+1} alpha_k.

    Geometric: c a^{iota+1} / (1 - a). Riemannian: truncated partial sum, or the
    integral bound once iota reaches the truncation.
    """
    return float(tail_sums(seq, np.array([iota]))[0])


class TauBound(NamedTuple):
    value: float
    argmin_iota: int


def tau_bound(seq: CoefficientSequence, j: int) -> TauBound:
    """
    tau(j) = min_{1 <= iota <= j} alpha^{j/iota} + sum_{k >= iota+1} alpha_k by full enumeration.

    Raises:
        ValueError: If j < 1 or the sequence is not contracting (alpha >= 1)
    """
    if j < 1:
        raise ValueError("j must be a positive integer")
    alpha = total_sum(seq)
    if alpha >= 1.0:
        raise ValueError(f"contraction violated: alpha = {alpha} >= 1")
    iotas = np.arange(1, j + 1)
    values = alpha ** (j / iotas) + tail_sums(seq, iotas)
    best = int(np.argmin(values))
    return TauBound(float(values[best]), int(iotas[best]))


def tau_table(seq: CoefficientSequence, j_max: int) -> pd.DataFrame:
    """Table j, tau_bound, argmin_iota for j = 1..j_max."""
    rows = [(j,) + tuple(tau_bound(seq, j)) for j in range(1, j_max + 1)]
    return pd.DataFrame(rows, columns=["j", "tau_bound", "argmin_iota"])


@dataclass(frozen=True)
class RateEnvelope:
    """Calibrated decay envelope j -> constant * shape(j) dominating tau on 1..j_max"""
    constant: float
    rate: float
    kind: SequenceKind
    j_max: int

    def shape(self, j):
        j = np.asarray(j, dtype=float)
        if self.kind is SequenceKind.GEOMETRIC:
            return np.exp(-np.sqrt(self.rate * j))
        return ((1.0 + np.log(np.maximum(j, 1.0))) / np.maximum(j, 1.0)) ** self.rate

    def __call__(self, j):
        return self.constant * self.shape(j)


def _calibrate(seq: CoefficientSequence, envelope: RateEnvelope) -> RateEnvelope:
    js = np.arange(1, envelope.j_max + 1)
    taus = np.array([tau_bound(seq, int(j)).value for j in js])
    constant = float(np.max(taus / envelope.shape(js)))
    logger.debug(f"Calibrated {envelope.kind.value} envelope constant {constant:.6g} on j <= {envelope.j_max}")
    return RateEnvelope(constant, envelope.rate, envelope.kind, envelope.j_max)


def geometric_case_rate(alpha: float, a: float, j_max: int = DEFAULT_ENVELOPE_J_MAX) -> RateEnvelope:
    """
    Envelope c exp(-sqrt(log(alpha) log(a) j)) for a geometric sequence with total
    alpha and ratio a, with c calibrated so it dominates tau_bound on 1..j_max.

    Raises:
        ValueError: If alpha or a lie outside (0, 1)
    """
    if not 0 < alpha < 1 or not 0 < a < 1:
        raise ValueError("alpha and a must lie in (0, 1)")
    seq = CoefficientSequence.geometric(alpha * (1.0 - a) / a, a)
    rate = math.log(alpha) * math.log(a)
    return _calibrate(seq, RateEnvelope(1.0, rate, SequenceKind.GEOMETRIC, j_max))


def riemannian_case_rate(seq: CoefficientSequence, j_max: int = DEFAULT_ENVELOPE_J_MAX) -> RateEnvelope:
    """Envelope c ((1 + log j) / j)^{gamma - 1}, calibrated like the geometric one."""
    if seq.kind is not SequenceKind.RIEMANNIAN:
        raise ValueError("riemannian_case_rate needs a Riemannian sequence")
    return _calibrate(seq, RateEnvelope(1.0, seq.exponent - 1.0, SequenceKind.RIEMANNIAN, j_max))


@dataclass(frozen=True)
class GeometricTail:
    """Certificate eps_j <= constant * ratio^j beyond the checked range"""
    constant: float
    ratio: float

    def bound(self, k: int, j_max: int) -> float:
        start = j_max + 1
        rho = ((start + 2.0) / (start + 1.0)) ** k * self.ratio
        if rho >= 1.0:
            return float("inf")
        return (start + 1.0) ** k * self.constant * self.ratio ** start / (1.0 - rho)


@dataclass(frozen=True)
class StretchedExponentialTail:
    """Certificate eps_j <= constant * exp(-sqrt(rate * j)) beyond the checked range"""
    constant: float
    rate: float

    def bound(self, k: int, j_max: int) -> float:
        value, _ = quad(lambda x: (x + 2.0) ** k * math.exp(-math.sqrt(self.rate * x)), j_max, np.inf, limit=200)
        return self.constant * value


TailCertificate = Union[GeometricTail, StretchedExponentialTail]


def a3_bound(L1: float, L2: float, mu: float, k: int) -> float:
    """L1 L2^k (k!)^mu."""
    return float(L1 * L2 ** k * math.exp(mu * gammaln(k + 1.0)))


def _eps_values(eps_sequence, j_max: int) -> np.ndarray:
    if callable(eps_sequence):
        values = np.asarray(eps_sequence(np.arange(j_max + 1)), dtype=float)
    else:
        values = np.asarray(eps_sequence, dtype=float)[:j_max + 1]
        if values.size < j_max + 1:
            raise ValueError(f"eps_sequence has {values.size} terms, need {j_max + 1}")
    if np.any(values < 0):
        raise ValueError("eps_j must be non-negative")
    if np.any(np.diff(values) > 0):
        raise ValueError("eps_j must be non-increasing")
    return values


def moment_sums(eps_sequence, k_max: int, j_max: int) -> np.ndarray:
    """sum_{j=0..j_max} (j+1)^k eps_j for k = 0..k_max."""
    eps = _eps_values(eps_sequence, j_max)
    weights = np.arange(1, j_max + 2, dtype=float)
    return np.array([float(np.sum(weights ** k * eps)) for k in range(k_max + 1)])


@dataclass
class A3Row:
    k: int
    partial_sum: float
    tail_certificate: float
    bound: float
    verdict: str
    growing: bool


@dataclass
class A3Report:
    """Per-k verdicts of the factorial-moment condition, verified up to k_max"""
    rows: List[A3Row]
    L1: float
    L2: float
    mu: float
    j_max: int

    @property
    def verified(self) -> bool:
        return all(row.verdict == "holds" for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.k, r.partial_sum, r.tail_certificate, r.bound, r.verdict) for r in self.rows],
            columns=["k", "partial_sum", "tail_certificate", "bound", "verdict"],
        )

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)

    def summary(self) -> str:
        status = f"verified up to k={self.rows[-1].k}" if self.verified else "not verified"
        return f"(A3) with L1={self.L1:.6g}, L2={self.L2:.6g}, mu={self.mu:g}: {status}"


def check_a3(eps_sequence: Union[Callable, np.ndarray], L1: float, L2: float, mu: float,
             k_max: int = DEFAULT_A3_K_MAX, j_max: int = DEFAULT_A3_J_MAX,
             tail: Optional[TailCertificate] = None) -> A3Report:
    """
    Check sum_{j>=0} (j+1)^k eps_j <= L1 L2^k (k!)^mu for k = 0..k_max.

    Verdicts: "holds" when partial sum plus tail certificate is within the
    bound, "fails" when the partial sum alone exceeds it, "inconclusive"
    otherwise (always the case without a certificate unless it fails).
    ``growing`` flags partial sums whose upper half still carries more than
    0.1% of the total, the signature of a non-summable sequence.
    """
    if L1 < 0 or L2 < 0 or mu < 0:
        raise ValueError("L1, L2 and mu must be non-negative")
    eps = _eps_values(eps_sequence, j_max)
    weights = np.arange(1, j_max + 2, dtype=float)
    half = (j_max + 1) // 2
    rows = []
    for k in range(k_max + 1):
        terms = weights ** k * eps
        partial = float(np.sum(terms))
        upper_half = float(np.sum(terms[half:]))
        cert = tail.bound(k, j_max) if tail is not None else float("inf")
        bound = a3_bound(L1, L2, mu, k)
        if partial > bound * (1.0 + VERDICT_TOLERANCE):
            verdict = "fails"
        elif partial + cert <= bound * (1.0 + VERDICT_TOLERANCE):
            verdict = "holds"
        else:
            verdict = "inconclusive"
        rows.append(A3Row(k, partial, cert, bound, verdict, upper_half > 1e-3 * partial))
    report = A3Report(rows, L1, L2, mu, j_max)
    logger.info(report.summary())
    return report


def fit_a3_constants(sums, mu: float, inflation: float = A3_FIT_INFLATION):
    """
    Least-squares fit of log S_k - mu log k! = log L1 + k log L2, with both
    constants multiplied by ``inflation``.

    Returns:
        tuple: (L1, L2)
    """
    sums = np.asarray(sums, dtype=float)
    if np.any(sums <= 0):
        raise ValueError("moment sums must be positive")
    k = np.arange(sums.size, dtype=float)
    target = np.log(sums) - mu * gammaln(k + 1.0)
    log_l2, log_l1 = np.polyfit(k, target, 1)
    return float(math.exp(log_l1) * inflation), float(math.exp(log_l2) * inflation)


def a3_witness(alpha: float, a: float, mu: float = 2.0, k_max: int = DEFAULT_A3_K_MAX,
               j_max: int = DEFAULT_A3_J_MAX, envelope_j_max: int = DEFAULT_ENVELOPE_J_MAX) -> A3Report:
    """
    Geometric-case witness: take eps_j from the calibrated envelope, fit L1 and
    L2 on the certified sums, then check (A3) with the inflated constants.
    """
    envelope = geometric_case_rate(alpha, a, envelope_j_max)
    tail = StretchedExponentialTail(envelope.constant, envelope.rate)
    sums = moment_sums(envelope, k_max, j_max)
    certified = sums + np.array([tail.bound(k, j_max) for k in range(k_max + 1)])
    L1, L2 = fit_a3_constants(certified, mu)
    return check_a3(envelope, L1, L2, mu, k_max, j_max, tail)
