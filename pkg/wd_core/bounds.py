"""
Generalization Bounds Module
Covering-number bound, Psi functions, the constants of the two generalization
theorems, sample-size thresholds, deviation bounds and the epsilon roots of
the monotone root functions.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from .config import (
    BISECTION_LOWER_FACTOR, BISECTION_UPPER_SHRINK, BISECTION_MAX_ITER, BISECTION_XTOL, BISECTION_RTOL,
    ROOT_RESIDUAL_TOL, DEFAULT_C3, DEFAULT_VARIANCE_PROXY, DEFAULT_NU, DEFAULT_ETA, DEFAULT_ALPHA,
    CSV_LINE_TERMINATOR
)
from .kvconfig import parse_bool
from .neuralnet import ComplexityBudget

logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


class DegenerateComplexityError(ValueError):
    """Raised when the covering bound is undefined (depth L = 0)"""


class PsiKind(Enum):
    """The four weak-dependence structures"""
    THETA = "theta"
    ETA = "eta"
    KAPPA = "kappa"
    LAMBDA = "lambda"


class DeviationVariant(Enum):
    PROP1_1 = "prop1_1"
    PROP1_2 = "prop1_2"
    MOD2 = "mod2"


def psi_value(kind: PsiKind, u: int, v: int, lip1: float = 1.0, lip2: float = 1.0):
    """
    Weak-dependence function psi(Lip g1, Lip g2, u, v) and its normalised Psi(u, v).

    Returns:
        tuple: (psi, Psi)
    """
    if u < 1 or v < 1:
        raise ValueError("u and v must be positive integers")
    if lip1 < 0 or lip2 < 0:
        raise ValueError("Lipschitz constants must be non-negative")
    if kind is PsiKind.THETA:
        return v * lip2, 2.0 * v
    if kind is PsiKind.ETA:
        return u * lip1 + v * lip2, float(u + v)
    if kind is PsiKind.KAPPA:
        return u * v * lip1 * lip2, float(u * v)
    if kind is PsiKind.LAMBDA:
        return u * lip1 + v * lip2 + u * v * lip1 * lip2, (u + v + u * v) / 2.0
    raise TypeError("kind must be a PsiKind")


@dataclass(frozen=True)
class BoundInputs:
    """Constants feeding the deviation bounds and the two generalization theorems"""
    n: int
    M: float = 1.0
    G: float = 1.0
    C_sigma: float = 1.0
    L1: float = 1.0
    L2: float = 1.0
    mu: float = 2.0
    psi_kind: PsiKind = PsiKind.THETA
    C: float = DEFAULT_VARIANCE_PROXY
    C3: float = DEFAULT_C3
    nu: float = DEFAULT_NU
    eta: float = DEFAULT_ETA
    alpha: float = DEFAULT_ALPHA
    complexity: ComplexityBudget = field(default_factory=lambda: ComplexityBudget(L=1, N=1, B=1.0, F=1.0, S=0))
    log_n_variant: bool = False  # subtract log n instead of log log n in the second root function

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError("n must be a positive integer")
        for name in ("M", "G", "C_sigma", "C", "C3"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("L1", "L2", "mu"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        if not self.alpha > 2:
            raise ValueError("alpha must be greater than 2")
        if not 0 < self.nu < 1:
            raise ValueError("nu must lie in (0, 1)")
        if not isinstance(self.psi_kind, PsiKind):
            raise TypeError("psi_kind must be a PsiKind")

    @property
    def psi11(self) -> float:
        return psi_value(self.psi_kind, 1, 1)[1]

    def with_n(self, n: int) -> "BoundInputs":
        return replace(self, n=n)


def _sparsity_factor(complexity: ComplexityBudget) -> float:
    return 2.0 * complexity.L * (complexity.S + 1)


def _covering_log_argument(complexity: ComplexityBudget, G: float, C_sigma: float) -> float:
    inner = 4.0 * G * C_sigma * complexity.L * (complexity.N + 1) * max(complexity.B, 1.0)
    if inner <= 0:
        raise DegenerateComplexityError(
            f"covering bound undefined for depth L={complexity.L} (log argument {inner})"
        )
    return math.log(inner)


def log_covering_bound(complexity: ComplexityBudget, eps: float, G: float, C_sigma: float) -> float:
    """
    Log covering number bound 2L(S+1) log((4G/eps) C_sigma L (N+1) (B v 1)).

    Raises:
        ValueError: If eps is not positive
        DegenerateComplexityError: If the complexity has L = 0
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    return _sparsity_factor(complexity) * (_covering_log_argument(complexity, G, C_sigma) - math.log(eps))


def covering_constant(inputs: BoundInputs) -> float:
    """C6 = 2L(S+1) log(4 G C_sigma L (N+1) (B v 1))."""
    return _sparsity_factor(inputs.complexity) * _covering_log_argument(inputs.complexity, inputs.G, inputs.C_sigma)


def _kappa(mu: float) -> float:
    return (2.0 * mu + 3.0) / (mu + 2.0)


def thm1_constants(inputs: BoundInputs) -> Dict[str, float]:
    """
    C1, C2, C4, C6, C_{n,1} and C'_{n,1}.

    C6 is NaN when the complexity is degenerate (L = 0).
    """
    M, mu, n = inputs.M, inputs.mu, float(inputs.n)
    kappa = _kappa(mu)
    c1 = 4.0 * M ** 2 * inputs.psi11 * inputs.L1
    c2 = 2.0 * M * inputs.L2 * max(2.0 ** (3.0 + mu) / inputs.psi11, 1.0)
    c2_root = c2 ** (1.0 / (mu + 2.0))
    c4 = 4.0 * c1 + 8.0 * c2_root * M ** kappa
    try:
        c6 = covering_constant(inputs)
    except DegenerateComplexityError:
        c6 = float("nan")
    cn1 = n ** 2 / (4.0 * c1 * n + 8.0 * c2_root * (n * M) ** kappa)
    cn1_prime = n ** 2 / (c1 * n + 2.0 * c2_root * (2.0 * n * M) ** kappa)
    return {"C1": c1, "C2": c2, "C4": c4, "C6": c6, "Cn1": cn1, "Cn1_prime": cn1_prime}


def thm2_constants(inputs: BoundInputs) -> Dict[str, float]:
    """C5, C_{n,2} and C'_{n,2}."""
    M, C, nu, n = inputs.M, inputs.C, inputs.nu, float(inputs.n)
    c5 = 4.0 * (C + M ** nu / C)
    log_n = math.log(n)
    cn2 = (n ** 2 / 4.0) / (n * C + log_n * n ** (nu - 0.25) * M ** nu / C)
    cn2_prime = n ** 2 / (n * C + log_n * n ** (nu - 0.25) * (2.0 * M) ** nu / C)
    return {"C5": c5, "Cn2": cn2, "Cn2_prime": cn2_prime}


def phi1(inputs: BoundInputs, eps, constants: Optional[Dict[str, float]] = None):
    """phi(eps) = 2L(S+1) log eps + C_{n,1} eps^2 + log eta - C6 (vectorised in eps)."""
    constants = constants or thm1_constants(inputs)
    eps = np.asarray(eps, dtype=float)
    return (_sparsity_factor(inputs.complexity) * np.log(eps) + constants["Cn1"] * eps ** 2
            + math.log(inputs.eta) - constants["C6"])


def _thm2_log_term(inputs: BoundInputs) -> float:
    log_n = math.log(inputs.n)
    if inputs.log_n_variant:
        return log_n
    return math.log(log_n) if log_n > 0 else float("-inf")


def phi2(inputs: BoundInputs, eps, constants: Optional[Dict[str, float]] = None):
    """
    phi(eps) = 2L(S+1) log eps + C_{n,2} eps^2 + log(eta / C3) - C6 - log log n.

    ``inputs.log_n_variant`` switches the last term to -log n.
    """
    c6 = thm1_constants(inputs)["C6"] if constants is None else constants["C6"]
    cn2 = thm2_constants(inputs)["Cn2"] if constants is None else constants["Cn2"]
    eps = np.asarray(eps, dtype=float)
    return (_sparsity_factor(inputs.complexity) * np.log(eps) + cn2 * eps ** 2
            + math.log(inputs.eta / inputs.C3) - c6 - _thm2_log_term(inputs))


@dataclass
class EpsilonRoot:
    """Root of a root function on (0, 2M), or the reason none was found"""
    value: Optional[float]
    feasible: bool
    residual: float = float("nan")
    rate_bound: float = float("nan")
    rate_ok: Optional[bool] = None
    reason: str = ""

    def as_float(self) -> float:
        return self.value if self.value is not None else float("nan")


def bisection_bracket(M: float):
    upper = 2.0 * M
    return BISECTION_LOWER_FACTOR * upper, upper * (1.0 - BISECTION_UPPER_SHRINK)


def _solve_increasing(phi, M: float, label: str) -> EpsilonRoot:
    lower, upper = bisection_bracket(M)
    f_low, f_up = float(phi(lower)), float(phi(upper))
    if not np.isfinite(f_up) or f_up <= 0:
        logger.warning(f"{label}: infeasible, phi(2M) = {f_up:.6g} <= 0")
        return EpsilonRoot(None, False, reason=f"phi(2M) = {f_up:.6g} is not positive; n is too small")
    if f_low >= 0:
        logger.warning(f"{label}: no sign change, phi at lower bracket = {f_low:.6g}")
        return EpsilonRoot(None, False, reason=f"phi at the lower bracket is {f_low:.6g}; no sign change")
    root = bisect(lambda e: float(phi(e)), lower, upper, xtol=BISECTION_XTOL, rtol=BISECTION_RTOL,
                  maxiter=BISECTION_MAX_ITER)
    residual = float(phi(root))
    if abs(residual) >= ROOT_RESIDUAL_TOL:
        logger.warning(f"{label}: residual {residual:.3g} above tolerance")
    logger.info(f"{label}: root {root:.12g} (residual {residual:.3g})")
    return EpsilonRoot(root, True, residual)


def solve_eps1(inputs: BoundInputs) -> EpsilonRoot:
    """
    epsilon_1: root of phi1 on (0, 2M) by bisection.

    The returned root also carries the rate claim eps1 < 2M n^{-1/(alpha(mu+2))}.
    """
    constants = thm1_constants(inputs)
    if not np.isfinite(constants["C6"]):
        return EpsilonRoot(None, False, reason="degenerate complexity (L = 0)")
    root = _solve_increasing(lambda e: phi1(inputs, e, constants), inputs.M, "eps1")
    root.rate_bound = 2.0 * inputs.M * inputs.n ** (-1.0 / (inputs.alpha * (inputs.mu + 2.0)))
    if root.feasible:
        root.rate_ok = root.value < root.rate_bound
    return root


def solve_eps2(inputs: BoundInputs) -> EpsilonRoot:
    """epsilon_2: root of phi2 on (0, 2M); rate claim eps2 < 2M n^{-1/alpha}."""
    if inputs.n < 3 and not inputs.log_n_variant:
        return EpsilonRoot(None, False, reason="log log n requires n >= 3")
    if inputs.n < 2:
        return EpsilonRoot(None, False, reason="log n requires n >= 2")
    constants = {**thm1_constants(inputs), **thm2_constants(inputs)}
    if not np.isfinite(constants["C6"]):
        return EpsilonRoot(None, False, reason="degenerate complexity (L = 0)")
    root = _solve_increasing(lambda e: phi2(inputs, e, constants), inputs.M, "eps2")
    root.rate_bound = 2.0 * inputs.M * inputs.n ** (-1.0 / inputs.alpha)
    if root.feasible:
        root.rate_ok = root.value < root.rate_bound
    return root


def eps1_prime(inputs: BoundInputs) -> Dict[str, float]:
    """
    Both published forms of epsilon'_1.

    stmt_form = (log(1/eta) / C_{n,1})^{mu+2}; proof_form = (log(1/eta) / C'_{n,1})^{1/2}.
    """
    constants = thm1_constants(inputs)
    log_inv_eta = -math.log(inputs.eta)
    return {
        "stmt_form": (log_inv_eta / constants["Cn1"]) ** (inputs.mu + 2.0),
        "proof_form": math.sqrt(log_inv_eta / constants["Cn1_prime"]),
    }


def thm2_constants_and_eps2(inputs: BoundInputs) -> Dict[str, object]:
    """
    C5, C_{n,2}, C'_{n,2}, epsilon_2 and epsilon'_2.

    epsilon'_2 = (log(C3 log n / eta) / C'_{n,2})^{1/2}, taken as 0 when the
    logarithm is negative.
    """
    constants = thm2_constants(inputs)
    out: Dict[str, object] = dict(constants)
    out["eps2"] = solve_eps2(inputs)
    if inputs.n >= 2:
        numerator = math.log(inputs.C3 * math.log(inputs.n) / inputs.eta)
        out["eps2_prime"] = math.sqrt(max(numerator, 0.0) / constants["Cn2_prime"])
    else:
        out["eps2_prime"] = float("nan")
    return out


def _power_threshold(scale: float, gap: float, exponent: float) -> float:
    """(scale * max(gap, 0))^exponent, in log space with overflow to inf."""
    base = scale * max(gap, 0.0)
    if base <= 0:
        return 0.0
    log_value = exponent * math.log(base)
    if log_value > LOG_FLOAT_MAX:
        return float("inf")
    return math.exp(log_value)


def n0_witness(inputs: BoundInputs, c4: Optional[float] = None) -> int:
    """
    Smallest n0 such that K log m / m^beta < 1/2 for every integer m >= n0, with
    K = 2 C4 L(S+1) / (4 alpha M^2 (mu + 2)) and beta = (alpha - 2) / (alpha (mu + 2)).

    The failing set is an interval around the peak m* = e^{1/beta}; the search
    doubles along the decreasing branch past m* and then bisects on integers.
    """
    c4 = thm1_constants(inputs)["C4"] if c4 is None else c4
    L, S = inputs.complexity.L, inputs.complexity.S
    k = 2.0 * c4 * L * (S + 1) / (4.0 * inputs.alpha * inputs.M ** 2 * (inputs.mu + 2.0))
    beta = (inputs.alpha - 2.0) / (inputs.alpha * (inputs.mu + 2.0))

    def holds(m: int) -> bool:
        return k * math.log(m) / m ** beta < 0.5

    if k / (beta * math.e) < 0.5:
        return 1
    peak = math.exp(1.0 / beta)
    candidates = [m for m in (max(1, math.floor(peak)), math.ceil(peak)) if not holds(m)]
    if not candidates:
        return 1
    lo = max(candidates)
    hi = max(lo * 2, 2)
    while not holds(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def n_thresholds(inputs: BoundInputs) -> Dict[str, float]:
    """
    Sample-size thresholds of both theorems.

    thm1_eq14 and thm2_eq17 are the closed-form rate thresholds (thm1_eq14 is
    clipped below at 1); thm1_root_exists and thm2_root_exists are the weaker
    conditions guaranteeing a root; thm1_n0 is the numeric n0 witness.
    """
    c1 = thm1_constants(inputs)
    c5 = thm2_constants(inputs)["C5"]
    M, L, S = inputs.M, inputs.complexity.L, inputs.complexity.S
    log_2m_term = 2.0 * L * (S + 1) * math.log(2.0 * M)
    gap1 = c1["C6"] - math.log(inputs.eta) - log_2m_term
    gap2 = c1["C6"] - math.log(inputs.eta / inputs.C3) - log_2m_term
    if not np.isfinite(c1["C6"]):
        gap1 = gap2 = float("inf")
    alpha, mu = inputs.alpha, inputs.mu
    return {
        "thm1_eq14": max(1.0, _power_threshold(c1["C4"] / (2.0 * M ** 2), gap1, alpha * (mu + 2.0) / (alpha - 2.0))),
        "thm1_root_exists": _power_threshold(c1["C4"] / (4.0 * M ** 2), gap1, mu + 2.0),
        "thm1_n0": float(n0_witness(inputs, c1["C4"])),
        "thm2_eq17": _power_threshold(c5 / (2.0 * M ** 2), gap2, alpha / (alpha - 2.0)),
        "thm2_root_exists": _power_threshold(c5 / (8.0 * M ** 2), gap2, 1.0),
    }


def deviation_bound_rhs(inputs: BoundInputs, eps: float, variant: DeviationVariant) -> float:
    """
    Right-hand side of the uniform deviation inequalities, clipped to [0, 1].

    PROP1_1: N exp(-(n^2 eps^2 / 8) / (A_n + B_n^{1/(mu+2)} (n eps / 2)^{(2mu+3)/(mu+2)}))
        with A_n = 2 n M^2 Psi(1,1) L1, B_n = 2 M L2 max(2^{3+mu} / Psi(1,1), 1).
    PROP1_2: C3 N exp(log log n - (n^2 eps^2 / 4) / (A'_n + B'_n (n eps / 2)^nu))
        with A'_n = n C, B'_n = n^{3/4} log n / A'_n.
    MOD2: N exp(-(n^2 eps^2 / 4) / (C1 n + 2 C2^{1/(mu+2)} (n M)^{(2mu+3)/(mu+2)})).
    N is the covering bound at eps. For eps > 2M the probability is 0.

    Raises:
        ValueError: If eps is not positive
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not isinstance(variant, DeviationVariant):
        raise TypeError("variant must be a DeviationVariant")
    M, mu, n = inputs.M, inputs.mu, float(inputs.n)
    if eps > 2.0 * M:
        return 0.0
    kappa = _kappa(mu)
    log_cover = log_covering_bound(inputs.complexity, eps, inputs.G, inputs.C_sigma)
    if variant is DeviationVariant.PROP1_1:
        a_n = 2.0 * n * M ** 2 * inputs.psi11 * inputs.L1
        b_n = 2.0 * M * inputs.L2 * max(2.0 ** (3.0 + mu) / inputs.psi11, 1.0)
        exponent = (n ** 2 * eps ** 2 / 8.0) / (a_n + b_n ** (1.0 / (mu + 2.0)) * (n * eps / 2.0) ** kappa)
        log_rhs = log_cover - exponent
    elif variant is DeviationVariant.PROP1_2:
        if n < 3:
            return 1.0
        a_prime = n * inputs.C
        b_prime = n ** 0.75 * math.log(n) / a_prime
        exponent = (n ** 2 * eps ** 2 / 4.0) / (a_prime + b_prime * (n * eps / 2.0) ** inputs.nu)
        log_rhs = math.log(inputs.C3) + log_cover + math.log(math.log(n)) - exponent
    else:
        c = thm1_constants(inputs)
        exponent = (n ** 2 * eps ** 2 / 4.0) / (c["C1"] * n + 2.0 * c["C2"] ** (1.0 / (mu + 2.0)) * (n * M) ** kappa)
        log_rhs = log_cover - exponent
    if log_rhs >= 0:
        return 1.0
    return math.exp(log_rhs)


@dataclass
class BoundReport:
    """Every constant, root and threshold for one set of inputs"""
    inputs: BoundInputs
    log_covering: float  # evaluated at eps = 2M
    constants: Dict[str, float]
    eps1: EpsilonRoot
    eps1_prime_stmt: float
    eps1_prime_proof: float
    eps2: EpsilonRoot
    eps2_prime: float
    n_thresholds: Dict[str, float]
    feasible: Dict[str, bool]
    thresholds_met: Dict[str, bool]

    @property
    def excess_risk_thm1(self) -> Dict[str, float]:
        """eps1 + eps1' for both published forms of eps1'."""
        e1 = self.eps1.as_float()
        return {"stmt": e1 + self.eps1_prime_stmt, "proof": e1 + self.eps1_prime_proof}

    @property
    def excess_risk_thm2(self) -> float:
        return self.eps2.as_float() + self.eps2_prime

    def rows(self):
        rows = [("n", float(self.inputs.n)), ("log_covering", self.log_covering)]
        rows += [(name, value) for name, value in self.constants.items()]
        rows += [
            ("eps1", self.eps1.as_float()),
            ("eps1_residual", self.eps1.residual),
            ("eps1_rate_bound", self.eps1.rate_bound),
            ("eps1_prime_stmt", self.eps1_prime_stmt),
            ("eps1_prime_proof", self.eps1_prime_proof),
            ("excess_thm1_stmt", self.excess_risk_thm1["stmt"]),
            ("excess_thm1_proof", self.excess_risk_thm1["proof"]),
            ("eps2", self.eps2.as_float()),
            ("eps2_residual", self.eps2.residual),
            ("eps2_rate_bound", self.eps2.rate_bound),
            ("eps2_prime", self.eps2_prime),
            ("excess_thm2", self.excess_risk_thm2),
        ]
        rows += [(name, value) for name, value in self.n_thresholds.items()]
        rows += [(f"feasible_{k}", float(v)) for k, v in self.feasible.items()]
        rows += [(f"threshold_met_{k}", float(v)) for k, v in self.thresholds_met.items()]
        rows += [("rate_ok_thm1", float(bool(self.eps1.rate_ok))), ("rate_ok_thm2", float(bool(self.eps2.rate_ok)))]
        return rows

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows(), columns=["name", "value"])

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)

    def pretty(self) -> str:
        rows = self.rows()
        width = max(len(name) for name, _ in rows)
        lines = [f"{name.ljust(width)}  {value:.10g}" for name, value in rows]
        for label, root in (("eps1", self.eps1), ("eps2", self.eps2)):
            if not root.feasible:
                lines.append(f"{label} infeasible: {root.reason}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        def clean(value):
            if isinstance(value, float) and not math.isfinite(value):
                return None
            return value
        out = {name: clean(float(value)) for name, value in self.rows()}
        out["eps1_reason"] = self.eps1.reason
        out["eps2_reason"] = self.eps2.reason
        return out


def evaluate_bounds(inputs: BoundInputs) -> BoundReport:
    """Assemble a BoundReport; degenerate complexity is reported as infeasible."""
    constants = thm1_constants(inputs)
    try:
        log_cover = log_covering_bound(inputs.complexity, 2.0 * inputs.M, inputs.G, inputs.C_sigma)
    except DegenerateComplexityError as exc:
        logger.warning(f"Degenerate complexity: {exc}")
        log_cover = float("nan")
    thm2 = thm2_constants_and_eps2(inputs)
    constants.update({k: thm2[k] for k in ("C5", "Cn2", "Cn2_prime")})
    eps1 = solve_eps1(inputs)
    primes = eps1_prime(inputs)
    thresholds = n_thresholds(inputs)
    n = inputs.n
    met = {
        "thm1": n >= max(thresholds["thm1_n0"], thresholds["thm1_eq14"]),
        "thm2": n > thresholds["thm2_eq17"],
    }
    return BoundReport(
        inputs=inputs,
        log_covering=log_cover,
        constants=constants,
        eps1=eps1,
        eps1_prime_stmt=primes["stmt_form"],
        eps1_prime_proof=primes["proof_form"],
        eps2=thm2["eps2"],
        eps2_prime=thm2["eps2_prime"],
        n_thresholds=thresholds,
        feasible={"thm1": eps1.feasible, "thm2": thm2["eps2"].feasible},
        thresholds_met=met,
    )


def bound_inputs_from_mapping(values) -> BoundInputs:
    """Build BoundInputs from a flat mapping (CLI flags, config files or JSON)."""
    def number(key, default, cast=float):
        raw = values.get(key)
        if raw is None or raw == "":
            return default
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{key} must be a number, got {raw!r}") from exc

    if values.get("n") in (None, ""):
        raise ValueError("n is required")
    defaults = BoundInputs(n=1)
    complexity = ComplexityBudget(
        L=number("L", 1, int), N=number("N", 1, int), B=number("B", 1.0),
        F=number("F", 1.0), S=number("S", 0, int),
    )
    try:
        psi_kind = PsiKind(str(values.get("psi_kind", "theta")).lower())
    except ValueError as exc:
        raise ValueError(f"psi_kind must be one of {[k.value for k in PsiKind]}") from exc
    variant = values.get("log_n_variant", False)
    if isinstance(variant, str):
        variant = parse_bool(variant, "log_n_variant")
    return BoundInputs(
        n=number("n", None, lambda v: int(float(v))),
        M=number("M", defaults.M), G=number("G", defaults.G), C_sigma=number("C_sigma", defaults.C_sigma),
        L1=number("L1", defaults.L1), L2=number("L2", defaults.L2), mu=number("mu", defaults.mu),
        psi_kind=psi_kind, C=number("C", defaults.C), C3=number("C3", defaults.C3),
        nu=number("nu", defaults.nu), eta=number("eta", defaults.eta), alpha=number("alpha", defaults.alpha),
        complexity=complexity, log_n_variant=bool(variant),
    )
