"""
Neural Network Module
Feedforward networks of the sparsity-constrained family H(L, N, B, F, S):
architecture, parameters, forward pass, parameter flattening, membership
checks and Lipschitz constants.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np
import pandas as pd

from .config import (
    DEFAULT_HIDDEN_LAYERS, DEFAULT_HIDDEN_WIDTH, DEFAULT_HIDDEN_ACTIVATION, DEFAULT_OUTPUT_ACTIVATION,
    SPARSITY_THRESHOLD, CSV_LINE_TERMINATOR
)

logger = logging.getLogger(__name__)


class Activation(Enum):
    """Hidden-layer activations"""
    RELU = "relu"
    SIGMOID = "sigmoid"
    TANH = "tanh"

    @property
    def lipschitz(self) -> float:
        return 0.25 if self is Activation.SIGMOID else 1.0

    def apply(self, z: np.ndarray) -> np.ndarray:
        if self is Activation.RELU:
            return np.maximum(z, 0.0)
        if self is Activation.TANH:
            return np.tanh(z)
        return 0.5 * (1.0 + np.tanh(0.5 * z))

    def derivative(self, z: np.ndarray) -> np.ndarray:
        """Derivative at the pre-activation z (ReLU'(0) = 0)."""
        if self is Activation.RELU:
            return (z > 0).astype(float)
        if self is Activation.TANH:
            return 1.0 - np.tanh(z) ** 2
        s = 0.5 * (1.0 + np.tanh(0.5 * z))
        return s * (1.0 - s)


class OutputActivation(Enum):
    IDENTITY = "identity"
    TANH = "tanh"

    def apply(self, z: np.ndarray) -> np.ndarray:
        return np.tanh(z) if self is OutputActivation.TANH else z

    def derivative(self, z: np.ndarray) -> np.ndarray:
        return 1.0 - np.tanh(z) ** 2 if self is OutputActivation.TANH else np.ones_like(z)


@dataclass(frozen=True)
class Architecture:
    """Network shape (L, p) with p = (p_0, ..., p_{L+1}) and p_{L+1} = 1"""
    widths: Tuple[int, ...]
    hidden_activation: Activation = Activation(DEFAULT_HIDDEN_ACTIVATION)
    output_activation: OutputActivation = OutputActivation(DEFAULT_OUTPUT_ACTIVATION)

    def __post_init__(self):
        widths = tuple(int(w) for w in self.widths)
        object.__setattr__(self, "widths", widths)
        if len(widths) < 2:
            raise ValueError("widths must contain at least the input and output sizes")
        if any(w < 1 for w in widths):
            raise ValueError("all widths must be positive integers")
        if widths[-1] != 1:
            raise ValueError("output width p_{L+1} must be 1")
        if not isinstance(self.hidden_activation, Activation):
            raise TypeError("hidden_activation must be an Activation")
        if not isinstance(self.output_activation, OutputActivation):
            raise TypeError("output_activation must be an OutputActivation")

    @classmethod
    def feedforward(cls, input_dim: int, hidden_layers: int = DEFAULT_HIDDEN_LAYERS,
                    hidden_width: int = DEFAULT_HIDDEN_WIDTH,
                    hidden_activation="relu", output_activation="tanh") -> "Architecture":
        """Equal-width architecture, e.g. the 2 x 16 classifier."""
        if hidden_layers < 0:
            raise ValueError("hidden_layers must be non-negative")
        widths = (input_dim,) + (hidden_width,) * hidden_layers + (1,)
        return cls(widths, Activation(hidden_activation), OutputActivation(output_activation))

    @property
    def depth(self) -> int:
        return len(self.widths) - 2

    @property
    def input_dim(self) -> int:
        return self.widths[0]

    @property
    def width(self) -> int:
        """max_{1<=j<=L} p_j (0 without hidden layers)."""
        return max(self.widths[1:-1], default=0)

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        return [(self.widths[j], self.widths[j - 1]) for j in range(1, len(self.widths))]

    @property
    def n_parameters(self) -> int:
        return sum(r * c + r for r, c in self.layer_shapes)


@dataclass(frozen=True)
class ComplexityBudget:
    """Depth L, width N, parameter sup-norm B, output sup-norm F and sparsity S"""
    L: int
    N: int
    B: float
    F: float = 1.0
    S: int = 0

    def __post_init__(self):
        for name in ("L", "N", "B", "F", "S"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass
class NetworkParams:
    """Weights W_j (p_j x p_{j-1}) and biases b_j (p_j) for j = 1..L+1"""
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases):
            raise ValueError("weights and biases must have one entry per layer")
        self.weights = [np.array(w, dtype=float, ndmin=2) for w in self.weights]
        self.biases = [np.array(b, dtype=float).reshape(-1) for b in self.biases]

    def copy(self) -> "NetworkParams":
        return NetworkParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.weights + self.biases)

    def validate(self, arch: Architecture) -> None:
        """
        Raises:
            ValueError: If shapes disagree with ``arch`` or an entry is not finite
        """
        if len(self.weights) != arch.depth + 1:
            raise ValueError(f"expected {arch.depth + 1} layers, got {len(self.weights)}")
        for j, (shape, w, b) in enumerate(zip(arch.layer_shapes, self.weights, self.biases), start=1):
            if w.shape != shape:
                raise ValueError(f"W_{j} must have shape {shape}, got {w.shape}")
            if b.shape != (shape[0],):
                raise ValueError(f"b_{j} must have length {shape[0]}, got {b.shape[0]}")
        if not self.is_finite():
            raise ValueError("parameters must be finite")


def zero_params(arch: Architecture) -> NetworkParams:
    return NetworkParams([np.zeros(s) for s in arch.layer_shapes], [np.zeros(s[0]) for s in arch.layer_shapes])


def init_params(arch: Architecture, seed: int) -> NetworkParams:
    """
    Glorot-uniform weights on [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))], zero biases.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []
    for rows, cols in arch.layer_shapes:
        limit = np.sqrt(6.0 / (rows + cols))
        weights.append(rng.uniform(-limit, limit, size=(rows, cols)))
        biases.append(np.zeros(rows))
    return NetworkParams(weights, biases)


def forward_trace(arch: Architecture, params: NetworkParams, X: np.ndarray):
    """
    Forward pass keeping every layer's pre-activation and output.

    Returns:
        tuple: (pre_activations, activations) where activations[0] is X and
        activations[-1] is the network output with shape (m, 1)
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != arch.input_dim:
        raise ValueError(f"input dimension must be {arch.input_dim}, got {X.shape[1]}")
    pre, act = [], [X]
    a = X
    last = len(params.weights) - 1
    for j, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w.T + b
        a = arch.output_activation.apply(z) if j == last else arch.hidden_activation.apply(z)
        pre.append(z)
        act.append(a)
    return pre, act


def forward_batch(arch: Architecture, params: NetworkParams, X: np.ndarray) -> np.ndarray:
    """h(x) for every row of X."""
    _, act = forward_trace(arch, params, X)
    return act[-1][:, 0]


def forward(arch: Architecture, params: NetworkParams, x) -> float:
    """
    Evaluate h(x) = A_{L+1} o sigma o A_L o ... o sigma o A_1 (x).

    Args:
        arch: Network architecture
        params: Weights and biases matching ``arch``
        x: Input vector of length p_0

    Returns:
        float: Network output (in [-1, 1] for a Tanh output)

    Raises:
        ValueError: If x has the wrong length
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != arch.input_dim:
        raise ValueError(f"x must be a vector of length {arch.input_dim}")
    return float(forward_batch(arch, params, x[None, :])[0])


def predict_sign(arch: Architecture, params: NetworkParams, X: np.ndarray) -> np.ndarray:
    """Class predictions sign(h(x)) with sign(0) = +1."""
    return np.where(forward_batch(arch, params, X) >= 0, 1, -1)


def flatten_theta(params: NetworkParams) -> np.ndarray:
    """theta(h) = (vec(W_1), b_1, ..., vec(W_{L+1}), b_{L+1}) with column-major vec."""
    parts = []
    for w, b in zip(params.weights, params.biases):
        parts.append(w.ravel(order="F"))
        parts.append(b)
    return np.concatenate(parts)


def unflatten_theta(arch: Architecture, theta: np.ndarray) -> NetworkParams:
    """Inverse of ``flatten_theta`` for the shapes of ``arch``."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (arch.n_parameters,):
        raise ValueError(f"theta must have length {arch.n_parameters}, got {theta.size}")
    weights, biases = [], []
    offset = 0
    for rows, cols in arch.layer_shapes:
        weights.append(theta[offset:offset + rows * cols].reshape((rows, cols), order="F"))
        offset += rows * cols
        biases.append(theta[offset:offset + rows].copy())
        offset += rows
    return NetworkParams(weights, biases)


def sparsity(params: NetworkParams, threshold: float = SPARSITY_THRESHOLD) -> int:
    """Number of entries of theta(h) with |value| > threshold (threshold 0 is the exact l0 count)."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return int(np.count_nonzero(np.abs(flatten_theta(params)) > threshold))


@dataclass
class MembershipReport:
    depth_ok: bool
    width_ok: bool
    theta_norm_ok: bool
    sup_norm_ok: bool
    sparsity_ok: bool
    sup_norm_certified: bool
    empirical_sup_norm: float
    theta_sup_norm: float
    nonzero_count: int

    @property
    def all_ok(self) -> bool:
        return self.depth_ok and self.width_ok and self.theta_norm_ok and self.sup_norm_ok and self.sparsity_ok


def check_membership(arch: Architecture, params: NetworkParams, budget: ComplexityBudget,
                     probe_inputs: np.ndarray, threshold: float = SPARSITY_THRESHOLD) -> MembershipReport:
    """
    Check each constraint of H(L, N, B, F, S) independently.

    The sup-norm flag is certified when the output is Tanh and F >= 1; otherwise
    it is estimated on ``probe_inputs``.
    """
    probe_inputs = np.atleast_2d(np.asarray(probe_inputs, dtype=float))
    if probe_inputs.shape[0] == 0:
        raise ValueError("probe_inputs must be non-empty")
    theta = flatten_theta(params)
    theta_norm = float(np.max(np.abs(theta))) if theta.size else 0.0
    outputs = forward_batch(arch, params, probe_inputs)
    empirical_sup = float(np.max(np.abs(outputs)))
    certified = arch.output_activation is OutputActivation.TANH and budget.F >= 1
    nonzero = sparsity(params, threshold)
    return MembershipReport(
        depth_ok=arch.depth <= budget.L,
        width_ok=arch.width <= budget.N,
        theta_norm_ok=theta_norm <= budget.B,
        sup_norm_ok=True if certified else empirical_sup <= budget.F,
        sparsity_ok=nonzero <= budget.S,
        sup_norm_certified=certified,
        empirical_sup_norm=empirical_sup,
        theta_sup_norm=theta_norm,
        nonzero_count=nonzero,
    )


def lipschitz_bound(arch: Architecture, budget: ComplexityBudget, strict: bool = False) -> float:
    """
    Lipschitz constant of networks in the class.

    The default is C_sigma^L B^{L+1} with L and B taken from the budget. With
    ``strict=True`` the constant is C_sigma^L B^{L+1} prod_{j=1..L} p_j, which
    bounds |h(x) - h(x')| / ||x - x'||_1 for any parameters with
    ||theta||_inf <= B, using the l_inf norm between hidden layers.
    """
    c_sigma = arch.hidden_activation.lipschitz
    if not strict:
        return float(c_sigma ** budget.L * budget.B ** (budget.L + 1))
    depth = arch.depth
    return float(c_sigma ** depth * budget.B ** (depth + 1) * np.prod(arch.widths[1:-1], dtype=float))


def empirical_lipschitz_ratio(arch: Architecture, params: NetworkParams, X1: np.ndarray, X2: np.ndarray) -> float:
    """max |h(x) - h(x')| / ||x - x'||_1 over paired rows."""
    dist = np.sum(np.abs(np.asarray(X1, dtype=float) - np.asarray(X2, dtype=float)), axis=1)
    diff = np.abs(forward_batch(arch, params, X1) - forward_batch(arch, params, X2))
    keep = dist > 0
    if not np.any(keep):
        return 0.0
    return float(np.max(diff[keep] / dist[keep]))


def params_to_frame(params: NetworkParams) -> pd.DataFrame:
    """One row per entry of theta(h), in flattening order."""
    records = []
    for layer, (w, b) in enumerate(zip(params.weights, params.biases), start=1):
        rows, cols = w.shape
        for col in range(cols):
            for row in range(rows):
                records.append((layer, "W", row, col, float(w[row, col])))
        for row in range(rows):
            records.append((layer, "b", row, 0, float(b[row])))
    return pd.DataFrame(records, columns=["layer", "kind", "row", "col", "value"])


def write_params_csv(params: NetworkParams, path) -> None:
    params_to_frame(params).to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)


def read_params_csv(arch: Architecture, path) -> NetworkParams:
    frame = pd.read_csv(path, float_precision="round_trip")
    params = zero_params(arch)
    for layer, kind, row, col, value in frame.itertuples(index=False):
        if kind == "W":
            params.weights[layer - 1][row, col] = value
        elif kind == "b":
            params.biases[layer - 1][row] = value
        else:
            raise ValueError(f"{path}: unknown parameter kind {kind!r}")
    params.validate(arch)
    return params
