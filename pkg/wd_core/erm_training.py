"""
ERM Training Module
Hinge and square losses, empirical risks, evaluation reports and the
minibatch Adam training loop with accuracy-patience early stopping.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import pandas as pd

from .config import (
    DEFAULT_LEARNING_RATE, DEFAULT_BATCH_SIZE, DEFAULT_PATIENCE_EPOCHS, DEFAULT_MAX_EPOCHS,
    DEFAULT_ADAM_BETA1, DEFAULT_ADAM_BETA2, DEFAULT_ADAM_EPSILON, DEFAULT_LOSS, CSV_LINE_TERMINATOR
)
from .neuralnet import Architecture, NetworkParams, forward_batch, forward_trace, init_params
from .process_sim import SupervisedSample

logger = logging.getLogger(__name__)

LOSSES = ("hinge", "square")


class TrainingDivergenceError(RuntimeError):
    """Raised when the training risk stops being finite"""


@dataclass(frozen=True)
class TrainConfig:
    """Adam and early-stopping settings"""
    learning_rate: float = DEFAULT_LEARNING_RATE
    batch_size: int = DEFAULT_BATCH_SIZE
    patience_epochs: int = DEFAULT_PATIENCE_EPOCHS
    max_epochs: int = DEFAULT_MAX_EPOCHS
    seed: int = 0
    adam_beta1: float = DEFAULT_ADAM_BETA1
    adam_beta2: float = DEFAULT_ADAM_BETA2
    adam_epsilon: float = DEFAULT_ADAM_EPSILON
    loss: str = DEFAULT_LOSS

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ValueError("learning_rate must be non-negative")
        if not 0 < self.adam_beta1 < 1 or not 0 < self.adam_beta2 < 1:
            raise ValueError("adam_beta1 and adam_beta2 must lie in (0, 1)")
        if not self.adam_epsilon > 0:
            raise ValueError("adam_epsilon must be positive")
        for name in ("batch_size", "patience_epochs", "max_epochs"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")

    def with_seed(self, seed: int) -> "TrainConfig":
        return TrainConfig(self.learning_rate, self.batch_size, self.patience_epochs, self.max_epochs, seed,
                           self.adam_beta1, self.adam_beta2, self.adam_epsilon, self.loss)


def hinge(u):
    """phi(u) = max(1 - u, 0)."""
    return np.maximum(1.0 - np.asarray(u, dtype=float), 0.0)


def hinge_subgradient(u):
    """-1 where u < 1, 0 where u >= 1."""
    return np.where(np.asarray(u, dtype=float) < 1.0, -1.0, 0.0)


def square_loss(u, y):
    return np.square(np.asarray(u, dtype=float) - np.asarray(y, dtype=float))


def _check_sample(sample: SupervisedSample) -> None:
    if len(sample) == 0:
        raise ValueError("sample must be non-empty")


def _risk(outputs: np.ndarray, y: np.ndarray, loss: str) -> float:
    if loss == "square":
        return float(np.mean(square_loss(outputs, y)))
    return float(np.mean(hinge(y * outputs)))


def empirical_surrogate_risk(arch: Architecture, params: NetworkParams, sample: SupervisedSample) -> float:
    """(1/n) sum phi(Y_i h(X_i)) with the hinge loss."""
    _check_sample(sample)
    return _risk(forward_batch(arch, params, sample.X), sample.y, "hinge")


@dataclass
class EvalReport:
    """Risks, accuracy and confusion matrix (rows actual -1/+1, columns predicted -1/+1)"""
    hinge_risk: float
    zero_one_risk: float
    accuracy: float
    confusion: np.ndarray

    @property
    def n(self) -> int:
        return int(self.confusion.sum())

    @property
    def recall_plus(self) -> float:
        positives = self.confusion[1].sum()
        return float(self.confusion[1, 1] / positives) if positives else float("nan")

    def to_frame(self) -> pd.DataFrame:
        c = self.confusion
        rows = [
            ("hinge_risk", self.hinge_risk),
            ("zero_one_risk", self.zero_one_risk),
            ("accuracy", self.accuracy),
            ("recall_plus", self.recall_plus),
            ("n", self.n),
            ("confusion_neg_neg", int(c[0, 0])),
            ("confusion_neg_pos", int(c[0, 1])),
            ("confusion_pos_neg", int(c[1, 0])),
            ("confusion_pos_pos", int(c[1, 1])),
        ]
        return pd.DataFrame(rows, columns=["name", "value"])

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)

    def pretty(self) -> str:
        c = self.confusion
        return "\n".join([
            f"hinge risk     {self.hinge_risk:.6f}",
            f"0-1 risk       {self.zero_one_risk:.6f}",
            f"accuracy       {self.accuracy:.6f}",
            f"recall (+1)    {self.recall_plus:.6f}",
            "confusion      pred -1  pred +1",
            f"  actual -1    {c[0, 0]:7d}  {c[0, 1]:7d}",
            f"  actual +1    {c[1, 0]:7d}  {c[1, 1]:7d}",
        ])


def report_from_outputs(y: np.ndarray, outputs: np.ndarray) -> EvalReport:
    """Build an EvalReport from +-1 labels and real-valued predictor outputs."""
    y = np.asarray(y, dtype=float)
    outputs = np.asarray(outputs, dtype=float)
    if y.size == 0:
        raise ValueError("sample must be non-empty")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    predicted = np.where(outputs >= 0, 1.0, -1.0)
    confusion = np.zeros((2, 2), dtype=np.int64)
    for i, actual in enumerate((-1.0, 1.0)):
        for j, pred in enumerate((-1.0, 1.0)):
            confusion[i, j] = int(np.count_nonzero((y == actual) & (predicted == pred)))
    zero_one = float(np.mean(predicted != y))
    return EvalReport(_risk(outputs, y, "hinge"), zero_one, 1.0 - zero_one, confusion)


def empirical_01_risk(arch: Architecture, params: NetworkParams, sample: SupervisedSample) -> EvalReport:
    """
    Evaluate sign(h) on a sample.

    Returns:
        EvalReport: hinge and 0-1 risks, accuracy and confusion matrix

    Raises:
        ValueError: If the sample is empty or labels are not +-1
    """
    _check_sample(sample)
    return report_from_outputs(sample.y, forward_batch(arch, params, sample.X))


def backprop_gradient(arch: Architecture, params: NetworkParams, X: np.ndarray, y: np.ndarray,
                      loss: str = "hinge") -> NetworkParams:
    """
    Gradient of the minibatch mean loss with respect to every weight and bias.

    Uses the hinge subgradient convention phi'(1) = 0 and ReLU'(0) = 0.

    Returns:
        NetworkParams: gradients shaped like ``params``
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("minibatch must be non-empty")
    pre, act = forward_trace(arch, params, X)
    if act[0].shape[0] != y.size:
        raise ValueError("X and y must have the same number of rows")
    out = act[-1][:, 0]
    if loss == "square":
        d_out = 2.0 * (out - y) / y.size
    else:
        d_out = y * hinge_subgradient(y * out) / y.size
    delta = d_out[:, None] * arch.output_activation.derivative(pre[-1])
    n_layers = len(params.weights)
    grad_w: List[np.ndarray] = [None] * n_layers
    grad_b: List[np.ndarray] = [None] * n_layers
    for j in range(n_layers - 1, -1, -1):
        grad_w[j] = delta.T @ act[j]
        grad_b[j] = delta.sum(axis=0)
        if j > 0:
            delta = (delta @ params.weights[j]) * arch.hidden_activation.derivative(pre[j - 1])
    return NetworkParams(grad_w, grad_b)


class Adam:
    """Adam optimizer updating NetworkParams in place"""

    def __init__(self, params: NetworkParams, learning_rate=DEFAULT_LEARNING_RATE, beta1=DEFAULT_ADAM_BETA1,
                 beta2=DEFAULT_ADAM_BETA2, epsilon=DEFAULT_ADAM_EPSILON):
        self.params = params
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        arrays = params.weights + params.biases
        self.m = [np.zeros_like(a) for a in arrays]
        self.v = [np.zeros_like(a) for a in arrays]

    def step(self, grads: NetworkParams) -> None:
        self.t += 1
        lr_t = self.learning_rate * np.sqrt(1.0 - self.beta2 ** self.t) / (1.0 - self.beta1 ** self.t)
        targets = self.params.weights + self.params.biases
        for k, (p, g) in enumerate(zip(targets, grads.weights + grads.biases)):
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g
            p -= lr_t * self.m[k] / (np.sqrt(self.v[k]) + self.epsilon)


@dataclass
class TrainingLog:
    """Per-epoch training risk and accuracy; epoch 0 is the initialisation"""
    epochs: List[int] = field(default_factory=list)
    surrogate_risk: List[float] = field(default_factory=list)
    accuracy: List[float] = field(default_factory=list)
    best_epoch: int = 0
    stopped_epoch: int = 0

    def record(self, epoch: int, risk: float, accuracy: float) -> None:
        self.epochs.append(epoch)
        self.surrogate_risk.append(risk)
        self.accuracy.append(accuracy)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"epoch": self.epochs, "surrogate_risk": self.surrogate_risk, "accuracy": self.accuracy})

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, lineterminator=CSV_LINE_TERMINATOR)


def _epoch_state(arch, params, sample, loss) -> Tuple[float, float]:
    outputs = forward_batch(arch, params, sample.X)
    risk = _risk(outputs, sample.y, loss)
    if loss == "square":
        return risk, float("nan")
    return risk, float(np.mean(np.where(outputs >= 0, 1.0, -1.0) == sample.y))


def train_erm(sample: SupervisedSample, arch: Architecture, config: TrainConfig = TrainConfig(),
              initial: NetworkParams = None) -> Tuple[NetworkParams, TrainingLog]:
    """
    Empirical risk minimization with minibatch Adam.

    Each epoch reshuffles the sample with the run seed and keeps the last
    short minibatch. Training stops once the monitored score (training
    accuracy, or training risk for the square loss) has not strictly improved
    for ``patience_epochs`` epochs, or at ``max_epochs``.

    The returned parameters come from the epoch with the highest training
    accuracy among epochs whose risk does not exceed the initial risk; ties go
    to the lower risk, then to the earlier epoch. With the square loss the
    lowest-risk epoch is returned.

    Args:
        sample: Training pairs
        arch: Network architecture
        config: Optimizer and stopping settings
        initial: Starting parameters (Glorot initialisation from config.seed when omitted)

    Returns:
        tuple: (best parameters, training log)

    Raises:
        TrainingDivergenceError: If the training risk becomes non-finite
    """
    _check_sample(sample)
    if sample.dim != arch.input_dim:
        raise ValueError(f"sample dimension {sample.dim} does not match architecture input {arch.input_dim}")
    params = init_params(arch, config.seed) if initial is None else initial.copy()
    params.validate(arch)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([config.seed, 1])))
    optimizer = Adam(params, config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon)
    square = config.loss == "square"

    log = TrainingLog()
    risk0, acc0 = _epoch_state(arch, params, sample, config.loss)
    if not np.isfinite(risk0):
        raise TrainingDivergenceError("initial training risk is not finite")
    log.record(0, risk0, acc0)
    best_params = params.copy()
    best_key = (-risk0,) if square else (acc0, -risk0)
    monitored = -risk0 if square else acc0
    stale = 0
    m = len(sample)
    epoch = 0

    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(m)
        for start in range(0, m, config.batch_size):
            idx = order[start:start + config.batch_size]
            grads = backprop_gradient(arch, params, sample.X[idx], sample.y[idx], config.loss)
            optimizer.step(grads)
        risk, acc = _epoch_state(arch, params, sample, config.loss)
        if not np.isfinite(risk):
            raise TrainingDivergenceError(f"training risk became {risk} at epoch {epoch}")
        log.record(epoch, risk, acc)
        logger.debug(f"epoch {epoch}: risk={risk:.6f} accuracy={acc:.6f}")

        key = (-risk,) if square else (acc, -risk)
        if key > best_key and risk <= risk0:
            best_key = key
            best_params = params.copy()
            log.best_epoch = epoch

        score = -risk if square else acc
        if score > monitored:
            monitored = score
            stale = 0
        else:
            stale += 1
            if stale >= config.patience_epochs:
                break

    log.stopped_epoch = epoch
    logger.info(f"Training stopped at epoch {epoch}, best epoch {log.best_epoch}, "
                f"risk {log.surrogate_risk[log.best_epoch]:.6f}")
    return best_params, log
