"""From-scratch feed-forward binary classifier.

ReLU hidden layers, inverted dropout, sigmoid output, binary cross-entropy,
minibatch Adam (or plain SGD), and validation-loss early stopping. Pure
numpy; single-threaded per model for determinism.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, TrainingDivergedError

LOGIT_CLAMP = 30.0


@dataclass
class MlpModel:
    layer_dims: list
    weights: list
    biases: list
    dropout_rates: list

    def clone(self) -> "MlpModel":
        return MlpModel(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            dropout_rates=list(self.dropout_rates),
        )


@dataclass
class TrainConfig:
    """Training hyperparameters; defaults follow the experimental protocol."""

    minibatch_size: int = 25
    learning_rate: float = 0.00002
    max_epochs: int = 300
    patience: int = 10
    dropout_rates: tuple = (0.4, 0.4)
    seed: int = 0
    optimizer: str = "adam"  # "adam" or "sgd"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.minibatch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise InvalidArgumentError("minibatch size, epochs, patience must be positive")
        if self.patience > self.max_epochs:
            raise InvalidArgumentError("patience must not exceed max_epochs")
        if self.learning_rate <= 0:
            raise InvalidArgumentError("learning rate must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise InvalidArgumentError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class TrainHistory:
    train_losses: list = field(default_factory=list)
    valid_losses: list = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0


def init_mlp(layer_dims, seed: int, dropout_rates=None) -> MlpModel:
    """Glorot-uniform weights, zero biases; deterministic per seed."""
    layer_dims = [int(d) for d in layer_dims]
    if len(layer_dims) < 3:
        raise InvalidArgumentError("need at least one hidden layer")
    if layer_dims[-1] != 1:
        raise InvalidArgumentError("output dimension must be 1")
    if any(d < 1 for d in layer_dims):
        raise InvalidArgumentError("layer dims must be positive")
    n_hidden = len(layer_dims) - 2
    if dropout_rates is None:
        dropout_rates = [0.0] * n_hidden
    dropout_rates = [float(p) for p in dropout_rates]
    if len(dropout_rates) != n_hidden:
        raise InvalidArgumentError("one dropout rate per hidden layer")
    if any(not (0.0 <= p < 1.0) for p in dropout_rates):
        raise InvalidArgumentError("dropout rates must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_dims, weights, biases, dropout_rates)


def _forward_pass(model: MlpModel, x: np.ndarray, dropout_rng=None):
    """Returns (logits, cache) where cache holds activations and masks."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.layer_dims[0]:
        raise InvalidArgumentError(
            f"input has shape {x.shape}, expected (*, {model.layer_dims[0]})"
        )
    activations = [x]
    masks = []
    h = x
    n_layers = len(model.weights)
    for l in range(n_layers - 1):
        z = h @ model.weights[l] + model.biases[l]
        h = np.maximum(z, 0.0)
        rate = model.dropout_rates[l]
        if dropout_rng is not None and rate > 0.0:
            mask = (dropout_rng.random(h.shape) >= rate) / (1.0 - rate)
            h = h * mask
        else:
            mask = None
        masks.append(mask)
        activations.append(h)
    logits = (h @ model.weights[-1] + model.biases[-1]).ravel()
    logits = np.clip(logits, -LOGIT_CLAMP, LOGIT_CLAMP)
    return logits, (activations, masks)


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def forward(model: MlpModel, x, train_mode: bool = False, seed: int = 0) -> np.ndarray:
    """Predicted probabilities; dropout is active only in train_mode."""
    rng = np.random.default_rng(seed) if train_mode else None
    logits, _ = _forward_pass(model, x, dropout_rng=rng)
    return _sigmoid(logits)


def predict(model: MlpModel, x) -> np.ndarray:
    """Evaluation-mode scores in (0, 1)."""
    return forward(model, x, train_mode=False)


def bce_loss(logits: np.ndarray, y: np.ndarray) -> float:
    # Numerically stable BCE from logits.
    return float(np.mean(np.maximum(logits, 0) - logits * y + np.log1p(np.exp(-np.abs(logits)))))


def loss_and_grads(model: MlpModel, x, y, dropout_rng=None):
    """Mean BCE loss and its gradients w.r.t. every weight and bias."""
    y = np.asarray(y, dtype=np.float64).ravel()
    logits, (activations, masks) = _forward_pass(model, x, dropout_rng=dropout_rng)
    n = y.size
    loss = bce_loss(logits, y)
    delta = ((_sigmoid(logits) - y) / n)[:, None]
    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    for l in range(len(model.weights) - 1, -1, -1):
        grad_w[l] = activations[l].T @ delta
        grad_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = delta @ model.weights[l].T
            if masks[l - 1] is not None:
                delta = delta * masks[l - 1]
            delta = delta * (activations[l] > 0)
    return loss, grad_w, grad_b


class AdamState:
    """First/second moment accumulators plus the step counter."""

    def __init__(self, model: MlpModel):
        self.m_w = [np.zeros_like(w) for w in model.weights]
        self.v_w = [np.zeros_like(w) for w in model.weights]
        self.m_b = [np.zeros_like(b) for b in model.biases]
        self.v_b = [np.zeros_like(b) for b in model.biases]
        self.t = 0


def _apply_update(model, grad_w, grad_b, config: TrainConfig, adam: AdamState | None):
    if config.optimizer == "sgd":
        for l in range(len(model.weights)):
            model.weights[l] -= config.learning_rate * grad_w[l]
            model.biases[l] -= config.learning_rate * grad_b[l]
        return
    adam.t += 1
    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_eps
    c1 = 1.0 - b1 ** adam.t
    c2 = 1.0 - b2 ** adam.t
    for l in range(len(model.weights)):
        for p, g, m, v in (
            (model.weights[l], grad_w[l], adam.m_w[l], adam.v_w[l]),
            (model.biases[l], grad_b[l], adam.m_b[l], adam.v_b[l]),
        ):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= config.learning_rate * (m / c1) / (np.sqrt(v / c2) + eps)


def run_epoch(model, x, y, config: TrainConfig, rng, adam: AdamState | None) -> float:
    """One pass of minibatch updates in place; returns mean minibatch loss."""
    n = x.shape[0]
    # A single full batch needs no shuffle; keeping the natural row order
    # makes the update bitwise-equal to a plain gradient step.
    perm = np.arange(n) if config.minibatch_size >= n else rng.permutation(n)
    total = 0.0
    n_batches = 0
    use_dropout = any(r > 0 for r in model.dropout_rates)
    for start in range(0, n, config.minibatch_size):
        idx = perm[start : start + config.minibatch_size]
        loss, gw, gb = loss_and_grads(
            model, x[idx], y[idx], dropout_rng=rng if use_dropout else None
        )
        if not np.isfinite(loss):
            raise TrainingDivergedError(f"non-finite training loss {loss}")
        _apply_update(model, gw, gb, config, adam)
        total += loss
        n_batches += 1
    return total / n_batches


def eval_loss(model: MlpModel, x, y) -> float:
    y = np.asarray(y, dtype=np.float64).ravel()
    logits, _ = _forward_pass(model, x)
    return bce_loss(logits, y)


def train(model: MlpModel, train_xy, valid_xy, config: TrainConfig):
    """Minibatch training with best-validation-epoch snapshotting.

    Stops once validation loss has not strictly improved for `patience`
    consecutive epochs, or at max_epochs. Returns (best_model, history).
    """
    x, y = train_xy
    xv, yv = valid_xy
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    xv = np.asarray(xv, dtype=np.float64)
    yv = np.asarray(yv, dtype=np.float64).ravel()
    if x.shape[0] != y.size or x.shape[0] == 0:
        raise InvalidArgumentError("training set empty or misaligned")
    if xv.shape[0] != yv.size or xv.shape[0] == 0:
        raise InvalidArgumentError("validation set empty or misaligned")

    model = model.clone()
    rng = np.random.default_rng(config.seed)
    adam = AdamState(model) if config.optimizer == "adam" else None
    history = TrainHistory()
    best = model.clone()
    best_loss = np.inf
    since_improve = 0
    for epoch in range(1, config.max_epochs + 1):
        train_loss = run_epoch(model, x, y, config, rng, adam)
        val_loss = eval_loss(model, xv, yv)
        if not np.isfinite(val_loss):
            raise TrainingDivergedError(f"non-finite validation loss {val_loss}")
        history.train_losses.append(train_loss)
        history.valid_losses.append(val_loss)
        history.stopped_epoch = epoch
        if val_loss < best_loss:
            best_loss = val_loss
            best = model.clone()
            history.best_epoch = epoch
            since_improve = 0
        else:
            since_improve += 1
            if since_improve >= config.patience:
                break
    return best, history


def save_checkpoint(model: MlpModel, path) -> None:
    """Versioned text checkpoint; 17-significant-digit values round-trip exactly."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("#dcsim-mlp v1\n")
        fh.write("dims " + " ".join(str(d) for d in model.layer_dims) + "\n")
        fh.write("dropout " + " ".join(f"{p:.17g}" for p in model.dropout_rates) + "\n")
        for l, (w, b) in enumerate(zip(model.weights, model.biases)):
            fh.write(f"weight {l}\n")
            for row in w:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
            fh.write(f"bias {l}\n")
            fh.write(" ".join(f"{v:.17g}" for v in b) + "\n")


def load_checkpoint(path) -> MlpModel:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "#dcsim-mlp v1":
        raise InvalidArgumentError("not a v1 model checkpoint")
    dims = [int(t) for t in lines[1].split()[1:]]
    dropout = [float(t) for t in lines[2].split()[1:]]
    weights, biases = [], []
    i = 3
    for l in range(len(dims) - 1):
        assert lines[i] == f"weight {l}", f"unexpected section at line {i + 1}"
        i += 1
        w = np.array(
            [[float(v) for v in lines[i + r].split()] for r in range(dims[l])]
        )
        i += dims[l]
        assert lines[i] == f"bias {l}", f"unexpected section at line {i + 1}"
        i += 1
        b = np.array([float(v) for v in lines[i].split()])
        i += 1
        weights.append(w.reshape(dims[l], dims[l + 1]))
        biases.append(b)
    return MlpModel(dims, weights, biases, dropout)
