"""Federated averaging: round-based client updates and weighted aggregation.

Clients train locally for a fixed number of epochs per round (no local
early stopping); the server averages parameters weighted by client sample
size and early-stops on global validation loss.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError
from .mlp import AdamState, MlpModel, TrainConfig, eval_loss, run_epoch


@dataclass
class FedConfig:
    epochs_per_round: int = 1
    max_rounds: int = 300
    patience: int = 10
    participating_clients: int | str = "all"
    train_config: TrainConfig = field(default_factory=TrainConfig)
    reset_adam_each_round: bool = True

    def __post_init__(self):
        if self.epochs_per_round < 1 or self.max_rounds < 1 or self.patience < 1:
            raise InvalidArgumentError("rounds, epochs, patience must be positive")
        if self.participating_clients != "all" and int(self.participating_clients) < 1:
            raise InvalidArgumentError("participating_clients must be >= 1 or 'all'")


@dataclass
class FedRoundLog:
    round_index: int
    client_sizes: list
    val_loss: float


def client_update(
    global_model: MlpModel,
    local_xy,
    config: FedConfig,
    seed: int,
    adam: AdamState | None = None,
) -> MlpModel:
    """Copy the global model and run epochs_per_round of local minibatch
    updates. A fresh Adam state is used unless one is passed in."""
    x, y = local_xy
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape[0] == 0:
        raise InvalidArgumentError("client has no local data")
    model = global_model.clone()
    tc = config.train_config
    if tc.optimizer == "adam" and adam is None:
        adam = AdamState(model)
    rng = np.random.default_rng(seed)
    for _ in range(config.epochs_per_round):
        run_epoch(model, x, y, tc, rng, adam)
    return model


def aggregate(models, sample_sizes) -> MlpModel:
    """Sample-size-weighted parameter average.

    Per-element contributions are sorted before summation so the result is
    bitwise invariant under joint permutation of (models, sizes).
    """
    if not models:
        raise InvalidArgumentError("no models to aggregate")
    sizes = np.asarray(sample_sizes, dtype=np.float64)
    if sizes.size != len(models) or np.any(sizes <= 0):
        raise InvalidArgumentError("need one positive sample size per model")
    ref = models[0]
    for m in models[1:]:
        if m.layer_dims != ref.layer_dims:
            raise InvalidArgumentError("models have mismatched architectures")

    def identical(getter):
        return all(
            np.array_equal(getter(m, l), getter(ref, l))
            for m in models[1:]
            for l in range(len(ref.weights))
        )

    if len(models) == 1 or (
        identical(lambda m, l: m.weights[l]) and identical(lambda m, l: m.biases[l])
    ):
        return ref.clone()

    w = sizes / sizes.sum()
    out = ref.clone()
    for l in range(len(ref.weights)):
        stacked_w = np.stack([wi * m.weights[l] for wi, m in zip(w, models)])
        stacked_b = np.stack([wi * m.biases[l] for wi, m in zip(w, models)])
        out.weights[l] = np.sort(stacked_w, axis=0).sum(axis=0)
        out.biases[l] = np.sort(stacked_b, axis=0).sum(axis=0)
    return out


def fedavg_train(clients, valid_xy, layer_dims, config: FedConfig, seed: int):
    """Full federated training loop.

    Returns (best_model, round_logs) where best_model is the aggregated
    model from the round with the lowest global validation loss.
    """
    if not clients:
        raise InvalidArgumentError("need at least one client")
    clients = [
        (np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64).ravel())
        for x, y in clients
    ]
    for x, y in clients:
        if x.shape[0] == 0 or x.shape[0] != y.size:
            raise InvalidArgumentError("every client needs non-empty aligned data")
    xv, yv = valid_xy
    xv = np.asarray(xv, dtype=np.float64)
    yv = np.asarray(yv, dtype=np.float64).ravel()
    if xv.shape[0] == 0:
        raise InvalidArgumentError("validation set is empty")

    from .mlp import init_mlp

    n = len(clients)
    tc = config.train_config
    if config.participating_clients == "all":
        d = n
    else:
        d = int(config.participating_clients)
        if d > n:
            raise InvalidArgumentError(f"cannot select {d} of {n} clients")

    global_model = init_mlp(layer_dims, seed, dropout_rates=tc.dropout_rates)
    select_rng = np.random.default_rng(seed + 1)
    persistent_adam = [None] * n
    logs = []
    best_model = global_model.clone()
    best_loss = np.inf
    since_improve = 0

    for t in range(1, config.max_rounds + 1):
        if d == n:
            selected = list(range(n))
        else:
            selected = sorted(select_rng.choice(n, size=d, replace=False).tolist())
        updated = []
        sizes = []
        for k in selected:
            adam = None
            if tc.optimizer == "adam" and not config.reset_adam_each_round:
                if persistent_adam[k] is None:
                    persistent_adam[k] = AdamState(global_model)
                adam = persistent_adam[k]
            local_seed = seed + 100_003 * t + k
            updated.append(client_update(global_model, clients[k], config, local_seed, adam=adam))
            sizes.append(clients[k][0].shape[0])
        global_model = aggregate(updated, sizes)
        val_loss = eval_loss(global_model, xv, yv)
        logs.append(FedRoundLog(round_index=t, client_sizes=sizes, val_loss=val_loss))
        if val_loss < best_loss:
            best_loss = val_loss
            best_model = global_model.clone()
            since_improve = 0
        else:
            since_improve += 1
            if since_improve >= config.patience:
                break
    return best_model, logs


def write_round_logs(logs, path) -> None:
    """CSV export: round, val_loss, then one size column per client."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        n = max((len(l.client_sizes) for l in logs), default=0)
        writer.writerow(["round", "val_loss"] + [f"size_client{i}" for i in range(n)])
        for l in logs:
            writer.writerow([l.round_index, repr(l.val_loss)] + list(l.client_sizes))
