"""Experiment orchestration: method dispatch, seeded repetitions, r-sweeps,
and result emission (JSON/CSV tables plus SVG metric-vs-r curves)."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import datasets as ds
from . import dc, fedavg, metrics, mlp
from .errors import InvalidArgumentError

METHODS = ("centralized", "fedavg", "dc", "dcpd")

# Seed offsets so that ablations perturb only the intended component.
_SPLIT_OFFSET = 11
_DATASET_OFFSET = 23
_PARTITION_OFFSET = 1_000
_ANCHOR_OFFSET = 2_000
_PROJECTION_OFFSET = 3_000
_TRAIN_OFFSET = 4_000


@dataclass
class ExperimentConfig:
    method: str
    n_users: int = 4
    dataset_path: str | None = None
    synthetic: dict | None = None  # n_per_class, m, template_density, flip_prob
    split_fractions: tuple = (0.8, 0.1, 0.1)
    partition_mode: str = "iid"  # "iid" or "label_bias"
    bias_r: float = 0.0
    anchor_strategy: str = "binary01"
    anchor_count: int = 3000
    anchor_pool_path: str | None = None
    anchor_binary_density: float = 0.5
    projection_pool_path: str | None = None
    projection_count: int = 20000
    k: int = 500  # DC intermediate dimension
    k1: int = 100  # DCPd own-data dimension
    k2: int = 100  # DCPd projection-data dimension
    k_collab: int = 100
    hidden_dims: tuple = (2000, 1000)
    dropout_rates: tuple = (0.4, 0.4)
    minibatch_size: int = 25
    learning_rate: float = 0.00002
    max_epochs: int = 300
    patience: int = 10
    fed_epochs_per_round: int = 1
    fed_max_rounds: int = 300
    fed_patience: int = 10
    repetitions: int = 5
    base_seed: int = 0
    test_transform_user: int | str = "average"
    dcpd_fit_primary_on_anchor: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidArgumentError(f"unknown method {self.method!r}")
        if (self.dataset_path is None) == (self.synthetic is None):
            raise InvalidArgumentError(
                "exactly one of dataset_path or synthetic must be given"
            )
        if self.partition_mode not in ("iid", "label_bias"):
            raise InvalidArgumentError(f"unknown partition mode {self.partition_mode!r}")
        if self.partition_mode == "label_bias" and not (0.0 <= self.bias_r <= 1.0):
            raise InvalidArgumentError("bias_r must lie in [0, 1]")
        if self.repetitions < 1 or self.n_users < 2:
            raise InvalidArgumentError("repetitions >= 1 and n_users >= 2 required")
        if self.method == "dcpd" and self.projection_pool_path is None:
            raise InvalidArgumentError("dcpd requires projection_pool_path")
        if (
            self.test_transform_user != "average"
            and not 0 <= int(self.test_transform_user) < self.n_users
        ):
            raise InvalidArgumentError("test_transform_user out of range")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        raw = dict(raw)
        for key in ("split_fractions", "hidden_dims", "dropout_rates"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(**raw)

    def to_jsonable(self) -> dict:
        d = asdict(self)
        for key in ("split_fractions", "hidden_dims", "dropout_rates"):
            d[key] = list(d[key])
        return d


@dataclass
class ExperimentRun:
    repetition: int
    seed: int
    roc_auc: float
    pr_auc: float
    plan_hash: str | None = None


@dataclass
class ExperimentResult:
    method: str
    bias_r: float | None
    report: metrics.MetricsReport
    runs: list = field(default_factory=list)


@dataclass
class SweepResult:
    r_values: list
    methods: list
    cells: dict = field(default_factory=dict)  # (method, r) -> ExperimentResult


def _base_dataset(config: ExperimentConfig) -> ds.LabeledDataset:
    if config.dataset_path is not None:
        return ds.load_dataset(config.dataset_path)
    syn = dict(config.synthetic)
    syn.setdefault("seed", config.base_seed + _DATASET_OFFSET)
    return ds.generate_synthetic_fingerprint_dataset(
        n_per_class=syn["n_per_class"],
        m=syn["m"],
        template_density=syn.get("template_density", 0.2),
        flip_prob=syn["flip_prob"],
        seed=syn["seed"],
    )


def _partition(config, train, rep_seed) -> ds.PartitionPlan:
    if config.partition_mode == "iid":
        return ds.partition_iid(train, config.n_users, rep_seed)
    return ds.partition_label_bias(train, config.bias_r, rep_seed)


def _train_config(config, seed) -> mlp.TrainConfig:
    return mlp.TrainConfig(
        minibatch_size=config.minibatch_size,
        learning_rate=config.learning_rate,
        max_epochs=config.max_epochs,
        patience=config.patience,
        dropout_rates=config.dropout_rates,
        seed=seed,
    )


def _train_mlp(config, x, y, xv, yv, seed) -> mlp.MlpModel:
    dims = [x.shape[1], *config.hidden_dims, 1]
    model = mlp.init_mlp(dims, seed, dropout_rates=config.dropout_rates)
    best, _ = mlp.train(model, (x, y), (xv, yv), _train_config(config, seed))
    return best


def _anchor(config, m, seed) -> ds.LabeledDataset:
    spec = ds.AnchorSpec(
        strategy=config.anchor_strategy,
        count=config.anchor_count,
        seed=seed,
        pool_path=config.anchor_pool_path,
        binary_density=config.anchor_binary_density,
    )
    return ds.generate_anchor(spec, m)


def _dc_scores(config, model, x, user_scores_of):
    if config.test_transform_user == "average":
        scores = [user_scores_of(u, x) for u in range(model.n_users)]
        return np.mean(scores, axis=0)
    return user_scores_of(int(config.test_transform_user), x)


def _run_collaboration_rep(config, train, valid, test, plan, rep):
    anchor = _anchor(config, train.feature_dim, config.base_seed + _ANCHOR_OFFSET + rep)
    users = [train.subset(a) for a in plan.assignments]
    if config.method == "dc":
        bundles = [
            dc.dc_user_phase(u_ds, anchor, config.k, user_id=u)
            for u, u_ds in enumerate(users)
        ]
    else:
        pool = ds.load_dataset(config.projection_pool_path)
        bundles = []
        for u, u_ds in enumerate(users):
            proj_seed = config.base_seed + _PROJECTION_OFFSET + 100 * rep + u
            x_proj = ds.sample_projection_data(pool, config.projection_count, proj_seed)
            bundles.append(
                dc.dcpd_user_phase(
                    u_ds,
                    anchor,
                    x_proj,
                    config.k1,
                    config.k2,
                    user_id=u,
                    fit_primary_on_anchor=config.dcpd_fit_primary_on_anchor,
                )
            )
    collab = dc.server_collaboration(bundles, config.k_collab)

    # Standardize the collaboration features with the training set's moments;
    # the latent target has unit-vector columns, so raw x_hat entries are too
    # small for the classifier's fixed learning rate.
    mu = collab.x_hat.mean(axis=0)
    sd = collab.x_hat.std(axis=0)
    sd[sd == 0] = 1.0

    def as_input(z):
        return (z - mu) / sd

    # Validation in the collaboration space: stack every user's transform path
    # so early stopping sees the same paths used for test-time scoring.
    xv = np.vstack(
        [
            as_input(dc.transform_test(collab, u, valid.features))
            for u in range(collab.n_users)
        ]
    )
    yv = np.tile(valid.labels, collab.n_users)
    model = _train_mlp(
        config,
        as_input(collab.x_hat),
        collab.y,
        xv,
        yv,
        config.base_seed + _TRAIN_OFFSET + rep,
    )

    def user_scores(u, x):
        return mlp.predict(model, as_input(dc.transform_test(collab, u, x)))

    return _dc_scores(config, collab, test.features, user_scores)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute the configured method end to end over seeded repetitions."""
    data = _base_dataset(config)
    train, valid, test = ds.split_train_valid_test(
        data, config.split_fractions, config.base_seed + _SPLIT_OFFSET
    )

    # Partitioning does not enter the centralized pipeline, so one run suffices.
    reps = 1 if config.method == "centralized" else config.repetitions
    result = ExperimentResult(
        method=config.method,
        bias_r=config.bias_r if config.partition_mode == "label_bias" else None,
        report=metrics.MetricsReport(),
    )
    for rep in range(reps):
        seed = config.base_seed + rep
        plan_hash = None
        if config.method == "centralized":
            model = _train_mlp(
                config,
                train.features,
                train.labels,
                valid.features,
                valid.labels,
                config.base_seed + _TRAIN_OFFSET + rep,
            )
            scores = mlp.predict(model, test.features)
        else:
            plan = _partition(config, train, config.base_seed + _PARTITION_OFFSET + rep)
            plan_hash = plan.plan_hash()
            if config.method == "fedavg":
                clients = [
                    (train.features[a], train.labels[a]) for a in plan.assignments
                ]
                fed_cfg = fedavg.FedConfig(
                    epochs_per_round=config.fed_epochs_per_round,
                    max_rounds=config.fed_max_rounds,
                    patience=config.fed_patience,
                    train_config=_train_config(
                        config, config.base_seed + _TRAIN_OFFSET + rep
                    ),
                )
                model, _ = fedavg.fedavg_train(
                    clients,
                    (valid.features, valid.labels),
                    [train.feature_dim, *config.hidden_dims, 1],
                    fed_cfg,
                    config.base_seed + _TRAIN_OFFSET + rep,
                )
                scores = mlp.predict(model, test.features)
            else:
                scores = _run_collaboration_rep(config, train, valid, test, plan, rep)
        roc = metrics.roc_auc(scores, test.labels)
        pr = metrics.pr_auc(scores, test.labels)
        result.report.add_run(roc, pr)
        result.runs.append(
            ExperimentRun(
                repetition=rep, seed=seed, roc_auc=roc, pr_auc=pr, plan_hash=plan_hash
            )
        )
    return result


def run_sweep(config: ExperimentConfig, r_values, methods) -> SweepResult:
    """Cross product of methods x label-bias values, sharing base seeds so
    all methods see identical partition plans at each (r, repetition)."""
    r_values = [float(r) for r in r_values]
    if any(not (0.0 <= r <= 1.0) for r in r_values):
        raise InvalidArgumentError("r values must lie in [0, 1]")
    for m in methods:
        if m not in METHODS:
            raise InvalidArgumentError(f"unknown method {m!r}")
    sweep = SweepResult(r_values=r_values, methods=list(methods))
    import dataclasses

    for r in r_values:
        for method in methods:
            cell_config = dataclasses.replace(
                config, method=method, partition_mode="label_bias", bias_r=r
            )
            sweep.cells[(method, r)] = run_experiment(cell_config)
    return sweep


def _result_jsonable(res: ExperimentResult) -> dict:
    return {
        "method": res.method,
        "bias_r": res.bias_r,
        "summary": res.report.summary(),
        "runs": [asdict(r) for r in res.runs],
    }


def _csv_rows(res: ExperimentResult):
    for run in res.runs:
        yield [
            res.method,
            "" if res.bias_r is None else repr(res.bias_r),
            run.repetition,
            run.seed,
            repr(run.roc_auc),
            repr(run.pr_auc),
            run.plan_hash or "",
        ]


def _svg_sweep_plot(sweep: SweepResult, metric: str) -> str:
    """Minimal deterministic SVG: one polyline per method, stderr error bars."""
    width, height, margin = 640, 420, 60
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]

    def sx(r):
        return margin + r * (width - 2 * margin)

    def sy(v):
        return height - margin - v * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 16}" text-anchor="middle" '
        f'font-size="14">label bias r</text>',
        f'<text x="16" y="{height // 2}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 16 {height // 2})">{metric}</text>',
    ]
    for i, method in enumerate(sweep.methods):
        color = colors[i % len(colors)]
        pts = []
        for r in sweep.r_values:
            s = sweep.cells[(method, r)].report.summary()
            mean = s[f"{metric}_mean"]
            err = s[f"{metric}_stderr"]
            x, y = sx(r), sy(mean)
            pts.append(f"{x:.2f},{y:.2f}")
            parts.append(
                f'<line x1="{x:.2f}" y1="{sy(mean - err):.2f}" x2="{x:.2f}" '
                f'y2="{sy(mean + err):.2f}" stroke="{color}"/>'
            )
        parts.append(
            f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" '
            f'stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{width - margin + 4}" y="{margin + 18 * i}" font-size="12" '
            f'fill="{color}">{method}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def emit_results(obj, out_dir, config: ExperimentConfig | None = None) -> None:
    """Write results.json and results.csv (plus SVG curves for sweeps)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if isinstance(obj, SweepResult):
        if not obj.cells:
            raise InvalidArgumentError("nothing to emit")
        results = [
            {"r": r, **_result_jsonable(obj.cells[(m, r)])}
            for r in obj.r_values
            for m in obj.methods
        ]
        payload = {
            "type": "sweep",
            "r_values": obj.r_values,
            "methods": obj.methods,
            "results": results,
        }
        rows = [
            row
            for r in obj.r_values
            for m in obj.methods
            for row in _csv_rows(obj.cells[(m, r)])
        ]
        (out_dir / "plot_roc.svg").write_text(
            _svg_sweep_plot(obj, "roc_auc"), encoding="utf-8"
        )
        (out_dir / "plot_pr.svg").write_text(
            _svg_sweep_plot(obj, "pr_auc"), encoding="utf-8"
        )
    elif isinstance(obj, ExperimentResult):
        if not obj.runs:
            raise InvalidArgumentError("nothing to emit")
        payload = {"type": "experiment", "results": [_result_jsonable(obj)]}
        rows = list(_csv_rows(obj))
    else:
        raise InvalidArgumentError(f"cannot emit {type(obj).__name__}")

    if config is not None:
        payload["config"] = config.to_jsonable()
    payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())

    with (out_dir / "results.json").open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with (out_dir / "results.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "bias_r", "repetition", "seed", "roc_auc", "pr_auc", "plan_hash"]
        )
        writer.writerows(rows)
