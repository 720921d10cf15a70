"""Command-line entry point.

Exit codes: 0 success, 2 config error, 3 data error, 4 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import datasets as ds
from . import harness
from .errors import DatasetFormatError, DcsimError, InvalidArgumentError

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcsim",
        description="Privacy-preserving collaborative learning simulator "
        "(centralized / FedAvg / DC / DCPd)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a synthetic fingerprint dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--n-per-class", type=int, required=True)
    p.add_argument("--dims", type=int, default=2048)
    p.add_argument("--flip", type=float, default=0.05)
    p.add_argument("--density", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("partition", help="compute and save a partition plan")
    p.add_argument("--data", required=True)
    p.add_argument("--mode", choices=["iid", "bias"], required=True)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--users", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run one experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep-r", help="sweep the label-bias parameter r")
    p.add_argument("--config", required=True)
    p.add_argument("--r", required=True, help="comma-separated r values")
    p.add_argument("--methods", required=True, help="comma-separated methods")
    p.add_argument("--out", required=True)
    return parser


def _load_config(path) -> harness.ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise InvalidArgumentError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"config is not valid JSON: {exc}")
    return harness.ExperimentConfig.from_dict(raw)


def _cmd_gen_synth(args) -> int:
    d = ds.generate_synthetic_fingerprint_dataset(
        n_per_class=args.n_per_class,
        m=args.dims,
        template_density=args.density,
        flip_prob=args.flip,
        seed=args.seed,
    )
    ds.save_dataset(d, args.out)
    print(f"wrote {d.n_samples} samples x {d.feature_dim} bits to {args.out}")
    return 0


def _cmd_partition(args) -> int:
    data = ds.load_dataset(args.data)
    if args.mode == "iid":
        plan = ds.partition_iid(data, args.users, args.seed)
    else:
        if args.users != 4:
            raise InvalidArgumentError("label-bias partitioning is defined for 4 users")
        plan = ds.partition_label_bias(data, args.r, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "n_users": plan.n_users,
                "bias_r": plan.bias_r,
                "seed": plan.seed,
                "plan_hash": plan.plan_hash(),
                "assignments": plan.assignments,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    print(f"wrote partition plan ({plan.plan_hash()[:12]}) to {args.out}")
    return 0


def _cmd_run(args) -> int:
    config = _load_config(args.config)
    result = harness.run_experiment(config)
    harness.emit_results(result, args.out, config=config)
    s = result.report.summary()
    print(
        f"{config.method}: ROC-AUC {s['roc_auc_mean']:.4f}±{s['roc_auc_stderr']:.4f} "
        f"PR-AUC {s['pr_auc_mean']:.4f}±{s['pr_auc_stderr']:.4f} "
        f"({s['runs']} runs) -> {args.out}"
    )
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    r_values = [float(t) for t in args.r.split(",") if t]
    methods = [t.strip() for t in args.methods.split(",") if t.strip()]
    sweep = harness.run_sweep(config, r_values, methods)
    harness.emit_results(sweep, args.out, config=config)
    print(f"swept {len(methods)} methods x {len(r_values)} r values -> {args.out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "gen-synth": _cmd_gen_synth,
        "partition": _cmd_partition,
        "run": _cmd_run,
        "sweep-r": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except DatasetFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidArgumentError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DcsimError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
