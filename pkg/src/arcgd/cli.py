"""Command line entry point: ``arcgd <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .mlp import (ARCHITECTURES, TrainPolicy, eta_low_ablation, load_cifar10_binary,
                  synthetic_dataset, train)
from .optim import OPTIMIZER_NAMES, comparison_spec
from .report import (emit_ablation_csv, emit_curve_csv, emit_metadata, emit_run_csv,
                     emit_summary_json, read_run_csv)
from .rosenbrock import (DEFAULT_DIMS, MASTER_SEED, ConvergencePolicy, matrix_optimizers,
                         run_matrix, summarize_runs)

log = logging.getLogger("arcgd")


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated integer list, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _arch_list(text):
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [n for n in names if n not in ARCHITECTURES]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown architecture(s) {bad}; choose from {sorted(ARCHITECTURES)}")
    return names


def build_parser():
    parser = argparse.ArgumentParser(prog="arcgd", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    bench = sub.add_parser("bench-rosenbrock", help="stochastic Rosenbrock test matrix")
    bench.add_argument("--config", choices=["A", "B"], default="A")
    bench.add_argument("--dims", type=_int_list, default=list(DEFAULT_DIMS))
    bench.add_argument("--runs", type=_positive_int, default=None,
                       help="runs per dimension (default 10, 3 for 50,000-D)")
    bench.add_argument("--seed", type=int, default=MASTER_SEED)
    bench.add_argument("--max-iters", type=_positive_int, default=1_000_000)
    bench.add_argument("--trace-every", type=_non_negative_int, default=0,
                       help="write loss traces every k iterations (0 disables)")
    bench.add_argument("--workers", type=_positive_int, default=1)
    bench.add_argument("--out", type=Path, default=Path("results"))

    def add_data_flags(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--data", type=Path, help="CIFAR-10 binary file or directory")
        group.add_argument("--synthetic", action="store_true",
                           help="use the synthetic Gaussian-cluster dataset (default)")
        p.add_argument("--subset", type=_positive_int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-iters", type=_positive_int, default=20000)
        p.add_argument("--out", type=Path, default=Path("results"))

    tr = sub.add_parser("train-mlp", help="train one MLP with one optimizer")
    tr.add_argument("--arch", choices=sorted(ARCHITECTURES), default="tiny")
    tr.add_argument("--optimizer", choices=OPTIMIZER_NAMES, default="arcgd")
    tr.add_argument("--eta-low", type=_positive_float, default=None)
    add_data_flags(tr)
    tr.add_argument("--seeds", type=_int_list, default=None,
                    help="comma separated seeds; one curve per seed (overrides --seed)")

    ab = sub.add_parser("ablate-eta-low", help="compare eta_low = 0.01 against another value")
    ab.add_argument("--arch", type=_arch_list, default=["tiny"])
    ab.add_argument("--eta-low", type=_positive_float, default=0.1,
                    help="eta_low of the second arm (the first is 0.01)")
    add_data_flags(ab)

    rep = sub.add_parser("report", help="rebuild summary.json from records_*.csv in --out")
    rep.add_argument("--out", type=Path, default=Path("results"))
    return parser


def parse_cli(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench-rosenbrock":
        if any(d < 2 for d in args.dims):
            parser.error("--dims entries must be >= 2")
        if args.max_iters <= ConvergencePolicy.patience:
            parser.error(f"--max-iters must exceed the patience ({ConvergencePolicy.patience})")
    if args.command in ("train-mlp", "ablate-eta-low"):
        if args.subset is not None and args.subset < 10:
            parser.error("--subset must be >= 10")
        if args.command == "train-mlp" and args.eta_low is not None and args.optimizer != "arcgd":
            parser.error("--eta-low only applies to --optimizer arcgd")
    return args


def _metadata(args, **extra):
    resolved = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    return {
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "arguments": resolved,
        "versions": {"arcgd": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        **extra,
    }


def _config_dict(spec):
    return {"name": spec.name, "type": type(spec.config).__name__,
            **dataclasses.asdict(spec.config)}


def _bench(args):
    policy = ConvergencePolicy(max_iterations=args.max_iters)
    result = run_matrix(args.config, args.dims, args.runs, master_seed=args.seed,
                        policy=policy, workers=args.workers, trace_every=args.trace_every)
    meta = _metadata(args, config=args.config,
                     optimizers=[_config_dict(s) for s in matrix_optimizers(args.config)],
                     policy=dataclasses.asdict(policy))
    out = args.out
    for dim in args.dims:
        test_set = f"{args.config}{dim}"
        records = result.records_for(test_set)
        emit_run_csv(records, out / f"records_{test_set}.csv")
        if args.trace_every:
            for r in records:
                emit_curve_csv(r.trace, out / f"trace_{test_set}_run{r.run}_{r.optimizer}.csv",
                               mode="trace", every=args.trace_every)
    emit_summary_json(result.summaries, out / "summary.json", meta)
    emit_metadata(meta, out / "metadata.json")
    for s in result.summaries:
        log.info("%s %s: %d/%d converged, avg iterations %s", s.test_set, s.optimizer,
                 s.converged_runs, s.total_runs, s.avg_iterations)


def _dataset(args):
    if args.data is not None:
        return load_cifar10_binary(args.data, seed=args.seed, subset=args.subset)
    n = args.subset or 2000
    return synthetic_dataset(n, 32, 4, seed=args.seed)


def _policy(args):
    checkpoints = tuple(sorted({c for c in (5000, 20000) if c <= args.max_iters} | {args.max_iters}))
    return TrainPolicy(max_iterations=args.max_iters, eval_checkpoints=checkpoints, seed=args.seed)


def _train(args):
    if args.seeds:
        for seed in args.seeds:
            _train_one(argparse.Namespace(**{**vars(args), "seed": seed, "seeds": None}),
                       suffix=f"_seed{seed}")
    else:
        _train_one(args)


def _train_one(args, suffix=""):
    data = _dataset(args)
    policy = _policy(args)
    overrides = {"eta_low": args.eta_low} if args.eta_low is not None else {}
    spec = comparison_spec(args.optimizer, **overrides)
    result = train(ARCHITECTURES[args.arch], spec, policy, data)
    stem = f"{args.arch}_{args.optimizer}{suffix}"
    emit_curve_csv(result.curve, args.out / f"curve_{stem}.csv", mode="mlp")
    emit_metadata(_metadata(args, dataset=data.name, optimizer=_config_dict(spec),
                            policy=dataclasses.asdict(policy), early_stop_monitor=result.monitor,
                            stopped_early=result.stopped_early,
                            last_iteration=result.last_iteration),
                  args.out / f"metadata_{stem}.json")
    log.info("seed %d: final test accuracy %.4f", args.seed, result.curve[-1]["test_acc"])


def _ablate(args):
    data = _dataset(args)
    policy = _policy(args)
    rows = eta_low_ablation(args.arch, data, policy, eta_lows=(0.01, args.eta_low))
    emit_ablation_csv(rows, args.out / "eta_low_ablation.csv")
    emit_metadata(_metadata(args, dataset=data.name, policy=dataclasses.asdict(policy)),
                  args.out / "metadata_ablation.json")


def _report(args):
    files = sorted(args.out.glob("records_*.csv"))
    if not files:
        raise FileNotFoundError(f"no records_*.csv files in {args.out}")
    summaries = []
    for f in files:
        test_set = f.stem[len("records_"):]
        records = read_run_csv(f, test_set)
        for name in sorted({r.optimizer for r in records}):
            summaries.append(summarize_runs([r for r in records if r.optimizer == name], test_set))
    emit_summary_json(summaries, args.out / "summary.json",
                      {"command": "report", "sources": [f.name for f in files]})


COMMANDS = {"bench-rosenbrock": _bench, "train-mlp": _train,
            "ablate-eta-low": _ablate, "report": _report}


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = parse_cli(argv)
    try:
        COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        log.error("error: %s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
