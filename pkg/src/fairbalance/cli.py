"""Command-line experiment runner.

Subcommands: run (preprocessing comparison on one config), sweep
(imbalance-level curves), importance (coefficient-based feature
importance), synth (write a synthetic biased fixture CSV). Errors are
reported as machine-readable JSON on stderr with a non-zero exit code.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import FairbalanceError
from .harness import (
    ExperimentConfig,
    emit_report,
    imbalance_sweep,
    importance_report,
    run_experiment,
)
from .synth import dataset_to_csv, make_biased_dataset


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    report = run_experiment(cfg)
    emit_report(report, args.out, format=args.format, include_timing=args.timing)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    report = imbalance_sweep(cfg)
    emit_report(report, args.out, format=args.format, include_timing=args.timing)
    return 0


def _cmd_importance(args) -> int:
    cfg = _load_config(args)
    result = importance_report(cfg)
    with open(args.out, "w") as fh:
        json.dump(result, fh, indent=2)
        fh.write("\n")
    return 0


def _cmd_synth(args) -> int:
    cells = {
        "prmaj": args.prmaj,
        "upmaj": args.upmaj,
        "prmin": args.prmin,
        "upmin": args.upmin,
    }
    d = make_biased_dataset(
        cells,
        n_features=args.features,
        class_sep=args.class_sep,
        group_shift=args.group_shift,
        disadvantage=args.disadvantage,
        seed=args.seed if args.seed is not None else 0,
    )
    dataset_to_csv(d, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairbalance")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON or TOML config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", required=True, help="output file path")

    p_run = sub.add_parser("run", help="run one cross-validated experiment")
    common(p_run)
    p_run.add_argument("--format", choices=("json", "csv"), default="json")
    p_run.add_argument("--timing", action="store_true", help="include wall-clock per stage")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run an imbalance-level sweep")
    common(p_sweep)
    p_sweep.add_argument("--format", choices=("json", "csv"), default="json")
    p_sweep.add_argument("--timing", action="store_true")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_imp = sub.add_parser("importance", help="feature importance report")
    common(p_imp)
    p_imp.set_defaults(func=_cmd_importance)

    p_synth = sub.add_parser("synth", help="generate a synthetic biased CSV fixture")
    common(p_synth, config=False)
    p_synth.add_argument("--prmaj", type=int, required=True)
    p_synth.add_argument("--upmaj", type=int, required=True)
    p_synth.add_argument("--prmin", type=int, required=True)
    p_synth.add_argument("--upmin", type=int, required=True)
    p_synth.add_argument("--features", type=int, default=5)
    p_synth.add_argument("--class-sep", type=float, default=2.0)
    p_synth.add_argument("--group-shift", type=float, default=1.0)
    p_synth.add_argument("--disadvantage", type=float, default=1.0)
    p_synth.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FairbalanceError, ValueError, OSError) as exc:
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)}, sys.stderr
        )
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
