"""Command-line front end.

Four subcommands, each driven by a flat key=value config file:

- ``simulate``   BER sweep; writes results.csv, records.csv, grids.csv
- ``lutgen``     AWGN reference curve for the config's efficiency class
- ``calibrate``  fit the compression parameter from recorded runs
- ``validate``   fresh sweeps across power profiles vs. predictions

``--seed`` and ``--out`` override the corresponding config keys.
"""

from __future__ import annotations

import argparse
import sys

from . import sim
from .config import load_config
from .exceptions import MimolinkError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimolink",
        description="coded 2x2 MIMO-OFDM link simulator and BER predictor",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, summary in (
        ("simulate", "run a BER sweep and record SINR grids"),
        ("lutgen", "generate the AWGN reference curve"),
        ("calibrate", "fit the effective-SINR compression parameter"),
        ("validate", "compare fresh sweeps against model predictions"),
    ):
        cmd = sub.add_parser(name, help=summary)
        cmd.add_argument("--config", required=True, help="key=value config file")
        cmd.add_argument("--seed", type=int, default=None, help="override the master seed")
        cmd.add_argument("--out", default=None, help="override the output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.out is not None:
        overrides["out_dir"] = args.out
    try:
        cfg = load_config(args.config, overrides=overrides)
        if args.command == "simulate":
            paths = sim.cmd_simulate(cfg)
            for label, path in paths.items():
                print(f"{label}: {path}")
        elif args.command == "lutgen":
            print(f"curve: {sim.cmd_lutgen(cfg)}")
        elif args.command == "calibrate":
            path = sim.cmd_calibrate(cfg)
            from .eesm import load_model

            model = load_model(path)
            print(f"model: {path}")
            print(f"lambda: {model.lam:.6g}  residual: {model.residual:.4g}")
            if model.single_profile:
                print("note: calibrated from a single power profile")
            if model.ill_conditioned:
                print("warning: fit is ill-conditioned; lambda is not identifiable")
        else:
            print(f"comparison: {sim.cmd_validate(cfg)}")
    except (MimolinkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
