"""Command-line entry point.

Subcommands: ``run`` (experiment presets with config-file plus flag
overrides), ``grid`` (standalone residual field from a saved Gram triple),
``classify`` (re-threshold eigenvalues of a saved triple), and ``ingest``
(trajectory CSV to snapshot archive).  Exit codes: 0 success, 2
configuration error, 3 numerical failure.  ``SPECPOL_THREADS`` caps grid
parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .analysis import classify_eigenvalues
from .config import EXPERIMENTS, build_config, load_config_file
from .edmd import ResdmdEvaluator, fit_edmd, make_grid, operator_eigs
from .errors import ConfigError, SpecpolError
from .experiments import run_experiment
from .io import (ingest_trajectory, load_gram_triple, write_json, write_residual_csv)

_EXIT_CONFIG = 2
_EXIT_NUMERIC = 3


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="TOML (or meta.json) configuration file")
    p.add_argument("--map", choices=["blaschke1", "blaschke2"])
    p.add_argument("--mu_re", type=float)
    p.add_argument("--mu_im", type=float)
    p.add_argument("--M", dest="n_pairs", type=int)
    p.add_argument("--N", dest="n_modes", type=int)
    p.add_argument("--space", choices=["l2", "sobolev", "hardy-dual"])
    p.add_argument("--s", type=float)
    p.add_argument("--radius_r", type=float)
    p.add_argument("--band", type=int)
    p.add_argument("--literal-band", action="store_const", const=True, dest="literal_band",
                   help="use --band exactly as given, skipping the tail-energy check")
    p.add_argument("--kernel", choices=["gaussian"])
    p.add_argument("--c_sq", help="positive number or 'auto-cov'")
    p.add_argument("--rank_r", help="positive integer or 'auto'")
    p.add_argument("--grid-extent", dest="grid_extent", type=float)
    p.add_argument("--grid-res", dest="grid_res", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--input")
    p.add_argument("--n-clusters", dest="n_clusters", type=int)
    p.add_argument("--sweep-s", dest="sweep_s",
                   help="comma-separated Sobolev exponents, e.g. '2,0,-1,-3,-6'")
    p.add_argument("--save-gram", action="store_const", const=True, dest="save_gram")
    p.add_argument("--out", dest="output_dir")


def _parse_typed(args: argparse.Namespace) -> dict:
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "func") and v is not None}
    if "c_sq" in overrides and overrides["c_sq"] != "auto-cov":
        try:
            overrides["c_sq"] = float(overrides["c_sq"])
        except ValueError:
            raise ConfigError(f"c_sq: expected a number or 'auto-cov', got {overrides['c_sq']!r}")
    if "rank_r" in overrides and overrides["rank_r"] != "auto":
        try:
            overrides["rank_r"] = int(overrides["rank_r"])
        except ValueError:
            raise ConfigError(f"rank_r: expected an integer or 'auto', got {overrides['rank_r']!r}")
    if "sweep_s" in overrides:
        try:
            overrides["sweep_s"] = [float(tok) for tok in overrides["sweep_s"].split(",")]
        except ValueError:
            raise ConfigError(f"sweep_s: expected comma-separated numbers")
    return overrides


def _cmd_run(args) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    cfg = build_config(overrides=_parse_typed(args), file_values=file_values)
    result = run_experiment(cfg)
    for name, path in result["artifacts"].items():
        print(f"{name}: {path}")
    if cfg.experiment == "lemma_check":
        summary = result["summary"]
        print(f"max relative deviation of the adjoint-pairing identity: "
              f"{summary['max_quad_rel_dev']:.3%} (target < 5%)")
        if not summary["passed"]:
            return _EXIT_NUMERIC
    return 0


def _cmd_grid(args) -> int:
    gt = load_gram_triple(args.gram)
    grid, meta = make_grid(args.grid_extent, args.grid_res)
    field = ResdmdEvaluator(gt).grid(grid, meta)
    path = write_residual_csv(args.out, field)
    print(f"residuals: {path}")
    return 0


def _cmd_classify(args) -> int:
    gt = load_gram_triple(args.gram)
    evaluator = ResdmdEvaluator(gt)
    eigs, _ = operator_eigs(fit_edmd(gt).L)
    report = classify_eigenvalues(eigs, evaluator.at, args.epsilon,
                                  meta={"space": gt.space.label(), "operator": "transfer"})
    path = write_json(args.out, report.to_json_dict())
    accepted = int(report.accepted.sum())
    print(f"eigenvalues: {path} ({accepted}/{len(report.eigenvalues)} accepted "
          f"at epsilon={args.epsilon:g})")
    return 0


def _cmd_ingest(args) -> int:
    snaps = ingest_trajectory(args.input, stride=args.stride)
    np.savez(args.out, X=snaps.X, Y=snaps.Y, weights=snaps.weights)
    print(f"snapshots: {args.out} ({snaps.n_pairs} pairs, d={snaps.X.shape[1]})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specpol",
                                     description="Residual-controlled operator spectra")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment preset")
    _add_run_flags(run)
    run.set_defaults(func=_cmd_run)

    grid = sub.add_parser("grid", help="residual field from a saved Gram triple")
    grid.add_argument("--gram", required=True)
    grid.add_argument("--grid-extent", dest="grid_extent", type=float, default=1.5)
    grid.add_argument("--grid-res", dest="grid_res", type=int, default=101)
    grid.add_argument("--out", required=True)
    grid.set_defaults(func=_cmd_grid)

    cls = sub.add_parser("classify", help="classify eigenvalues of a saved Gram triple")
    cls.add_argument("--gram", required=True)
    cls.add_argument("--epsilon", type=float, default=1e-2)
    cls.add_argument("--out", required=True)
    cls.set_defaults(func=_cmd_classify)

    ing = sub.add_parser("ingest", help="trajectory CSV to snapshot archive")
    ing.add_argument("--input", required=True)
    ing.add_argument("--stride", type=int, default=1)
    ing.add_argument("--out", required=True)
    ing.set_defaults(func=_cmd_ingest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return _EXIT_CONFIG
    except FileNotFoundError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return _EXIT_CONFIG
    except SpecpolError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return _EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
