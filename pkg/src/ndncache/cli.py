"""Command-line entry point: ``simulate``, ``features`` and ``allocate``."""

from __future__ import annotations

import argparse
import sys

from . import fusion
from .harness import (
    SCHEMES,
    ExperimentConfig,
    aggregate_replications,
    emit_report,
    load_config,
    measure_features,
    run_replications,
)
from .engine import replication_seeds
from .metrics import RouterFeatureRecord, features_to_csv, read_features


def _config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if getattr(args, "topology", None):
        changes["topology_path"] = args.topology
    if getattr(args, "scheme", None):
        changes["scheme"] = args.scheme
    if getattr(args, "seed", None) is not None:
        changes["master_seed"] = args.seed
    if getattr(args, "replications", None) is not None:
        changes["replications"] = args.replications
    return cfg.replace(**changes)


def cmd_simulate(args):
    cfg = _config(args)
    reports = run_replications(cfg, jobs=args.jobs)
    summary = aggregate_replications(reports)
    emit_report(summary, args.out)
    hr, _ = summary.cumulative["router_hit_ratio_mean"]
    pit, _ = summary.cumulative["pit_occupancy_mean"]
    print(f"{cfg.scheme}: router hit ratio {hr:.6g}, PIT occupancy {pit:.6g} -> {args.out}")
    return 0


def cmd_features(args):
    cfg = _config(args)
    seed = replication_seeds(cfg.master_seed, 1)[0]
    records = measure_features(cfg, seed=seed)
    if args.normalize != "none":
        ids, X = fusion.feature_matrix(records)
        Xn = fusion.normalize(X, args.normalize)
        records = [RouterFeatureRecord(r, *map(float, row)) for r, row in zip(ids, Xn)]
    text = features_to_csv(records)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def cmd_allocate(args):
    records = read_features(args.features)
    result = fusion.proposed_weights(records, mode=args.mode)
    caps = fusion.allocate(result.weights, args.total)
    text = fusion.allocation_to_csv(result.routers, result.weights, caps)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="ndncache", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--topology", help="topology file (default: bundled Abilene)")
        p.add_argument("--config", help="key = value experiment config")
        p.add_argument("--seed", type=int, help="master seed")

    p = sub.add_parser("simulate", help="run replications of one scheme and write CSV reports")
    common(p)
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--replications", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("features", help="dump the per-router feature table")
    common(p)
    p.add_argument("--out", required=True, help="CSV path, or - for stdout")
    p.add_argument("--normalize", choices=("none", "minmax", "zscore"), default="none")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("allocate", help="fuse a feature table into cache capacities")
    p.add_argument("--features", required=True)
    p.add_argument("--total", type=int, required=True, help="network cache budget in chunks")
    p.add_argument("--mode", choices=("minmax", "zscore"), default="minmax")
    p.add_argument("--out")
    p.set_defaults(func=cmd_allocate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"ndncache: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
