"""Command-line entry point: ``hetnet-wbba`` / ``python -m hetnet_wbba``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import ALGORITHMS, ExperimentSpec, run_experiment
from .scenario import NetworkScenario


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hetnet-wbba",
        description="Monte-Carlo evaluation of joint cell association and wireless-backhaul "
                    "bandwidth allocation in a two-tier HetNet.",
    )
    p.add_argument("--config", help="JSON experiment specification")
    p.add_argument("--scenario", choices=("unified", "percell"), help="backhaul allocation scenario")
    p.add_argument("--algos", help=f"comma separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--trials", type=int, help="number of Monte-Carlo trials")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--ns", type=int, help="number of small cells")
    p.add_argument("--nu", type=int, help="number of mobile terminals")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--bits-per-second", action="store_true",
                   help="report rates in bit/s instead of bit/s/Hz")
    p.add_argument("--dump-links", action="store_true",
                   help="also write per-link budgets of every trial to links.csv")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def spec_from_args(args) -> ExperimentSpec:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    scenario = data.get("scenario", {})
    scenario = scenario.to_dict() if isinstance(scenario, NetworkScenario) else dict(scenario)
    if args.ns is not None:
        scenario["n_small_cells"] = args.ns
    if args.nu is not None:
        scenario["n_mts"] = args.nu
    data["scenario"] = scenario
    if args.scenario is not None:
        data["scenario_kind"] = "per_cell" if args.scenario == "percell" else "unified"
    if args.algos is not None:
        data["algorithms"] = [a.strip() for a in args.algos.split(",") if a.strip()]
    if args.trials is not None:
        data["n_trials"] = args.trials
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    data.setdefault("output_dir", "results")
    return ExperimentSpec.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        summary, _ = run_experiment(spec, n_workers=args.workers,
                                    bits_per_second=args.bits_per_second, dump_links=args.dump_links)
    except (ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    unit = "bit/s" if args.bits_per_second else "bit/s/Hz"
    for name, m in summary.per_algorithm.items():
        print(f"{name:>17s}  utility {m.mean_utility:9.3f} +- {m.utility_stderr:.3f}  "
              f"R0.5 {m.r50:.4g}  R0.9 {m.r90:.4g} {unit}")
    print(f"results written to {spec.output_dir}")
    return 0
