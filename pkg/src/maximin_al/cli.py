"""Command-line harness: run experiments, sweep seeds, check guarantees, generate data.

Subcommands
-----------
run    Execute one configured experiment, writing trace.csv and summary.json.
sweep  Re-run one config across a seed range, writing per-seed traces and a
       combined summary.json.
check  Run a behavioral check suite; exits nonzero if any check fails.
gen    Sample a synthetic task to a CSV dataset (f0..f{d-1},label schema).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import acceptance
from .harness import ExperimentConfig, run_experiment, summarize, write_dataset_csv
from .synthetic import ClusterSpec, gen_clusters, gen_threshold_task


def _parse_seed_range(text: str) -> range:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise SystemExit(f"--seeds expects 'a..b' (inclusive), got {text!r}")
    if hi < lo:
        raise SystemExit(f"--seeds range is empty: {text!r}")
    return range(lo, hi + 1)


def _cmd_run(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    record = run_experiment(cfg)
    record.write_trace(out / "trace.csv")
    record.write_summary(out / "summary.json")
    print(f"wrote {out / 'trace.csv'} ({len(record.steps)} steps), "
          f"queries_to_zero={record.queries_to_zero}, "
          f"final_error={record.final_error:.4f}")
    return 0


def _cmd_sweep(args) -> int:
    base = ExperimentConfig.from_json(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for seed in _parse_seed_range(args.seeds):
        record = run_experiment(base.with_seed(seed))
        record.write_trace(out / f"trace_seed{seed}.csv")
        records.append(record)
    summary = summarize(records)
    summary.write(out / "summary.json")
    print(f"swept {len(records)} seeds; median queries_to_zero="
          f"{summary.median_queries_to_zero}")
    return 0


def _cmd_check(args) -> int:
    results = acceptance.run_suite(args.suite, args.seed)
    for result in results:
        print(result.line())
    return 0 if all(r.passed for r in results) else 1


def _cmd_gen(args) -> int:
    with open(args.spec) as fh:
        spec = json.load(fh)
    if args.task == "threshold":
        _, pool = gen_threshold_task(int(spec["n"]), int(spec["k"]), args.seed)
    else:
        cluster = ClusterSpec(spec["centers"], spec["radii"], spec["labels"],
                              spec["counts"], spec.get("p", 2.0))
        pool = gen_clusters(cluster, args.seed)
    write_dataset_csv(args.out, pool.points, pool.hidden_labels)
    print(f"wrote {len(pool)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maximin-al", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--config", required=True, help="path to config JSON")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run one config across seeds")
    p_sweep.add_argument("--config", required=True, help="path to config JSON")
    p_sweep.add_argument("--seeds", required=True, help="inclusive range, e.g. 0..9")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_check = sub.add_parser("check", help="run a behavioral check suite")
    p_check.add_argument("--suite", required=True, choices=sorted(acceptance.SUITES))
    p_check.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    p_check.set_defaults(func=_cmd_check)

    p_gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    p_gen.add_argument("--task", required=True, choices=("threshold", "clusters"))
    p_gen.add_argument("--spec", required=True, help="path to task spec JSON")
    p_gen.add_argument("--out", required=True, help="output CSV path")
    p_gen.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    p_gen.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
