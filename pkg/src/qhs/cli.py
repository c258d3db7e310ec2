"""Command-line entry point: ``qhs <subcommand> --config PATH [options]``.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algorithms import ConfigError
from .config import ALGORITHMS, parse_config
from .harness import ReportError, TrialError, replay_log, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ALGORITHMS:
        p = sub.add_parser(name, help=f"run a batch of {name} trials")
        p.add_argument("--config", required=True, help="JSON config file (or inline JSON)")
        p.add_argument("--seed", type=int, help="override master_seed")
        p.add_argument("--trials", type=int, help="override trials")
        p.add_argument("--out", help="output directory for trials.jsonl and the summary")
        p.add_argument("--format", choices=["json", "csv"], help="summary format")
        p.add_argument("--workers", type=int, help="worker processes")
    p = sub.add_parser("replay", help="re-execute a run log and check every record reproduces")
    p.add_argument("--log", required=True, help="trials.jsonl written by a previous run")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        try:
            count, bad = replay_log(args.log)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        print(json.dumps({"records": count, "mismatched": bad}))
        return EXIT_OK if not bad else EXIT_RUNTIME

    overrides = {
        "master_seed": args.seed,
        "trials": args.trials,
        "out_dir": args.out,
        "format": args.format,
        "workers": args.workers,
    }
    try:
        cfg = parse_config(args.config, overrides)
        if cfg.algorithm != args.command:
            raise ConfigError(f"config algorithm {cfg.algorithm!r} does not match subcommand {args.command!r}")
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        stats = run_experiment(cfg)
    except (TrialError, ReportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps(stats.to_dict(), indent=1))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
