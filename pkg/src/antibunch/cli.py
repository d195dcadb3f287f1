"""Command line: ``simulate``, ``analyze``, ``report`` and ``dump-config``."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import PRESETS, dump_config, load_config, preset, validate
from .errors import ConfigError, DataError, FormatError, InvalidParameter, PreconditionError
from .pipeline import run_analysis, run_simulation

EXIT_CONFIG, EXIT_DATA, EXIT_IO = 2, 3, 4


def _overrides(cfg, args):
    if getattr(args, "duration", None) is not None:
        cfg = replace(cfg, duration=args.duration)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, master_seed=args.seed)
    return validate(cfg)


def cmd_simulate(args):
    cfg = _overrides(load_config(args.config), args)
    n = run_simulation(cfg, args.out)
    print(f"wrote {n} tags to {args.out}")


def cmd_analyze(args):
    cfg = load_config(args.config)
    report = run_analysis(args.tags, cfg, hist_dir=args.hist_dir)
    report.table.to_csv(args.report)
    report.to_json(os.path.splitext(args.report)[0] + ".json")
    print(report.summary())


def cmd_report(args):
    cfg = _overrides(preset(args.preset), args)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "config.txt"), "w") as f:
        f.write(dump_config(cfg))
    tags = os.path.join(args.out, "tags.ptag")
    n = run_simulation(cfg, tags)
    report = run_analysis(tags, cfg, hist_dir=args.out)
    report.table.to_csv(os.path.join(args.out, "results.csv"))
    report.to_json(os.path.join(args.out, "report.json"))
    print(f"{args.preset}: {n} tags, {cfg.duration:g} s simulated")
    print(report.summary())


def cmd_dump_config(args):
    sys.stdout.write(dump_config(preset(args.preset)))


def build_parser():
    p = argparse.ArgumentParser(prog="antibunch",
                                description="Heralded single-photon antibunching simulator and analyzer")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a run and write a PTAG tag file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--duration", type=float)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="build the results table from a tag file")
    a.add_argument("--tags", required=True)
    a.add_argument("--config", required=True)
    a.add_argument("--report", required=True, help="results CSV (a .json report is written beside it)")
    a.add_argument("--hist-dir", required=True)
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("report", help="simulate and analyze a paper preset")
    r.add_argument("--preset", required=True, choices=sorted(PRESETS))
    r.add_argument("--out", required=True)
    r.add_argument("--duration", type=float)
    r.add_argument("--seed", type=int)
    r.set_defaults(func=cmd_report)

    d = sub.add_parser("dump-config", help="print a preset as a config file")
    d.add_argument("--preset", required=True, choices=sorted(PRESETS))
    d.set_defaults(func=cmd_dump_config)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, InvalidParameter) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FormatError, PreconditionError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0
