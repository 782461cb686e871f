"""Command line: ``subshift generate | analyze <experiment> | report``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import EXPERIMENTS, load_config, parse_generator, _int
from .errors import ConfigError, SubshiftError
from .experiments import run
from .generators import generate, write_word
from .report import csv_text, load_report, emit_csv

ENV_OUT = "SUBSHIFT_OUT"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI file of record")
    p.add_argument("--sample", help="read the sample word from a text file")
    p.add_argument("--generator", help="fibonacci, thue-morse, sturmian[:alpha[:rho]], periodic:<base>, "
                                       "block-doubling, substitution:<a->ab,b->a>")
    p.add_argument("--length", help="sample length")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subshift", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per stage")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a sample word to a text file")
    _add_common(g)
    g.add_argument("--out", required=True, help="output file")

    a = sub.add_parser("analyze", help="run one experiment")
    a.add_argument("experiment", choices=EXPERIMENTS)
    _add_common(a)
    a.add_argument("--scales", help="comma list or 2^a..2^b")
    a.add_argument("--fn-scales", dest="fn_scales", help="lengths n for F^(n) (subadditive)")
    a.add_argument("--window", help="window length L")
    a.add_argument("--maxlen", help="largest factor length")
    a.add_argument("--word", help="the word v of the function")
    a.add_argument("--words", help="comma list of words (set-failure)")
    a.add_argument("--function", help="occ:<v>, letters, neg-disjoint:<v>, length, indicator:<window>, constant")
    a.add_argument("--starts", help="number of Birkhoff start positions")
    a.add_argument("--seed", help="seed for Birkhoff start positions")
    a.add_argument("--out", dest="out_dir", help=f"output directory (default ${ENV_OUT} or ./subshift-out)")
    fmt = a.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="formats", action="store_const", const=("json",))
    fmt.add_argument("--csv", dest="formats", action="store_const", const=("csv",))
    fmt.add_argument("--both", dest="formats", action="store_const", const=("csv", "json"))
    a.add_argument("--threshold", action="append", metavar="NAME=VALUE", help="override a verdict threshold")

    r = sub.add_parser("report", help="summarize a JSON report")
    r.add_argument("report", help="JSON report written by analyze")
    r.add_argument("--csv", dest="csv_out", help="re-emit the CSV to this path ('-' for stdout)")
    return parser


def cmd_generate(args) -> int:
    if args.config:
        cfg = load_config(args.config, {"sample": args.sample, "generator": args.generator,
                                        "length": args.length, "experiment": "diagnostics"})
        spec = cfg.generator
    else:
        length = _int(args.length) if args.length else None
        spec = parse_generator(f"file:{args.sample}" if args.sample else (args.generator or "fibonacci"),
                               length or (None if args.sample else 100_000))
    sample = generate(spec)
    try:
        write_word(sample.word, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror or exc}", file=sys.stderr)
        return 3
    print(f"{args.out}: {len(sample.word)} symbols ({sample.description})")
    return 0


def cmd_analyze(args) -> int:
    overrides = {k: getattr(args, k) for k in ("sample", "generator", "length", "scales", "fn_scales",
                                               "window", "maxlen", "word", "words", "function", "starts",
                                               "seed", "out_dir", "formats", "threshold", "experiment")}
    overrides["default_out"] = os.environ.get(ENV_OUT)
    cfg = load_config(args.config, overrides)
    env = run(cfg)
    for v in env.verdicts:
        state = "pass" if v["passed"] else "fail"
        print(f"{v['name']}: {state} (value {v['value']:.6g} {v['comparison']} {v['threshold']:.6g})")
    print(f"wrote {cfg.out_dir}/{cfg.experiment}.{{{','.join(cfg.formats)}}}")
    return 0


def cmd_report(args) -> int:
    try:
        env = load_report(args.report)
    except (OSError, ValueError, TypeError) as exc:
        raise ConfigError(f"report: cannot read {args.report}: {exc}") from None
    print(f"{env.experiment} on {env.sample.get('description')} (length {env.sample.get('length')})")
    for v in env.verdicts:
        print(f"  {v['name']:<24} {'pass' if v['passed'] else 'fail'}  "
              f"{v['value']:.6g} {v['comparison']} {v['threshold']:.6g}")
    for k, val in env.diagnostics.items():
        print(f"  {k:<24} {val}")
    if args.csv_out == "-":
        sys.stdout.write(csv_text(env))
    elif args.csv_out:
        emit_csv(env, Path(args.csv_out))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s", stream=sys.stderr)
    handlers = {"generate": cmd_generate, "analyze": cmd_analyze, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except SubshiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
