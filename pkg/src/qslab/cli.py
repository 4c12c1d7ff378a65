"""Command-line entry point: ``qslab <experiment> --config cfg.json`` or ``qslab selftest``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import QSLabError
from .experiments import EXPERIMENTS, ExperimentConfig, run

log = logging.getLogger("qslab")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qslab", description="Cellular automata on quasisturmian shifts.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in sorted(EXPERIMENTS):
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", help="flat JSON config file (defaults are used when omitted)")
        sp.add_argument("--out", help="output directory for report.json and series.csv")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--precision", type=int, help="comparison precision budget in bits")
    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--only", help="comma-separated criterion numbers")
    st.add_argument("--out", help="write selftest.json here")
    return ap


def _selftest(args) -> int:
    from .acceptance import run_all

    numbers = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_all(numbers)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {failed}" if failed else ""))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        payload = [{"criterion": r.number, "title": r.title, "passed": r.passed,
                    "seconds": round(r.seconds, 3), "detail": r.detail} for r in results]
        (out / "selftest.json").write_text(json.dumps(payload, indent=2, default=str) + "\n")
    return 0 if not failed else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "selftest":
        return _selftest(args)
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig(args.command)
        if cfg.experiment != args.command:
            print(f"qslab: config is for {cfg.experiment!r}, not {args.command!r}", file=sys.stderr)
            return 2
        if args.seed is not None:
            cfg.seed = args.seed
        if args.precision is not None:
            cfg.precision = args.precision
        log.info("running %s with %s", cfg.experiment, cfg.to_dict())
        report = run(cfg)
    except QSLabError as e:
        print(f"qslab: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    out = Path(args.out or cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    if report.series_csv is not None:
        (out / "series.csv").write_text(report.series_csv)
    for c in report.checks:
        tag = "PASS" if c.passed else ("FAIL" if c.gate else "info")
        print(f"[{tag}] {c.name}")
    print(f"report written to {out / 'report.json'}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
