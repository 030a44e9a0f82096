"""Command line entry point: ``wavecrit <command> --config FILE --out DIR [--jobs N]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .harness import (
    EXIT_OK,
    EXIT_VALIDATION,
    OUT_ENV,
    Scenario,
    ScenarioError,
    default_out_root,
    run,
    sweep,
)

COMMANDS = {
    "exponents": "exponents",
    "classify": "classify",
    "transform": "transform",
    "solve-linear": "linear",
    "solve-picard": "picard",
    "solve-fd": "fd",
    "blowup-ode": "ode-lemma",
    "verify-estimates": "verify",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wavecrit", description=__doc__)
    ap.add_argument("--version", action="version", version=f"wavecrit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["sweep"]:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=name not in ("exponents",), help="TOML scenario file")
        sp.add_argument("--out", default=None, help=f"output root (default ${OUT_ENV} or ./wavecrit-runs)")
        sp.add_argument("--jobs", type=int, default=1, help="parallel scenarios for sweep")
        sp.add_argument("--no-resume", action="store_true", help="recompute even if a finished run exists")
        sp.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out_root = args.out or default_out_root()
    try:
        if args.command == "sweep":
            base = Scenario.from_toml(args.config)
            results, summary = sweep(base, out_root=out_root, jobs=max(1, args.jobs))
            failed = [r for r in results if r["status"] != "ok"]
            print(json.dumps({"runs": len(results), "failed": len(failed), "summary": str(summary)}))
            return EXIT_OK
        solver = COMMANDS[args.command]
        if args.config is None:
            sc = Scenario.from_dict({"name": args.command}, solver)
        else:
            sc = Scenario.from_toml(args.config, solver)
    except ScenarioError as exc:
        print(json.dumps({"status": "validation", "errors": [list(p) for p in exc.problems]}), file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(json.dumps({"status": "validation", "errors": [["config", str(exc)]]}), file=sys.stderr)
        return EXIT_VALIDATION
    m = run(sc, out_root, resume=not args.no_resume)
    print(json.dumps({"status": m.status, "run_dir": m.run_dir, "outputs": m.outputs,
                      "measurements": m.measurements, "verdicts": m.verdicts, "error": m.error}))
    return m.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
