"""``granflow`` command line: ``run``, ``compare`` and ``verify``.

Exit codes: 0 success, 1 validation error (bad scenario or arguments),
2 runtime error (instability, IO failure, or a failed verification check).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from ..errors import GranflowError, InvalidInput, ScenarioError
from .driver import ModelRunError, run_compare, run_to_directory
from .scenario import load_scenario

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("granflow")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="granflow", description="Depth-averaged granular flow simulator.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and write fields.csv and diagnostics.csv")
    r.add_argument("scenario", type=Path)
    r.add_argument("--out", type=Path, help="output directory (overrides [output] directory)")

    c = sub.add_parser("compare", help="run Savage-Hutter and mu(I) side by side")
    c.add_argument("scenario", type=Path)
    c.add_argument("--out", type=Path, help="output directory (overrides [output] directory)")

    v = sub.add_parser("verify", help="run acceptance suites and print a pass/fail table")
    v.add_argument("suite", nargs="*", default=["all"], help="suite names or 'all'")
    v.add_argument("--out", type=Path, help="also write verify.csv to this directory")
    return p


def _is_validation(exc: BaseException) -> bool:
    if isinstance(exc, ModelRunError):
        return _is_validation(exc.__cause__)
    return isinstance(exc, (ScenarioError, InvalidInput, FileNotFoundError, IsADirectoryError))


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    out = args.out if args.out is not None else Path(scenario.output_dir)
    diags = run_to_directory(scenario, out)
    last = diags[-1]
    print(f"{scenario.name}: {len(diags)} frames to t = {last.t:g} s, mass {last.mass:.6e}, "
          f"written to {out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    out = run_compare(scenario, args.out)
    print(f"{scenario.name}: comparison written to {out}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from . import verification

    names = None if args.suite in ([], ["all"]) else args.suite
    unknown = [n for n in (names or []) if n not in verification.SUITES]
    if unknown:
        print(f"error: unknown suite(s) {', '.join(unknown)}; choose from "
              f"{', '.join(verification.SUITES)} or all", file=sys.stderr)
        return EXIT_VALIDATION
    results = verification.run_suites(names)
    for r in results:
        print(r.line())
    npass = sum(r.passed for r in results)
    print(f"{npass}/{len(results)} passed")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        with open(args.out / "verify.csv", "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["suite", "passed", "seconds", "detail"])
            for r in results:
                w.writerow([r.name, int(r.passed), f"{r.seconds:.3f}", r.detail])
    return EXIT_OK if npass == len(results) else EXIT_RUNTIME


COMMANDS = {"run": _cmd_run, "compare": _cmd_compare, "verify": _cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (GranflowError, OSError) as exc:
        code = EXIT_VALIDATION if _is_validation(exc) else EXIT_RUNTIME
        kind = "validation error" if code == EXIT_VALIDATION else "runtime error"
        print(f"{kind}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
