"""Command-line front end.

Exit codes: 0 success, 1 contract violation (a report is still written),
2 parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .certificate import replay, run
from .errors import ParhodgeError
from .serialize import ParseError, Problem, dumps

COMMANDS = (
    "normalize",
    "pcurv",
    "invariants",
    "nahc",
    "nahc-inv",
    "parahoric-check",
    "lift",
    "descend",
    "classify-flat",
)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="parhodge", description="Local tame nonabelian Hodge computations in characteristic p.")
    ap.add_argument("--max-extension-degree", type=int, default=None, help="cap on splitting-field degree")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input")
        sp.add_argument("-o", "--output", default=None)
        sp.add_argument("--precision", type=int, default=None)
    sp = sub.add_parser("selftest")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cases", type=int, default=100)
    sp.add_argument("-o", "--output", default=None)
    sp = sub.add_parser("replay", help="re-check a certificate file")
    sp.add_argument("input")
    sp.add_argument("-o", "--output", default=None)
    return ap


def _emit(doc: dict, path: str | None) -> None:
    text = dumps(doc)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_doc(exc: Exception, command: str) -> dict:
    doc = {"command": command, "error": type(exc).__name__, "message": str(exc)}
    for attr in ("violations", "violation", "exponent", "entry", "tau", "report"):
        val = getattr(exc, attr, None)
        if val not in (None, (), []):
            doc[attr] = json.loads(json.dumps(val, default=str))
    return doc


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.max_extension_degree is not None:
        os.environ["PARHODGE_MAX_M"] = str(args.max_extension_degree)
    out = getattr(args, "output", None)
    if args.command == "selftest":
        from .selftest import selftest

        report, code = selftest(args.seed, args.cases)
        _emit(report, out)
        return code
    if args.command == "replay":
        try:
            with open(args.input, encoding="utf-8") as fh:
                cert = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _emit({"command": "replay", "error": "ParseError", "message": str(exc)}, out)
            return 2
        ok, msg = replay(cert)
        _emit({"command": "replay", "replay": "ok" if ok else "failed", "message": msg}, out)
        return 0 if ok else 1
    try:
        prob = Problem.load(args.input, args.precision)
    except ParhodgeError as exc:
        _emit(_error_doc(exc, args.command), out)
        return 2
    try:
        doc, code = run(args.command, prob)
    except ParseError as exc:
        _emit(_error_doc(exc, args.command), out)
        return 2
    except ParhodgeError as exc:
        _emit(_error_doc(exc, args.command), out)
        return 1
    _emit(doc, out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
