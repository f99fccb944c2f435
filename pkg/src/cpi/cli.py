"""Command-line front end.

Subcommands: ``parse``, ``step``, ``bisim``, ``nonforward``, ``encode``.
Exit codes: 0 success, 1 syntax error, 2 confidential-fragment violation.
Set ``CPI_FRESH_START`` to an integer to pin the fresh-name counter for
reproducible output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bisim import check, law_suite
from .encoding import (
    SourceModeError, check_completeness, encode, encode_with_handlers,
)
from .lts import successors, tau_reachable
from .nonforward import (
    WitnessNotCpi, check_nonforwarding, static_guarantee, witness_check,
)
from .parser import CPI, PI, CpiSyntaxError, parse, render
from .syntax import (
    CpiViolation, SortError, set_fresh_origin, validate_cpi,
)

EXIT_OK = 0
EXIT_SYNTAX = 1
EXIT_VIOLATION = 2


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _add_common(sp: argparse.ArgumentParser, mode_default: str = CPI) -> None:
    sp.add_argument("--mode", choices=(CPI, PI), default=mode_default,
                    help="parse mode (default %(default)s)")
    sp.add_argument("--json", action="store_true", help="machine-readable output")
    sp.add_argument("--allow-reserved", action="store_true",
                    help="accept '#'-prefixed identifiers in the input")


def _parse_file(args, path: str):
    return parse(_read_source(path), mode=args.mode,
                 allow_reserved=args.allow_reserved)


def cmd_parse(args) -> int:
    p = _parse_file(args, args.file)
    report = validate_cpi(p)
    _emit(args, {"process": render(p), "validation": report.to_json()},
          render(p))
    return EXIT_OK


def cmd_step(args) -> int:
    from .syntax import chan

    p = _parse_file(args, args.file)
    env = tuple(chan(n) for n in args.env.split(",") if n) if args.env else ()
    trans = successors(p, env, include_inputs=not args.no_inputs)
    from .lts import render_action
    lines = [f"{render_action(t.action):30s} -> {render(t.target)}" for t in trans]
    _emit(args, {"process": render(p),
                 "transitions": [t.to_json() for t in trans]},
          "\n".join(lines) if lines else "(no transitions)")
    return EXIT_OK


def cmd_bisim(args) -> int:
    if args.laws:
        report = law_suite(args.seed, args.instances, args.depth)
        text = "\n".join(
            f"{r.name:28s} {'ok' if r.ok else 'FAILED'}"
            f"{' (expected failure)' if r.should_fail else ''}"
            for r in report.results)
        _emit(args, report.to_json(), text)
        return EXIT_OK
    if not args.file or not args.other:
        raise SystemExit("bisim needs two process files (or --laws)")
    p = _parse_file(args, args.file)
    q = _parse_file(args, args.other)
    verdict = check(p, q, args.depth)
    _emit(args, verdict.to_json(), verdict.describe())
    return EXIT_OK


def cmd_nonforward(args) -> int:
    p = _parse_file(args, args.file)
    if args.static:
        g = static_guarantee(p)
        _emit(args, g.to_json(),
              "guaranteed (confidential fragment)" if g.guaranteed
              else "not applicable: term is outside the confidential fragment")
        return EXIT_OK
    if args.witness:
        q = parse(_read_source(args.witness), mode=CPI,
                  allow_reserved=args.allow_reserved)
        ev = witness_check(p, q, args.depth)
        _emit(args, ev.to_json(),
              f"{'positive' if ev.positive else 'negative'} evidence at depth {ev.depth}")
        return EXIT_OK
    v = check_nonforwarding(p, args.depth)
    if v.satisfied:
        text = f"non-forwarding holds for all traces up to depth {v.depth}"
    else:
        from .lts import render_action
        steps = "; ".join(render_action(a) for a in v.violation.trace)
        text = (f"forwarding violation: channel {v.violation.channel.ident!r} "
                f"received at step {v.violation.receive_index}, "
                f"forwarded at step {v.violation.send_index} [{steps}]")
    _emit(args, v.to_json(), text)
    return EXIT_OK


def cmd_encode(args) -> int:
    p = _parse_file(args, args.file)
    if args.verify:
        report = check_completeness(p, tau_budget=args.tau, depth=args.depth)
        lines = [f"source: {render(report.source)}"]
        for r in report.results:
            if r.found:
                lines.append(f"  reduct {render(r.target)}: matched after "
                             f"{r.tau_steps} tau steps")
            else:
                lines.append(f"  reduct {render(r.target)}: NOT matched "
                             f"within budget {report.tau_budget}")
        lines.append("ok" if report.ok else "FAILED")
        _emit(args, report.to_json(), "\n".join(lines))
        return EXIT_OK
    enc = (encode_with_handlers(p, args.fresh_start) if args.with_handlers
           else encode(p, args.fresh_start))
    _emit(args, {"source": render(p), "encoded": render(enc),
                 "validation": validate_cpi(enc).to_json()},
          render(enc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cpi",
        description="Workbench for the confidential pi-calculus: parsing, "
                    "transitions, bounded bisimilarity, non-forwarding "
                    "analysis and the forwarding-free translation.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and pretty-print a process")
    sp.add_argument("file", help="source file, or '-' for stdin")
    _add_common(sp)
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("step", help="list the transitions of a process")
    sp.add_argument("file")
    sp.add_argument("--env", default="",
                    help="comma-separated extra channels for input instantiation")
    sp.add_argument("--no-inputs", action="store_true",
                    help="omit free input actions")
    _add_common(sp)
    sp.set_defaults(func=cmd_step)

    sp = sub.add_parser("bisim", help="bounded strong bisimilarity")
    sp.add_argument("file", nargs="?")
    sp.add_argument("other", nargs="?")
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--laws", action="store_true",
                    help="run the algebraic law suite instead")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--instances", type=int, default=25)
    _add_common(sp)
    sp.set_defaults(func=cmd_bisim)

    sp = sub.add_parser("nonforward", help="non-forwarding analysis")
    sp.add_argument("file")
    sp.add_argument("--depth", type=int, default=5)
    sp.add_argument("--static", action="store_true",
                    help="membership-based guarantee instead of trace search")
    sp.add_argument("--witness",
                    help="confidential witness file for bounded evidence")
    _add_common(sp, mode_default=PI)
    sp.set_defaults(func=cmd_nonforward)

    sp = sub.add_parser("encode", help="translate into the confidential fragment")
    sp.add_argument("file")
    sp.add_argument("--with-handlers", action="store_true",
                    help="compose with handlers for the free channels")
    sp.add_argument("--fresh-start", type=int, default=0)
    sp.add_argument("--verify", action="store_true",
                    help="check reduction completeness instead of printing")
    sp.add_argument("--tau", type=int, default=12,
                    help="tau budget for --verify")
    sp.add_argument("--depth", type=int, default=4,
                    help="bisimulation depth for --verify")
    _add_common(sp, mode_default=PI)
    sp.set_defaults(func=cmd_encode)
    return ap


def main(argv: list[str] | None = None) -> int:
    origin = os.environ.get("CPI_FRESH_START")
    if origin is not None:
        set_fresh_origin(int(origin))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CpiSyntaxError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        return EXIT_SYNTAX
    except (CpiViolation, SortError) as e:
        print(f"confidentiality violation: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except (SourceModeError, WitnessNotCpi, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SYNTAX


if __name__ == "__main__":
    raise SystemExit(main())
