"""Command-line entry point ``derlie``."""
from __future__ import annotations

import argparse
import sys

from derlie import chains, families, liespan
from derlie.parsing import ParseError
from derlie.session import (
    Record,
    Report,
    Runner,
    chain_records,
    emit_report,
    family_records,
    parse_session,
    run_session,
    verify_records,
)


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _parse_or_report(path, fmt):
    try:
        return parse_session(_read(path)), None
    except ParseError as exc:
        rep = Report([Record("parse", [("status", "error"), ("line", exc.line), ("col", exc.col), ("message", exc.msg)],
                             True, f"{path}:{exc.line}:{exc.col}: {exc.msg}")])
        return None, rep


def cmd_run(args):
    session, failed = _parse_or_report(args.file, args.format)
    report = failed or run_session(session, args.dim_cap, args.depth_cap)
    sys.stdout.write(emit_report(report, args.format))
    return report.exit_status


def cmd_family(args):
    try:
        spec = families.parse_family(args.spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.check:
        rep = families.verify_family_axioms(spec, dim_cap=args.dim_cap, depth_cap=args.depth_cap)
        report = Report(family_records(rep))
        sys.stdout.write(emit_report(report, args.format))
        return 0 if rep.ok else 1
    span = families.build_family(spec)
    recs = [Record("family", [("name", spec.label()), ("index", i), ("element", b)], text=str(b))
            for i, b in enumerate(span.basis)]
    sys.stdout.write(emit_report(Report(recs), args.format))
    return 0


def cmd_chain(args):
    session, failed = _parse_or_report(args.file, args.format)
    if failed:
        sys.stdout.write(emit_report(failed, args.format))
        return 1
    if args.algebra not in session.algs:
        print(f"error: unknown algebra {args.algebra!r}", file=sys.stderr)
        return 2
    session.commands = []
    runner = Runner(session, args.dim_cap, args.depth_cap)
    report = Report()
    try:
        sd = runner.structure(args.algebra)
        chain = chains.theorem1_chain(sd)
        report.records.extend(chain_records(args.algebra, chain))
        report.records.extend(verify_records(args.algebra, chains.verify_chain(sd, chain)))
    except Exception as exc:  # report every failure as a record
        report.records.append(Record("chain", [("status", "error"), ("message", str(exc))], True, f"chain: error: {exc}"))
    sys.stdout.write(emit_report(report, args.format))
    return report.exit_status


def build_parser():
    p = argparse.ArgumentParser(prog="derlie", description="Lie algebras of derivations over rational function fields.")
    sub = p.add_subparsers(dest="command", required=True)

    def caps(sp):
        sp.add_argument("--dim-cap", type=int, default=liespan.DEFAULT_DIM_CAP)
        sp.add_argument("--depth-cap", type=int, default=liespan.DEFAULT_DEPTH_CAP)
        sp.add_argument("--format", choices=("text", "machine"), default="text")

    run = sub.add_parser("run", help="execute a session file")
    run.add_argument("file")
    caps(run)
    run.set_defaults(func=cmd_run)

    fam = sub.add_parser("family", help="build a classified family, e.g. thm2t3:k=2,m=2")
    fam.add_argument("spec")
    fam.add_argument("--check", action="store_true", help="verify axioms, closure, nilpotency and rank")
    caps(fam)
    fam.set_defaults(func=cmd_family)

    ch = sub.add_parser("chain", help="build and verify the ideal chain of an algebra in a session file")
    ch.add_argument("file")
    ch.add_argument("--algebra", required=True)
    caps(ch)
    ch.set_defaults(func=cmd_chain)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
