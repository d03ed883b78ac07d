"""Session files: line-oriented definitions and commands, plus reports.

Grammar, one statement per line (``#`` starts a comment)::

    vars N [name1 ... nameN]
    der NAME = <derivation expression>
    alg NAME = [<derivation expression>, ...]
    family KIND[:k=v,...] [as NAME]
    <command> [args]

Arguments are separated by commas at bracket depth zero; a line made only
of plain names may separate them by spaces instead (``centermod L I``).
Commands taking an algebra may omit it to use the most recent algebra.
An algebra named by ``alg`` stands for the Lie subalgebra its elements
generate.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from derlie import chains, families, liespan
from derlie.derivation import Derivation, d_apply, d_bracket
from derlie.errors import DerlieError
from derlie.parsing import ParseError, parse_derivation, parse_rational
from derlie.ratfield import VarContext

COMMANDS = (
    "bracket", "apply", "rank", "closure", "nilclass", "center", "centermod",
    "constants", "intersect", "chain", "verifychain", "family", "verifyfamily", "series",
    "set",
)

_IDENT = re.compile(r"[A-Za-z_]\w*$")


@dataclass
class Command:
    line: int
    name: str
    args: list[str]
    col: int = 1
    latest_alg: tuple | None = None  # (name, line) of the last algebra defined above


@dataclass
class AlgebraDef:
    name: str
    generators: list[Derivation]
    family: families.FamilySpec | None = None


@dataclass
class SessionFile:
    ctx: VarContext
    ders: dict[str, Derivation] = field(default_factory=dict)
    algs: dict[str, AlgebraDef] = field(default_factory=dict)
    commands: list[Command] = field(default_factory=list)


def split_args(text: str):
    """Split on top-level commas, returning ``(piece, offset)`` pairs."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    out = []
    for piece, off in parts:
        stripped = piece.strip()
        if stripped:
            out.append((stripped, off + len(piece) - len(piece.lstrip())))
    if len(out) == 1 and re.fullmatch(r"\w+(\s+\w+)+", out[0][0]):
        base = out[0][1]
        return [(m.group(0), base + m.start()) for m in re.finditer(r"\w+", out[0][0])]
    return out


def _split_list(text, line, col):
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError("expected a bracketed list [ ... ]", line, col)
    return [(p, col + 1 + off) for p, off in split_args(text[1:-1])]


def _statements(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            indent = len(line) - len(line.lstrip())
            yield lineno, line.strip(), indent + 1


def _header_context(stmts):
    early_def = False
    for lineno, line, col in stmts:
        word = line.split()[0]
        if word == "vars" and early_def:
            raise ParseError("'vars' must come before definitions", lineno, col)
        if word == "vars":
            parts = line.split()
            if len(parts) < 2 or not parts[1].isdigit():
                raise ParseError("vars needs a positive integer", lineno, col)
            n = int(parts[1])
            names = tuple(parts[2:])
            try:
                return VarContext(n, names)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col) from None
        if word in ("der", "alg"):
            early_def = True
    sizes = []
    for lineno, line, col in stmts:
        parts = line.split()
        if parts[0] in ("family", "verifyfamily") and len(parts) > 1:
            try:
                sizes.append(families.parse_family(parts[1]).nvars)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, col) from None
    return VarContext(max(sizes, default=3))


def parse_session(text: str) -> SessionFile:
    """Parse and resolve a session; raises ``ParseError`` at the first problem."""
    stmts = list(_statements(text))
    ctx = _header_context(stmts)
    s = SessionFile(ctx)
    seen_vars = False
    latest = None
    for lineno, line, col in stmts:
        word, _, rest = line.partition(" ")
        rest_col = col + len(word) + 1 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if word == "vars":
            if seen_vars:
                raise ParseError("duplicate vars header", lineno, col)
            seen_vars = True
            continue
        if word in ("der", "alg"):
            name, eq, body = rest.partition("=")
            name = name.strip()
            if not eq or not _IDENT.match(name):
                raise ParseError(f"expected '{word} NAME = ...'", lineno, rest_col)
            if name in s.ders or name in s.algs or name in ctx.names:
                raise ParseError(f"duplicate name {name!r}", lineno, rest_col)
            body_col = rest_col + len(rest) - len(body.lstrip())
            body = body.strip()
            if word == "der":
                s.ders[name] = parse_derivation(body, ctx, s.ders, lineno, body_col)
            else:
                items = _split_list(body, lineno, body_col)
                gens = [parse_derivation(p, ctx, s.ders, lineno, c) for p, c in items]
                s.algs[name] = AlgebraDef(name, gens)
                latest = (name, lineno)
            continue
        if word not in COMMANDS:
            raise ParseError(f"unknown command {word!r}", lineno, col)
        args = [p for p, _ in split_args(rest)] if rest else []
        if word in ("family", "verifyfamily"):
            args = rest.split()
            if not args:
                raise ParseError(f"{word} needs a family name", lineno, rest_col)
            try:
                spec = families.parse_family(args[0])
            except ValueError as exc:
                raise ParseError(str(exc), lineno, rest_col) from None
            if spec.nvars > ctx.n:
                raise ParseError("variable index out of range", lineno, rest_col)
            if word == "family":
                alias = spec.label() if len(args) == 1 else None
                if len(args) == 3 and args[1] == "as" and _IDENT.match(args[2]):
                    alias = args[2]
                if alias is None:
                    raise ParseError("expected 'family SPEC [as NAME]'", lineno, rest_col)
                if alias in s.ders or (alias in s.algs and s.algs[alias].family != spec):
                    raise ParseError(f"duplicate name {alias!r}", lineno, rest_col)
                s.algs[alias] = AlgebraDef(alias, [], spec)
                args = [args[0], alias]
                latest = (alias, lineno)
        s.commands.append(Command(lineno, word, args, col, latest))
    return s


# reports

@dataclass
class Record:
    cmd: str
    fields: list = field(default_factory=list)  # (key, value) pairs
    error: bool = False
    text: str = ""


@dataclass
class Report:
    records: list[Record] = field(default_factory=list)

    @property
    def exit_status(self):
        return 1 if any(r.error for r in self.records) else 0


def _encode(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    v = str(v)
    if v and re.fullmatch(r"[\w.:/+\-^*,()]+", v):
        return v
    return json.dumps(v, ensure_ascii=False)


def emit_report(report: Report, fmt: str = "machine") -> str:
    lines = []
    for r in report.records:
        if fmt == "machine":
            lines.append(" ".join([f"cmd={r.cmd}"] + [f"{k}={_encode(v)}" for k, v in r.fields]))
        else:
            lines.append(r.text or (r.cmd + ": " + ", ".join(f"{k} {v}" for k, v in r.fields)))
    return "\n".join(lines) + ("\n" if lines else "")


def _passfail(b):
    return "pass" if b else "fail"


def _basis_text(span):
    return "[" + ", ".join(str(b) for b in span.basis) + "]"


class _Indeterminate(DerlieError):
    def __init__(self, reason):
        super().__init__(f"closure indeterminate: {reason}")
        self.reason = reason


class Runner:
    def __init__(self, session: SessionFile, dim_cap=liespan.DEFAULT_DIM_CAP, depth_cap=liespan.DEFAULT_DEPTH_CAP):
        self.s = session
        self.ctx = session.ctx
        self.dim_cap = dim_cap
        self.depth_cap = depth_cap
        self.current = None  # (name, line)
        self._cmd = None
        self._spans = {}
        self._closures = {}
        self._sd = {}

    # algebra access

    def span(self, name):
        if name not in self._spans:
            a = self.s.algs[name]
            if a.family is not None:
                self._spans[name] = families.build_family(a.family, self.ctx)
            else:
                self._spans[name] = liespan.k_reduce(a.generators, self.ctx)
        return self._spans[name]

    def closure(self, name):
        if name not in self._closures:
            self._closures[name] = liespan.closure(self.span(name).basis, self.dim_cap, self.depth_cap, ctx=self.ctx)
        return self._closures[name]

    def structure(self, name):
        if name not in self._sd:
            out = self.closure(name)
            if not out.closed:
                raise _Indeterminate(out.reason)
            self._sd[name] = liespan.structure_constants(out.span)
        return self._sd[name]

    def algebra_arg(self, args, i=0):
        """Named algebra, else the one most recently defined or used above."""
        line = self._cmd.line if self._cmd else 0
        if len(args) > i:
            name = args[i]
        else:
            seen = [t for t in (self.current, self._cmd and self._cmd.latest_alg) if t]
            if not seen:
                raise DerlieError("no algebra given and none defined yet")
            name = max(seen, key=lambda t: t[1])[0]
        if name not in self.s.algs:
            raise DerlieError(f"unknown algebra {name!r}")
        self.current = (name, line)
        return name

    def der(self, text):
        return parse_derivation(text, self.ctx, self.s.ders)

    # commands

    def run(self) -> Report:
        report = Report()
        for c in self.s.commands:
            self._cmd = c
            try:
                report.records.extend(getattr(self, "cmd_" + c.name)(c.args))
            except _Indeterminate as exc:
                report.records.append(Record(c.name, [("status", "indeterminate"), ("reason", exc.reason), ("line", c.line)], True,
                                             f"{c.name}: indeterminate ({exc.reason}) at line {c.line}"))
            except (DerlieError, ValueError, IndexError) as exc:
                msg = str(exc)
                report.records.append(Record(c.name, [("status", "error"), ("line", c.line), ("message", msg)], True,
                                             f"{c.name}: error at line {c.line}: {msg}"))
        return report

    def _want(self, args, lo, hi=None):
        hi = lo if hi is None else hi
        if not lo <= len(args) <= hi:
            raise DerlieError(f"expected {lo}..{hi} arguments, got {len(args)}")

    def cmd_bracket(self, args):
        self._want(args, 2)
        v = d_bracket(self.der(args[0]), self.der(args[1]))
        return [Record("bracket", [("value", v)], text=f"[{args[0]}, {args[1]}] = {v}")]

    def cmd_apply(self, args):
        self._want(args, 2)
        v = d_apply(self.der(args[0]), parse_rational(args[1], self.ctx))
        return [Record("apply", [("value", v)], text=f"{args[0]}({args[1]}) = {v}")]

    def cmd_rank(self, args):
        self._want(args, 0, 1)
        name = self.algebra_arg(args)
        sd = self.structure(name)
        r = liespan.rank_R(sd.span)
        return [Record("rank", [("name", name), ("value", r)], text=f"rank_R {name} = {r}")]

    def cmd_closure(self, args):
        self._want(args, 0, 1)
        name = self.algebra_arg(args)
        out = self.closure(name)
        hist = ",".join(map(str, out.history))
        if not out.closed:
            return [Record("closure", [("status", "indeterminate"), ("reason", out.reason), ("name", name), ("history", hist)], True,
                           f"closure {name}: indeterminate ({out.reason}), dims {hist}")]
        added = out.span.dim - self.span(name).dim
        return [Record("closure", [("name", name), ("status", "closed"), ("dim", out.span.dim), ("added", added),
                                   ("iterations", out.iterations), ("history", hist)],
                       text=f"closure {name}: closed, dim {out.span.dim} (added {added}), dims {hist}")]

    def cmd_nilclass(self, args):
        self._want(args, 0, 1)
        name = self.algebra_arg(args)
        cls = liespan.nilpotency_class(self.structure(name))
        if cls is None:
            return [Record("nilclass", [("name", name), ("nilpotent", False)], text=f"{name}: not nilpotent")]
        return [Record("nilclass", [("name", name), ("nilpotent", True), ("value", cls)],
                       text=f"{name}: nilpotent of class {cls}")]

    def cmd_series(self, args):
        self._want(args, 0, 1)
        name = self.algebra_arg(args)
        sd = self.structure(name)
        lower = ",".join(str(t.dim) for t in liespan.lower_central_series(sd))
        derived = ",".join(str(t.dim) for t in liespan.derived_series(sd))
        return [Record("series", [("name", name), ("lower", lower), ("derived", derived)],
                       text=f"{name}: lower central dims {lower}; derived dims {derived}")]

    def cmd_center(self, args):
        self._want(args, 0, 1)
        name = self.algebra_arg(args)
        z = liespan.center(self.structure(name))
        return [Record("center", [("name", name), ("dim", z.dim), ("basis", _basis_text(z))],
                       text=f"Z({name}) = {_basis_text(z)}")]

    def cmd_centermod(self, args):
        self._want(args, 1, 2)
        name = self.algebra_arg(args if len(args) == 2 else [])
        ideal = args[-1]
        if ideal not in self.s.algs:
            raise DerlieError(f"unknown algebra {ideal!r}")
        z = liespan.center_mod(self.structure(name), self.span(ideal))
        return [Record("centermod", [("name", name), ("ideal", ideal), ("dim", z.dim), ("basis", _basis_text(z))],
                       text=f"preimage of Z({name}/{ideal}) = {_basis_text(z)}")]

    def cmd_constants(self, args):
        self._want(args, 1, 2)
        name = self.algebra_arg(args if len(args) == 2 else [])
        r = parse_rational(args[-1], self.ctx)
        v = liespan.constants_membership(self.structure(name).span, r)
        return [Record("constants", [("name", name), ("function", r), ("value", v)],
                       text=f"{r} {'is' if v else 'is not'} a constant of {name}")]

    def cmd_intersect(self, args):
        self._want(args, 1, 2)
        name = self.algebra_arg(args if len(args) == 2 else [])
        items = _split_list(args[-1], 1, 1)
        E = [self.der(p) for p, _ in items]
        out = chains.r_span_intersection(E, self.structure(name).span)
        return [Record("intersect", [("name", name), ("dim", out.dim), ("basis", _basis_text(out))],
                       text=f"R<E> ∩ {name} = {_basis_text(out)}")]

    def cmd_chain(self, args):
        self._want(args, 0, 1)
        name = self.algebra_arg(args)
        return chain_records(name, chains.theorem1_chain(self.structure(name)))

    def cmd_verifychain(self, args):
        self._want(args, 0, 1)
        name = self.algebra_arg(args)
        sd = self.structure(name)
        return verify_records(name, chains.verify_chain(sd, chains.theorem1_chain(sd)))

    def cmd_set(self, args):
        """``set dim_cap N`` or ``set depth_cap N``: caps for later closures."""
        self._want(args, 2)
        key, value = args
        if key not in ("dim_cap", "depth_cap") or not value.isdigit() or int(value) < 1:
            raise DerlieError("usage: set dim_cap|depth_cap <positive integer>")
        setattr(self, key, int(value))
        self._closures.clear()
        self._sd.clear()
        return [Record("set", [("key", key), ("value", int(value))], text=f"{key} = {value}")]

    def cmd_family(self, args):
        name = args[1]
        self.current = (name, self._cmd.line if self._cmd else 0)
        span = self.span(name)
        return [Record("family", [("name", name), ("dim", span.dim)], text=f"{name}: dim {span.dim}")]

    def cmd_verifyfamily(self, args):
        spec = families.parse_family(args[0])
        return family_records(families.verify_family_axioms(spec, self.ctx, self.dim_cap, self.depth_cap))


def chain_records(name, chain):
    out = []
    for s, step in enumerate(chain.steps, 1):
        out.append(Record("chain", [
            ("step", s), ("rank", step.rank), ("ideal", _passfail(step.ideal)),
            ("abelianq", _passfail(step.abelian_quotient)), ("central", _passfail(step.central)),
            ("name", name), ("dim", step.span.dim), ("generator", step.generator),
        ], text=f"{name} L_{s}: rank {step.rank}, dim {step.span.dim}, D_{s} = {step.generator}, "
                f"ideal {_passfail(step.ideal)}, abelian quotient {_passfail(step.abelian_quotient)}, "
                f"[L, D_{s}] in L_{s - 1} {_passfail(step.central)}"))
    return out


def verify_records(name, report):
    out = []
    for c in report.checks:
        fields = [("name", name), ("check", c.name), ("step", c.step), ("result", _passfail(c.passed))]
        if c.witness:
            fields.append(("witness", c.witness))
        text = f"{name} {c.name} step {c.step}: {_passfail(c.passed)}" + (f" ({c.witness})" if c.witness else "")
        out.append(Record("verifychain", fields, text=text))
    out.append(Record("verifychain", [("name", name), ("status", _passfail(report.ok)), ("top_dim_F", "not_machine_checked")],
                      text=f"{name}: chain {_passfail(report.ok)}; " + "; ".join(report.notes)))
    return out


def family_records(rep: families.FamilyReport):
    label = rep.spec.label()
    out = [Record("verifyfamily", [("family", label), ("axiom", a), ("result", _passfail(p))],
                  text=f"{label} {a}: {_passfail(p)}") for a, p in rep.axioms]
    cls = "none" if rep.nilpotency_class is None else rep.nilpotency_class
    out.append(Record("verifyfamily", [
        ("family", label), ("dim", rep.dim), ("closure", rep.closure_status), ("added", rep.closure_added),
        ("class", cls), ("rank", rep.rank), ("nominal_rank", rep.spec.nominal_rank),
        ("status", _passfail(rep.ok)), ("maximality", "not_machine_checked"),
    ], text=f"{label}: dim {rep.dim}, closure {rep.closure_status} (+{rep.closure_added}), class {cls}, "
            f"rank {rep.rank}/{rep.spec.nominal_rank}: {_passfail(rep.ok)}; maximality not machine-checked"))
    return out


def run_session(session: SessionFile, dim_cap=liespan.DEFAULT_DIM_CAP, depth_cap=liespan.DEFAULT_DEPTH_CAP) -> Report:
    return Runner(session, dim_cap, depth_cap).run()
