"""Model files: ``key = value`` lines describing a real hypersurface rho = 0.

Keys: ``name``, ``claim``, ``n``, ``order``, ``rho`` (required), ``point``
(repeatable, comma-separated coordinates w, z1, ...), ``weights``
(repeatable), ``diagnostics`` (on/off), ``expect.<key>`` or
``expect.<key>@<point index>`` (fixture expectations).  ``#`` starts a
comment; an indented line continues the previous value.

Expression grammar::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('+' | '-') unary | power
    power := atom ('^' INT)?
    atom  := NUMBER | 'i' | VAR | ('conj' | 'Re' | 'Im') '(' expr ')' | '(' expr ')'

with VAR among w, z1, ..., z{n-1}.  Division is by nonzero constants only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from .exact import I, GaussianRational, gr
from .geometry import GeometryError, Hypersurface
from .poly import DEFAULT_ORDER, PolyExpr, Ring, ambient_ring


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise SpecError(f"unexpected character {ch!r}", None, m.start(3) + 1)
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        # conjugate variables are written conj(x)
        self.names = {lab: k for k, lab in enumerate(ring.labels) if not lab.startswith("conj(")}
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise SpecError(msg, None, tok[2] + 1)

    def expect(self, value):
        t = self.take()
        if t[1] != value or t[0] not in ("op",):
            self.fail(f"expected {value!r}", t)
        return t

    def parse(self) -> PolyExpr:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def parse_list(self) -> list[PolyExpr]:
        items = [self.expr()]
        while self.peek()[1] == "," and self.peek()[0] == "op":
            self.take()
            items.append(self.expr())
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return items

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            t = self.unary()
            if tok[1] == "*":
                e = e * t
            else:
                if t.variables_used() or t.is_zero():
                    self.fail("division only by nonzero constants", tok)
                e = e.scale(t.constant().inverse())
        return e

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            e = self.unary()
            return -e if t[1] == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "num" or not t[1].isdigit():
                self.fail("exponent must be a nonnegative integer", t)
            return base ** int(t[1])
        return base

    def atom(self):
        t = self.take()
        r = self.ring
        if t[0] == "num":
            return PolyExpr.const(r, gr(Fraction(t[1])))
        if t[0] == "id":
            name = t[1]
            if name == "i":
                return PolyExpr.const(r, I)
            if name in ("conj", "Re", "Im"):
                self.expect("(")
                e = self.expr()
                self.expect(")")
                if name == "conj":
                    return e.conjugate()
                if name == "Re":
                    return (e + e.conjugate()).scale(Fraction(1, 2))
                return (e - e.conjugate()).scale(GaussianRational(0, Fraction(-1, 2)))
            if name in self.names:
                return PolyExpr.var(r, self.names[name])
            self.fail(f"unknown name {name!r} (variables are {', '.join(self.names)})", t)
        if t[0] == "op" and t[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected a number, variable or '('", t)


def parse_expression(text: str, n: int) -> PolyExpr:
    return _Parser(text, ambient_ring(n)).parse()


def parse_polynomial(text: str, ring: Ring) -> PolyExpr:
    """Parse over any ring whose conjugate variables are labelled ``conj(x)``."""
    return _Parser(text, ring).parse()


def parse_coordinates(text: str, n: int) -> tuple:
    vals = _Parser(text, ambient_ring(n)).parse_list()
    out = []
    for v in vals:
        if v.variables_used():
            raise SpecError("coordinates must be constants")
        out.append(v.constant())
    return tuple(out)


@dataclass
class HypersurfaceSpec:
    n: int
    rho: PolyExpr
    name: str = ""
    claim: str = ""
    order: int = DEFAULT_ORDER
    points: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    expect: dict = field(default_factory=dict)
    diagnostics: bool = False

    def hypersurface(self) -> Hypersurface:
        return Hypersurface(self.rho, self.name, self.order)

    def render(self) -> str:
        """Canonical text; parsing it returns an equal spec."""
        lines = []
        if self.name:
            lines.append(f"name = {self.name}")
        if self.claim:
            lines.append(f"claim = {self.claim}")
        lines.append(f"n = {self.n}")
        lines.append(f"order = {self.order}")
        lines.append(f"rho = {self.rho.render()}")
        for p in self.points:
            lines.append("point = " + ", ".join(_render_scalar(x) for x in p))
        for wt in self.weights:
            lines.append("weights = " + ", ".join(str(x) for x in wt))
        if self.diagnostics:
            lines.append("diagnostics = on")
        for k in sorted(self.expect):
            lines.append(f"expect.{k} = {self.expect[k]}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (isinstance(other, HypersurfaceSpec) and self.n == other.n and self.rho == other.rho
                and self.name == other.name and self.claim == other.claim and self.order == other.order
                and [tuple(p) for p in self.points] == [tuple(p) for p in other.points]
                and self.weights == other.weights and self.expect == other.expect
                and self.diagnostics == other.diagnostics)


def _render_scalar(x) -> str:
    s = gr(x).render()
    return f"({s})" if ("+" in s[1:] or "-" in s[1:]) else s


def _logical_lines(text: str):
    out: list[list] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if raw[:1] in (" ", "\t") and out:
            out[-1][1] += " " + body.strip()
            continue
        out.append([lineno, body.rstrip()])
    return out


_KNOWN = {"name", "claim", "n", "order", "rho", "point", "weights", "diagnostics"}


def parse_spec(text: str) -> HypersurfaceSpec:
    entries = []
    for lineno, body in _logical_lines(text):
        if "=" not in body:
            raise SpecError("expected 'key = value'", lineno, 1)
        key, value = body.split("=", 1)
        key = key.strip()
        col = len(body) - len(body.split("=", 1)[1].lstrip()) + 1
        if key not in _KNOWN and not key.startswith("expect."):
            raise SpecError(f"unknown key {key!r}", lineno, 1)
        entries.append((lineno, key, value.strip(), col))
    keys = [e[1] for e in entries]
    for k in ("n", "rho"):
        if k not in keys:
            raise SpecError(f"missing required key {k!r}")
    n_line = next(e for e in entries if e[1] == "n")
    try:
        n = int(n_line[2])
    except ValueError:
        raise SpecError("n must be an integer", n_line[0], n_line[3]) from None
    if n < 2:
        raise SpecError("n must be at least 2", n_line[0], n_line[3])
    spec = HypersurfaceSpec(n, PolyExpr.zero(ambient_ring(n)))
    for lineno, key, value, col in entries:
        try:
            if key == "name":
                spec.name = value
            elif key == "claim":
                spec.claim = value
            elif key == "order":
                spec.order = int(value)
                if spec.order < 3:
                    raise SpecError("order must be at least 3")
            elif key == "rho":
                spec.rho = parse_expression(value, n)
            elif key == "point":
                pt = parse_coordinates(value, n)
                if len(pt) != n:
                    raise SpecError(f"a point has {n} coordinates (w, z1, ...)")
                spec.points.append(pt)
            elif key == "diagnostics":
                if value.lower() not in ("on", "off", "yes", "no", "true", "false"):
                    raise SpecError("diagnostics is on or off")
                spec.diagnostics = value.lower() in ("on", "yes", "true")
            elif key == "weights":
                spec.weights.append(tuple(Fraction(x.strip()) for x in value.split(",")))
            elif key.startswith("expect."):
                spec.expect[key[len("expect."):]] = value
        except SpecError as exc:
            c = col if exc.col is None else col + exc.col - 1
            raise SpecError(exc.message, lineno, c) from None
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(str(exc), lineno, col) from None
    rho_line = next(e for e in entries if e[1] == "rho")
    if spec.rho.conjugate() != spec.rho:
        raise SpecError("defining expression is not real", rho_line[0], rho_line[3])
    try:
        h = spec.hypersurface()
    except GeometryError as exc:
        raise SpecError(str(exc), rho_line[0], rho_line[3]) from None
    for k, pt in enumerate(spec.points):
        if not h.contains(pt):
            line = [e for e in entries if e[1] == "point"][k][0]
            raise SpecError("point is not on the hypersurface", line, 1)
    return spec


def load_spec(path) -> HypersurfaceSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())
