"""Sparse polynomials and truncated jets over Q(i).

A :class:`PolyExpr` lives in a :class:`Ring` of formal variables closed
under a conjugation permutation.  Barred variables are independent
symbols; reality means being fixed by :meth:`PolyExpr.conjugate`.

Truncation is tracked explicitly: ``prec`` is ``None`` for an exact
polynomial, otherwise every monomial of total degree ``>= prec`` is
unknown and has been dropped.  Products, derivatives and series
inversion propagate ``prec`` so that a value extracted at the origin is
guaranteed exact or an error is raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from operator import add
from typing import Callable, Iterable, Mapping, Sequence

from .exact import ONE, ZERO, GaussianRational, gr

DEFAULT_ORDER = 6

Exp = tuple


@dataclass(frozen=True)
class VarId:
    """Coordinate label: kind in {'W', 'Wbar', 'Z', 'Zbar', 'U'} and index j for Z/Zbar."""

    kind: str
    j: int = 0

    def conj(self) -> "VarId":
        swap = {"W": "Wbar", "Wbar": "W", "Z": "Zbar", "Zbar": "Z", "U": "U"}
        return VarId(swap[self.kind], self.j)


W, WBAR, U = VarId("W"), VarId("Wbar"), VarId("U")


def Z(j: int) -> VarId:
    return VarId("Z", j)


def ZBAR(j: int) -> VarId:
    return VarId("Zbar", j)


class Ring:
    """Ordered variable set with a conjugation permutation.

    ``holo`` and ``anti`` list the indices counted in bidegrees; other
    variables (w, wbar, u, ...) are spectators of bidegree (0, 0).
    """

    _interned: dict = {}

    def __new__(cls, names, conj_perm, holo=(), anti=(), labels=None, ids=None):
        # one instance per layout, so identity checks survive pickling into worker processes
        key = (tuple(names), tuple(conj_perm), tuple(holo), tuple(anti),
               tuple(labels) if labels else None, tuple(ids) if ids else None)
        ring = cls._interned.get(key)
        if ring is None:
            ring = super().__new__(cls)
            ring._key = key
            cls._interned[key] = ring
        return ring

    def __reduce__(self):
        return (Ring, self._key)

    def __init__(self, names: Sequence[str], conj_perm: Sequence[int], holo=(), anti=(), labels=None, ids=None):
        if hasattr(self, "nvars"):
            return
        self.names = tuple(names)
        self.nvars = len(self.names)
        self.conj_perm = tuple(conj_perm)
        self.holo = tuple(holo)
        self.anti = tuple(anti)
        self.labels = tuple(labels) if labels else self.names
        self.ids = tuple(ids) if ids else ()
        self._index = {name: k for k, name in enumerate(self.names)}
        for k, label in enumerate(self.labels):
            self._index.setdefault(label, k)
        for k, vid in enumerate(self.ids):
            self._index[vid] = k

    def index(self, var) -> int:
        if isinstance(var, int):
            return var
        try:
            return self._index[var]
        except KeyError:
            raise KeyError(f"unknown variable {var!r}") from None

    def zero_exp(self) -> Exp:
        return (0,) * self.nvars

    def unit_exp(self, k: int) -> Exp:
        e = [0] * self.nvars
        e[k] = 1
        return tuple(e)

    def conj_exp(self, e: Exp) -> Exp:
        out = [0] * self.nvars
        for k, x in enumerate(e):
            if x:
                out[self.conj_perm[k]] = x
        return tuple(out)

    def __repr__(self):
        return f"Ring({', '.join(self.labels)})"


@lru_cache(maxsize=None)
def ambient_ring(n: int) -> Ring:
    """Variables w, z1..z_{n-1}, wbar, zbar1..zbar_{n-1}."""
    m = n - 1
    names = ["w"] + [f"z{j}" for j in range(1, n)] + ["wbar"] + [f"zbar{j}" for j in range(1, n)]
    labels = ["w"] + [f"z{j}" for j in range(1, n)] + ["conj(w)"] + [f"conj(z{j})" for j in range(1, n)]
    ids = [W] + [Z(j) for j in range(1, n)] + [WBAR] + [ZBAR(j) for j in range(1, n)]
    perm = [k + n for k in range(n)] + [k for k in range(n)]
    holo = list(range(1, n))
    anti = list(range(n + 1, 2 * n))
    assert len(holo) == m
    return Ring(names, perm, holo, anti, labels, ids)


@lru_cache(maxsize=None)
def graph_ring(n: int) -> Ring:
    """Variables z1..z_{n-1}, zbar1..zbar_{n-1}, u (u = Im w)."""
    m = n - 1
    names = [f"z{j}" for j in range(1, n)] + [f"zbar{j}" for j in range(1, n)] + ["u"]
    labels = [f"z{j}" for j in range(1, n)] + [f"conj(z{j})" for j in range(1, n)] + ["u"]
    ids = [Z(j) for j in range(1, n)] + [ZBAR(j) for j in range(1, n)] + [U]
    perm = [k + m for k in range(m)] + [k for k in range(m)] + [2 * m]
    return Ring(names, perm, range(m), range(m, 2 * m), labels, ids)


@lru_cache(maxsize=None)
def vector_ring(m: int, prefix: str = "v") -> Ring:
    """Variables v1..v_m, vbar1..vbar_m used for polynomial identities in a vector."""
    names = [f"{prefix}{j}" for j in range(1, m + 1)] + [f"{prefix}bar{j}" for j in range(1, m + 1)]
    labels = [f"{prefix}{j}" for j in range(1, m + 1)] + [f"conj({prefix}{j})" for j in range(1, m + 1)]
    perm = [k + m for k in range(m)] + [k for k in range(m)]
    return Ring(names, perm, range(m), range(m, 2 * m), labels)


def _min_prec(*ps):
    vals = [p for p in ps if p is not None]
    return min(vals) if vals else None


def _add_exp(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


class PolyExpr:
    """Sparse polynomial (or truncated jet) over Q(i)."""

    __slots__ = ("ring", "terms", "prec")

    def __init__(self, ring: Ring, terms: Mapping[Exp, GaussianRational] | None = None, prec: int | None = None):
        self.ring = ring
        self.prec = prec
        clean = {}
        if terms:
            for e, c in terms.items():
                c = gr(c)
                if c and (prec is None or sum(e) < prec):
                    clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def _wrap(cls, ring, terms, prec):
        obj = object.__new__(cls)
        obj.ring, obj.terms, obj.prec = ring, terms, prec
        return obj

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, ring: Ring, c) -> "PolyExpr":
        return cls(ring, {ring.zero_exp(): gr(c)})

    @classmethod
    def zero(cls, ring: Ring, prec: int | None = None) -> "PolyExpr":
        return cls._wrap(ring, {}, prec)

    @classmethod
    def var(cls, ring: Ring, name) -> "PolyExpr":
        return cls._wrap(ring, {ring.unit_exp(ring.index(name)): ONE}, None)

    @classmethod
    def monomial(cls, ring: Ring, exp: Exp, c=1) -> "PolyExpr":
        return cls(ring, {tuple(exp): gr(c)})

    # inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> int | None:
        """Lowest total degree of a stored term (None for zero)."""
        if not self.terms:
            return None
        return min(sum(e) for e in self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def coeff(self, exp: Exp) -> GaussianRational:
        return self.terms.get(tuple(exp), ZERO)

    def constant(self) -> GaussianRational:
        """Value at the origin; exact by construction of ``prec``."""
        if self.prec is not None and self.prec < 1:
            raise ArithmeticError("value at the origin is beyond the known jet order")
        return self.terms.get(self.ring.zero_exp(), ZERO)

    def linear_coeff(self, var) -> GaussianRational:
        if self.prec is not None and self.prec < 2:
            raise ArithmeticError("first derivative at the origin is beyond the known jet order")
        return self.terms.get(self.ring.unit_exp(self.ring.index(var)), ZERO)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def is_exact(self) -> bool:
        return self.prec is None

    def variables_used(self) -> set[int]:
        return {k for e in self.terms for k, x in enumerate(e) if x}

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "PolyExpr"):
        if other.ring is not self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _lift(self, other) -> "PolyExpr | None":
        if isinstance(other, PolyExpr):
            self._check(other)
            return other
        try:
            c = gr(other)
        except (TypeError, ValueError):
            return None
        return PolyExpr._wrap(self.ring, {self.ring.zero_exp(): c} if c else {}, None)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        prec = _min_prec(self.prec, o.prec)
        terms = dict(self.terms) if prec is None else {e: c for e, c in self.terms.items() if sum(e) < prec}
        for e, c in o.terms.items():
            if prec is not None and sum(e) >= prec:
                continue
            s = terms.get(e)
            s = c if s is None else s + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return PolyExpr._wrap(self.ring, terms, prec)

    __radd__ = __add__

    def __neg__(self):
        return PolyExpr._wrap(self.ring, {e: -c for e, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "PolyExpr":
        c = gr(c)
        if not c:
            return PolyExpr._wrap(self.ring, {}, self.prec)
        return PolyExpr._wrap(self.ring, {e: x * c for e, x in self.terms.items()}, self.prec)

    def __mul__(self, other):
        if not isinstance(other, PolyExpr):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        self._check(other)
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: "PolyExpr", order: int | None = None) -> "PolyExpr":
        """Product, truncated below ``order`` (if given) and the propagated precision."""
        va, vb = self.valuation(), other.valuation()
        cands = [order]
        if self.prec is not None:
            cands.append(self.prec + (vb if vb is not None else self.prec))
        if other.prec is not None:
            cands.append(other.prec + (va if va is not None else other.prec))
        prec = _min_prec(*cands)
        if va is None or vb is None:
            return PolyExpr._wrap(self.ring, {}, prec)
        by_deg_b: dict[int, list] = {}
        for e, c in other.terms.items():
            by_deg_b.setdefault(sum(e), []).append((e, c))
        # accumulate unreduced (re, im, den) integer triples; reduce once per monomial
        acc: dict[Exp, list] = {}
        for ea, ca in self.terms.items():
            da = sum(ea)
            a1, b1, d1 = ca._a, ca._b, ca._d
            for db, items in by_deg_b.items():
                if prec is not None and da + db >= prec:
                    continue
                for eb, cb in items:
                    e = tuple(map(add, ea, eb))
                    a2, b2 = cb._a, cb._b
                    pa, pb, pd = a1 * a2 - b1 * b2, a1 * b2 + b1 * a2, d1 * cb._d
                    s = acc.get(e)
                    if s is None:
                        acc[e] = [pa, pb, pd]
                    elif s[2] == pd:
                        s[0] += pa
                        s[1] += pb
                    else:
                        s[0] = s[0] * pd + pa * s[2]
                        s[1] = s[1] * pd + pb * s[2]
                        s[2] *= pd
        out = {}
        for e, (a, b, d) in acc.items():
            if a or b:
                out[e] = GaussianRational._raw(a, b, d)
        return PolyExpr._wrap(self.ring, out, prec)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power; use inverse_series")
        out = PolyExpr.const(self.ring, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def pow_trunc(self, k: int, order: int | None) -> "PolyExpr":
        out = PolyExpr.const(self.ring, 1)
        for _ in range(k):
            out = out.mul(self, order)
        return out

    def truncate(self, order: int | None) -> "PolyExpr":
        if order is None:
            return self
        prec = _min_prec(self.prec, order)
        return PolyExpr._wrap(self.ring, {e: c for e, c in self.terms.items() if sum(e) < prec}, prec)

    def with_prec(self, prec: int | None) -> "PolyExpr":
        return self.truncate(prec)

    def inverse_series(self, order: int = DEFAULT_ORDER) -> "PolyExpr":
        """1/self as a jet of order ``order``; self must be a unit at the origin."""
        c0 = self.terms.get(self.ring.zero_exp(), ZERO)
        if not c0:
            raise ZeroDivisionError("series inverse needs a nonzero constant term")
        if self.prec is not None and self.prec < 1:
            raise ArithmeticError("constant term unknown")
        inv0 = c0.inverse()
        q = (self.scale(inv0) - 1).truncate(order)
        out = PolyExpr.const(self.ring, 1).truncate(order)
        power = PolyExpr.const(self.ring, 1)
        for _ in range(1, order):
            power = -(power.mul(q, order))
            if power.is_zero() and (power.prec is None or power.prec >= order):
                break
            out = out + power
        prec = _min_prec(order, self.prec)
        return out.scale(inv0).truncate(prec)

    def divide(self, denom: "PolyExpr", order: int = DEFAULT_ORDER) -> "PolyExpr":
        return self.mul(denom.inverse_series(order), order)

    def __truediv__(self, other):
        if isinstance(other, PolyExpr):
            return self.divide(other)
        return self.scale(gr(other).inverse())

    # structure ----------------------------------------------------------
    def conjugate(self) -> "PolyExpr":
        r = self.ring
        return PolyExpr._wrap(r, {r.conj_exp(e): c.conj() for e, c in self.terms.items()}, self.prec)

    def real_part(self) -> "PolyExpr":
        return (self + self.conjugate()).scale(Fraction(1, 2))

    def imag_part(self) -> "PolyExpr":
        return (self - self.conjugate()).scale(GaussianRational(0, Fraction(-1, 2)))

    def diff(self, var) -> "PolyExpr":
        """Formal (Wirtinger) partial derivative."""
        k = self.ring.index(var)
        out = {}
        for e, c in self.terms.items():
            x = e[k]
            if x:
                f = list(e)
                f[k] = x - 1
                out[tuple(f)] = c * x
        return PolyExpr._wrap(self.ring, out, None if self.prec is None else self.prec - 1)

    def directional(self, coeffs: Mapping) -> "PolyExpr":
        """Sum of c_k * d/dx_k for an association var -> scalar or PolyExpr."""
        out = PolyExpr.zero(self.ring)
        for var, c in coeffs.items():
            d = self.diff(var)
            out = out + (d * c)
        return out

    def homogeneous(self, k: int) -> "PolyExpr":
        if self.prec is not None and k >= self.prec:
            raise ArithmeticError(f"degree {k} component beyond known jet order {self.prec}")
        return PolyExpr._wrap(self.ring, {e: c for e, c in self.terms.items() if sum(e) == k}, None)

    def select(self, pred: Callable[[Exp], bool]) -> "PolyExpr":
        return PolyExpr._wrap(self.ring, {e: c for e, c in self.terms.items() if pred(e)}, self.prec)

    def bidegree(self, e: Exp) -> tuple[int, int]:
        r = self.ring
        return sum(e[k] for k in r.holo), sum(e[k] for k in r.anti)

    def bidegree_split(self) -> dict[tuple[int, int], "PolyExpr"]:
        parts: dict[tuple[int, int], dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(self.bidegree(e), {})[e] = c
        return {bd: PolyExpr._wrap(self.ring, t, self.prec) for bd, t in sorted(parts.items())}

    def harmonic_part(self) -> "PolyExpr":
        """Monomials of bidegree (k, 0) or (0, k) in the counted variables."""
        return self.select(lambda e: 0 in self.bidegree(e))

    def subs(self, mapping: Mapping, order: int | None = None, target: Ring | None = None) -> "PolyExpr":
        """Substitute variables by PolyExprs (in ``target``), truncating below ``order``."""
        target = target or self.ring
        images: list[PolyExpr] = []
        for k in range(self.ring.nvars):
            img = None
            for key in (k, self.ring.names[k]) + ((self.ring.ids[k],) if self.ring.ids else ()):
                if key in mapping:
                    img = mapping[key]
                    break
            if img is None:
                if target is self.ring:
                    img = PolyExpr.var(target, k)
                else:
                    img = PolyExpr.var(target, self.ring.names[k])
            elif not isinstance(img, PolyExpr):
                img = PolyExpr.const(target, img)
            images.append(img)
        powers: dict[tuple[int, int], PolyExpr] = {}

        def power(k: int, x: int) -> PolyExpr:
            key = (k, x)
            if key not in powers:
                powers[key] = images[k] if x == 1 else power(k, x - 1).mul(images[k], order)
            return powers[key]

        out = PolyExpr.zero(target, order)
        for e, c in self.terms.items():
            term = PolyExpr.const(target, c)
            for k, x in enumerate(e):
                if x:
                    term = term.mul(power(k, x), order)
            out = out + term
        if self.prec is not None:
            # unknown input terms have degree >= prec; their images have valuation >= prec * vmin
            vals = []
            for img in images:
                v = img.valuation()
                if v is None:
                    v = img.prec if img.prec is not None else self.prec
                if img.prec is not None:
                    v = min(v, img.prec)
                vals.append(v)
            vmin = min(vals)
            if vmin >= 1:
                out = out.truncate(self.prec * vmin)
            else:
                out = out.truncate(0)
        return out

    def evaluate(self, point: Mapping | Sequence) -> GaussianRational:
        """Exact value at a point; only allowed for exact polynomials."""
        if self.prec is not None:
            raise ArithmeticError("cannot evaluate a truncated jet away from the origin")
        if isinstance(point, Mapping):
            vals = [ZERO] * self.ring.nvars
            for key, v in point.items():
                vals[self.ring.index(key)] = gr(v)
        else:
            vals = [gr(v) for v in point]
        acc = ZERO
        for e, c in self.terms.items():
            t = c
            for k, x in enumerate(e):
                if x:
                    t = t * vals[k] ** x
            acc = acc + t
        return acc

    # comparison / output -------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, PolyExpr):
            if other.ring is not self.ring:
                return False
            prec = _min_prec(self.prec, other.prec)
            a, b = self.truncate(prec), other.truncate(prec)
            return a.terms == b.terms
        o = self._lift(other)
        return o is not None and self == o

    __hash__ = None

    def sorted_terms(self) -> list[tuple[Exp, GaussianRational]]:
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0])))

    def render(self) -> str:
        """Deterministic text form, parseable by :mod:`crinvariants.parser`."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                self.ring.labels[k] + (f"^{x}" if x > 1 else "") for k, x in enumerate(e) if x
            )
            if c.is_real():
                neg = c.re < 0
                mag = -c.re if neg else c.re
                if mono:
                    body = mono if mag == 1 else f"{_num(mag)}*{mono}"
                else:
                    body = _num(mag)
                parts.append(("-" if neg else "+", body))
            else:
                coef = f"({c.render()})"
                parts.append(("+", f"{coef}*{mono}" if mono else coef))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        if self.prec is not None:
            text += f" + O({self.prec})"
        return text

    def __repr__(self):
        return f"PolyExpr[{self.render()}]"

    def __str__(self):
        return self.render()


def _num(x: Fraction) -> str:
    return str(x) if x.denominator == 1 else f"({x})"


def conjugate(p: PolyExpr) -> PolyExpr:
    return p.conjugate()


def wirtinger(p: PolyExpr, v) -> PolyExpr:
    return p.diff(v)


def bidegree_split(p: PolyExpr) -> dict[tuple[int, int], PolyExpr]:
    return p.bidegree_split()


def harmonic_part(p: PolyExpr) -> PolyExpr:
    return p.harmonic_part()


def substitute_truncate(p: PolyExpr, mapping: Mapping, order: int | None = DEFAULT_ORDER) -> PolyExpr:
    """Substitute holomorphic variables and their conjugates consistently.

    Images may be given for holomorphic variables only (barred images are
    completed by conjugation) or for both; an inconsistent pair raises.
    """
    ring = p.ring
    full: dict[int, PolyExpr] = {}
    for key, img in mapping.items():
        k = ring.index(key)
        if not isinstance(img, PolyExpr):
            img = PolyExpr.const(ring, img)
        full[k] = img
    for k, img in list(full.items()):
        ck = ring.conj_perm[k]
        expected = img.conjugate()
        if ck in full:
            if full[ck] != expected:
                raise ValueError(f"substitution for {ring.names[ck]} is not the conjugate of {ring.names[k]}")
        else:
            full[ck] = expected
    return p.subs(full, order).truncate(order)


# weights ------------------------------------------------------------------

INF = float("inf")


def _as_weight(x):
    if x == INF or x is None or (isinstance(x, str) and x.lower() in ("inf", "oo", "∞")):
        return INF
    return Fraction(x)


def weight_vector(values: Iterable) -> tuple:
    vals = tuple(_as_weight(v) for v in values)
    if not vals or vals[0] < 1:
        raise ValueError("weights start at >= 1")
    if any(b < a for a, b in zip(vals, vals[1:])):
        raise ValueError("weights must be nondecreasing")
    return vals


def weight_of_monomial(alpha: Sequence[int], lam: Sequence) -> Fraction:
    """sum alpha_k / lambda_k, infinite weights contributing 0."""
    total = Fraction(0)
    for a, l in zip(alpha, lam):
        l = _as_weight(l)
        if a and l != INF:
            total += Fraction(a) / l
    return total


def pair_exponents(p: PolyExpr, e: Exp) -> tuple[int, ...]:
    """Collapse an ambient exponent to alpha + beta per coordinate pair (w, z1, ...)."""
    ring = p.ring
    seen = []
    out = []
    for k in range(ring.nvars):
        ck = ring.conj_perm[k]
        if ck < k:
            continue
        seen.append(k)
        out.append(e[k] + (e[ck] if ck != k else 0))
    return tuple(out)


def is_O_Lambda(rho: PolyExpr, lam: Sequence) -> bool:
    """True iff every known monomial has ||alpha + beta||_Lambda >= 1."""
    lam = weight_vector(lam)
    return all(weight_of_monomial(pair_exponents(rho, e), lam) >= 1 for e in rho.terms)


def low_weight_monomials(p: PolyExpr, weights: Sequence, bound=1, strict=False) -> list[Exp]:
    """Monomials of ``p`` whose weight (per ring variable) is below (or at, when not strict) ``bound``."""
    out = []
    for e in p.terms:
        wt = sum((Fraction(x) * Fraction(w) for x, w in zip(e, weights)), Fraction(0))
        if wt < bound or (not strict and wt == bound):
            out.append(e)
    return out
