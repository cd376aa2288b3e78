"""Hypersurfaces, complex vector fields, differential forms and the Levi pairing.

Everything is ambient: a hypersurface is the zero set of a real
polynomial ``rho`` in (w, z, wbar, zbar), vector fields have jet
coefficients on all 2n coordinate directions, and values are taken at the
origin after translating the point of interest there.

Sign convention: the Levi function of a pair of fields is
``levi_function(L2, L1) = <d'rho, [L2, L1]>`` which equals
``i <theta_cal, [L2, L1]>`` for the calibrated contact form
``theta_cal = -i d'rho``.  For ``rho = -2 Re w + |z1|^2`` this gives +1 on
(L1, conj L1) at the origin.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exact import ONE, ZERO, I, GaussianRational, gr
from .poly import DEFAULT_ORDER, PolyExpr, Ring, ambient_ring, graph_ring


class GeometryError(ValueError):
    pass


@lru_cache(maxsize=None)
def _graph_x_ring(n: int) -> Ring:
    base = graph_ring(n)
    names = list(base.names) + ["x"]
    labels = list(base.labels) + ["x"]
    perm = list(base.conj_perm) + [len(names) - 1]
    return Ring(names, perm, base.holo, base.anti, labels)


def _point(n: int, point: Sequence) -> tuple[GaussianRational, ...]:
    p = tuple(gr(x) for x in point)
    if len(p) != n:
        raise GeometryError(f"point needs {n} coordinates (w, z1, ..., z{n-1}), got {len(p)}")
    return p


class Hypersurface:
    """Real hypersurface {rho = 0} through the origin of C^n.

    ``rho`` must be real, vanish at the origin and satisfy
    d rho / d(Re w) != 0 there.  ``order`` is the default jet order used by
    series operations on this model.
    """

    def __init__(self, rho: PolyExpr, name: str = "", order: int = DEFAULT_ORDER, check: bool = True):
        self.rho = rho
        self.ring = rho.ring
        self.n = self.ring.nvars // 2
        self.name = name
        self.order = order
        if check:
            if not rho.is_real():
                raise GeometryError("defining function is not real")
            if rho.constant():
                raise GeometryError("the origin is not on the hypersurface")
            if not self.rho_w.constant().re:
                raise GeometryError("d rho / d(Re w) vanishes at the origin (w direction not transversal)")

    @cached_property
    def rho_w(self) -> PolyExpr:
        return self.rho.diff("w")

    @cached_property
    def inv_rho_w(self) -> PolyExpr:
        return self.rho_w.inverse_series(self.order)

    @property
    def m(self) -> int:
        """Number of z coordinates."""
        return self.n - 1

    def with_order(self, order: int) -> "Hypersurface":
        return Hypersurface(self.rho, self.name, order, check=False)

    def value_at(self, point: Sequence) -> GaussianRational:
        p = _point(self.n, point)
        vals = list(p) + [x.conj() for x in p]
        return self.rho.evaluate(vals)

    def contains(self, point: Sequence) -> bool:
        return not self.value_at(point)

    def recentered(self, point: Sequence) -> "Hypersurface":
        """Exact translation moving ``point`` (on M) to the origin."""
        p = _point(self.n, point)
        if all(not x for x in p):
            return self
        if not self.rho.is_exact():
            raise GeometryError("only exact polynomial models can be recentered")
        if not self.contains(p):
            raise GeometryError("point is not on the hypersurface")
        r = self.ring
        mapping = {}
        for k in range(self.n):
            mapping[k] = PolyExpr.var(r, k) + p[k]
            mapping[k + self.n] = PolyExpr.var(r, k + self.n) + p[k].conj()
        return Hypersurface(self.rho.subs(mapping), self.name, self.order)

    def scaled(self, f: PolyExpr) -> "Hypersurface":
        """Same zero set with defining function f*rho (f real, f(0) != 0)."""
        return Hypersurface(self.rho * f, self.name, self.order)

    # graph chart ---------------------------------------------------------
    def graph_jet(self, order: int | None = None) -> PolyExpr:
        order = order or self.order
        cache = self.__dict__.setdefault("_graph_cache", {})
        if order not in cache:
            cache[order] = to_graph_jet(self, order)
        return cache[order]

    def restrict(self, g: PolyExpr, order: int | None = None) -> PolyExpr:
        """Pull an ambient jet back to M via the graph chart (z, zbar, u)."""
        order = order or self.order
        phi = self.graph_jet(order)
        gring = graph_ring(self.n)
        half = phi.scale(Fraction(1, 2))
        u = PolyExpr.var(gring, "u")
        mapping = {"w": half + u.scale(I), "wbar": half - u.scale(I)}
        return g.subs(mapping, order, target=gring)

    def __repr__(self):
        return f"Hypersurface({self.name or self.rho.render()})"


def to_graph_jet(h: Hypersurface, order: int = DEFAULT_ORDER) -> PolyExpr:
    """phi(z, zbar, u) with M = {2 Re w = phi(z, zbar, Im w)} up to total order ``order``."""
    n = h.n
    xr = _graph_x_ring(n)
    gring = graph_ring(n)
    x = PolyExpr.var(xr, "x")
    u = PolyExpr.var(xr, "u")
    rt = h.rho.subs({"w": x + u.scale(I), "wbar": x - u.scale(I)}, order, target=xr)
    c = rt.diff("x").constant()
    if not c:
        raise GeometryError("w direction is not transversal: d rho / d(Re w) = 0")
    rest = rt - x.scale(c)
    inv = -c.inverse()
    xk = PolyExpr.zero(gring)
    for _ in range(order + 1):
        nxt = rest.subs({"x": xk}, order, target=gring).scale(inv).truncate(order)
        if nxt == xk and nxt.prec == xk.prec:
            break
        xk = nxt
    phi = xk.scale(2)
    if not phi.is_real():
        raise GeometryError("graph jet is not real; defining function is not real")
    return phi


# vector fields --------------------------------------------------------------

class VectorField:
    """Complex vector field sum_k coeffs[k] d/dx_k on the ambient coordinates."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: Ring, coeffs: Mapping | Sequence):
        self.ring = ring
        full = [PolyExpr.zero(ring)] * ring.nvars
        items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
        for key, c in items:
            k = ring.index(key)
            full[k] = c if isinstance(c, PolyExpr) else PolyExpr.const(ring, c)
        self.coeffs = tuple(full)

    @classmethod
    def constant(cls, ring: Ring, vec: Sequence) -> "VectorField":
        return cls(ring, [PolyExpr.const(ring, v) for v in vec])

    def __call__(self, f: PolyExpr) -> PolyExpr:
        out = PolyExpr.zero(self.ring)
        for k, c in enumerate(self.coeffs):
            if c.is_zero() and c.prec is None:
                continue
            d = f.diff(k)
            if d.is_zero() and d.prec is None:
                continue
            out = out + c * d
        return out

    apply = __call__

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return VectorField(self.ring, [-a for a in self.coeffs])

    def scale(self, f) -> "VectorField":
        return VectorField(self.ring, [a * f for a in self.coeffs])

    def conj(self) -> "VectorField":
        r = self.ring
        out = [None] * r.nvars
        for k, c in enumerate(self.coeffs):
            out[r.conj_perm[k]] = c.conjugate()
        return VectorField(r, out)

    def bracket(self, other: "VectorField") -> "VectorField":
        return lie_bracket(self, other)

    def value(self) -> tuple[GaussianRational, ...]:
        """Value at the origin as an ambient vector."""
        return tuple(c.constant() for c in self.coeffs)

    def truncate(self, order: int) -> "VectorField":
        return VectorField(self.ring, [c.truncate(order) for c in self.coeffs])

    def min_prec(self):
        precs = [c.prec for c in self.coeffs if c.prec is not None]
        return min(precs) if precs else None

    def __eq__(self, other):
        return isinstance(other, VectorField) and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def render(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                parts.append(f"({c.render()})*d/d{self.ring.labels[k]}")
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"VectorField[{self.render()}]"


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    return VectorField(x.ring, [x(yk) - y(xk) for xk, yk in zip(x.coeffs, y.coeffs)])


def holo_field(h: Hypersurface, a: Sequence, order: int | None = None) -> VectorField:
    """(1,0) field d_a - (d_a rho / rho_w) d_w, tangent to every level set of rho.

    ``a`` lists the z components (length n-1); the value at the origin
    projects to ``a``.
    """
    order = order or h.order
    r = h.ring
    a = [gr(x) for x in a]
    if len(a) != h.m:
        raise GeometryError(f"expected {h.m} z-components")
    coeffs = {}
    da = PolyExpr.zero(r)
    for j, aj in enumerate(a, start=1):
        if aj:
            coeffs[j] = PolyExpr.const(r, aj)
            da = da + h.rho.diff(j).scale(aj)
    coeffs[0] = -(da.mul(h.inv_rho_w, order))
    return VectorField(r, coeffs)


def field_from_coefficients(h: Hypersurface, coeffs: Sequence[PolyExpr], order: int | None = None) -> VectorField:
    """(1,0) tangent field sum_j a_j (d_{z_j}) corrected along d_w (a_j ambient jets)."""
    order = order or h.order
    r = h.ring
    out = {}
    da = PolyExpr.zero(r)
    for j, aj in enumerate(coeffs, start=1):
        aj = aj if isinstance(aj, PolyExpr) else PolyExpr.const(r, aj)
        out[j] = aj
        da = da + h.rho.diff(j) * aj
    out[0] = -(da.mul(h.inv_rho_w, order))
    return VectorField(r, out)


def frame_field(h: Hypersurface, v: Sequence, order: int | None = None) -> VectorField:
    """L_v = d_v + (phi_v / (1 + (i/2) phi_u)) d_w in graph terms; built from rho directly.

    ``v`` is a vector of z components; a length-n vector is accepted only
    when its w component is zero.
    """
    v = [gr(x) for x in v]
    if len(v) == h.n:
        if v[0]:
            raise GeometryError("frame fields take vectors without a w component")
        v = v[1:]
    return holo_field(h, v, order)


def antiholo_field(h: Hypersurface, b: Sequence, order: int | None = None) -> VectorField:
    """(0,1) field with zbar components ``b`` (conjugate of the (1,0) field of conj(b))."""
    return holo_field(h, [gr(x).conj() for x in b], order).conj()


def tangent_field(h: Hypersurface, v: Sequence, order: int | None = None) -> VectorField:
    """Extension of an ambient tangent vector v (length 2n) corrected along d_w."""
    order = order or h.order
    r = h.ring
    v = [gr(x) for x in v]
    if len(v) != 2 * h.n:
        raise GeometryError("ambient vectors have 2n components")
    grad = [h.rho.diff(k).constant() for k in range(2 * h.n)]
    if sum((g * x for g, x in zip(grad, v)), ZERO):
        raise GeometryError("vector is not tangent to M at the origin")
    coeffs = {k: PolyExpr.const(r, x) for k, x in enumerate(v) if x and k != 0}
    xv = VectorField(r, coeffs)
    coeffs[0] = -(xv(h.rho).mul(h.inv_rho_w, order))
    return VectorField(r, coeffs)


def ct_vector(h: Hypersurface, a: Sequence, b: Sequence, c=0) -> tuple:
    """Ambient tangent vector with z part a, zbar part b and u-component c.

    The (1,0) part is completed in H^{10} (w component from d'rho), the
    (0,1) part in H^{01}, and the transversal part has wbar component
    -i*c, so it is c * d/du in a normalized chart.
    """
    n = h.n
    a = [gr(x) for x in a]
    b = [gr(x) for x in b]
    c = gr(c)
    grad = [h.rho.diff(k).constant() for k in range(2 * n)]
    vw = -(sum((grad[j] * a[j - 1] for j in range(1, n)), ZERO) / grad[0])
    vwb = -(sum((grad[n + j] * b[j - 1] for j in range(1, n)), ZERO) / grad[n])
    tw_bar = -(I * c)
    tw = -(grad[n] * tw_bar / grad[0])
    return tuple([vw + tw] + a + [vwb + tw_bar] + b)


def ch_field(h: Hypersurface, a: Sequence, b: Sequence, order: int | None = None) -> VectorField:
    """Field in the complex tangent bundle CH with (1,0) part a and (0,1) part b."""
    return holo_field(h, a, order) + antiholo_field(h, b, order)


def is_tangent(h: Hypersurface, x: VectorField, order: int | None = None) -> bool:
    """X rho vanishes on M to the known order."""
    return h.restrict(x(h.rho), order).is_zero()


# forms ----------------------------------------------------------------------

class Form:
    """Differential form sum c_I dx_I with I increasing index tuples."""

    __slots__ = ("ring", "degree", "coeffs")

    def __init__(self, ring: Ring, degree: int, coeffs: Mapping[tuple, PolyExpr] | None = None):
        self.ring = ring
        self.degree = degree
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError("index length must equal degree")
            sign, key = _sort_sign(idx)
            if sign == 0:
                continue
            c = c if isinstance(c, PolyExpr) else PolyExpr.const(ring, c)
            prev = clean.get(key)
            c = c if sign > 0 else -c
            clean[key] = c if prev is None else prev + c
        self.coeffs = {k: v for k, v in clean.items() if not (v.is_zero() and v.prec is None)}

    @classmethod
    def function(cls, f: PolyExpr) -> "Form":
        return cls(f.ring, 0, {(): f})

    def __add__(self, other: "Form") -> "Form":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return Form(self.ring, self.degree, out)

    def __neg__(self):
        return Form(self.ring, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "Form":
        return Form(self.ring, self.degree, {k: v * f for k, v in self.coeffs.items()})

    def d(self) -> "Form":
        out: dict[tuple, PolyExpr] = {}
        for idx, c in self.coeffs.items():
            for k in range(self.ring.nvars):
                if k in idx:
                    continue
                dc = c.diff(k)
                if dc.is_zero() and dc.prec is None:
                    continue
                sign, key = _sort_sign((k,) + idx)
                term = dc if sign > 0 else -dc
                out[key] = out[key] + term if key in out else term
        return Form(self.ring, self.degree + 1, out)

    def contract(self, x: VectorField) -> "Form":
        if self.degree == 0:
            return Form(self.ring, 0, {})
        out: dict[tuple, PolyExpr] = {}
        for idx, c in self.coeffs.items():
            for r, k in enumerate(idx):
                xk = x.coeffs[k]
                if xk.is_zero() and xk.prec is None:
                    continue
                rest = idx[:r] + idx[r + 1:]
                term = c * xk
                if r % 2:
                    term = -term
                out[rest] = out[rest] + term if rest in out else term
        return Form(self.ring, self.degree - 1, out)

    def pair(self, x: VectorField) -> PolyExpr:
        if self.degree != 1:
            raise ValueError("pairing needs a one-form")
        return self.contract(x).coeffs.get((), PolyExpr.zero(self.ring))

    def as_function(self) -> PolyExpr:
        if self.degree != 0:
            raise ValueError("not a function")
        return self.coeffs.get((), PolyExpr.zero(self.ring))

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.coeffs.values())

    def __eq__(self, other):
        if not isinstance(other, Form) or other.degree != self.degree:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        z = PolyExpr.zero(self.ring)
        return all(self.coeffs.get(k, z) == other.coeffs.get(k, z) for k in keys)

    __hash__ = None

    def render(self) -> str:
        parts = []
        for idx, c in sorted(self.coeffs.items()):
            wedge = "^".join("d" + self.ring.labels[k] for k in idx)
            parts.append(f"({c.render()})" + (f"*{wedge}" if wedge else ""))
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"Form{self.degree}[{self.render()}]"


OneForm = Form
TwoForm = Form


def _sort_sign(idx: tuple) -> tuple[int, tuple]:
    if len(set(idx)) != len(idx):
        return 0, idx
    arr = list(idx)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


def exterior_d(f: PolyExpr) -> Form:
    return Form.function(f).d()


def holomorphic_differential(f: PolyExpr) -> Form:
    """d'f: the (1,0) part of df."""
    r = f.ring
    return Form(r, 1, {(k,): f.diff(k) for k in range(r.nvars // 2)})


def contact_form(h: Hypersurface, calibrated: bool = False) -> Form:
    """theta = i d'rho (or the calibrated -i d'rho used by the tensor routes)."""
    return holomorphic_differential(h.rho).scale(-I if calibrated else I)


def lie_derivative_form(x: VectorField, omega: Form) -> Form:
    """T_X omega = d(i_X omega) + i_X d omega."""
    if omega.degree == 0:
        return Form.function(x(omega.as_function()))
    return omega.contract(x).d() + omega.d().contract(x)


def levi_function(h: Hypersurface, l2: VectorField, l1: VectorField) -> PolyExpr:
    """<d'rho, [L2, L1]> = i <theta_cal, [L2, L1]>; +|z1|^2 gives +1."""
    br = lie_bracket(l2, l1)
    out = PolyExpr.zero(h.ring)
    for k in range(h.n):
        c = br.coeffs[k]
        if not c.is_zero() or c.prec is not None:
            out = out + h.rho.diff(k) * c
    return out


def levi_pairing(h: Hypersurface, l2: VectorField, l1: VectorField, check: bool = False) -> PolyExpr:
    """<theta_cal, [L2, L1]>; ``i * levi_pairing`` is :func:`levi_function`."""
    if check:
        for f in (l2, l1):
            if not is_tangent(h, f):
                raise GeometryError("levi_pairing needs fields tangent to M")
    return levi_function(h, l2, l1).scale(-I)


def pair_at_origin(h: Hypersurface, x: VectorField) -> GaussianRational:
    """<d'rho, X> at the origin (the calibrated scalar of a tangent vector mod CH)."""
    val = x.value()
    return sum((h.rho.diff(k).constant() * val[k] for k in range(h.n)), ZERO)


def gradient_at_origin(f: PolyExpr) -> tuple[GaussianRational, ...]:
    return tuple(f.linear_coeff(k) for k in range(f.ring.nvars))


def directional_at_origin(f: PolyExpr, v: Sequence) -> GaussianRational:
    """(X f)(0) for any field X with value v at the origin."""
    acc = ZERO
    for k, x in enumerate(v):
        x = gr(x)
        if x:
            acc = acc + x * f.linear_coeff(k)
    return acc


# points on M ----------------------------------------------------------------

def _sqrt_fraction(q: Fraction) -> Fraction | None:
    from math import isqrt

    if q < 0:
        return None
    a, b = q.numerator, q.denominator
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def point_from_graph(h: Hypersurface, z: Sequence, u=0, branch: int = 0) -> tuple | None:
    """Point (w, z) on M with Im w = u; Re w solved exactly (degree <= 2 in Re w).

    Returns None when no rational solution exists.  ``branch`` picks the
    root closest to 0 (0) or the other one (1) for quadratic equations.
    """
    n = h.n
    z = [gr(x) for x in z]
    u = Fraction(u)
    xr = _graph_x_ring(n)
    x = PolyExpr.var(xr, "x")
    uu = PolyExpr.const(xr, u)
    rt = h.rho.subs({"w": x + uu.scale(I), "wbar": x - uu.scale(I)}, None, target=xr)
    vals = {}
    for j in range(1, n):
        vals[f"z{j}"] = z[j - 1]
        vals[f"zbar{j}"] = z[j - 1].conj()
    coeffs: dict[int, GaussianRational] = {}
    kx = xr.index("x")
    for e, c in rt.terms.items():
        t = c
        for k, p in enumerate(e):
            if p and k != kx:
                t = t * gr(vals.get(xr.names[k], 0)) ** p
        coeffs[e[kx]] = coeffs.get(e[kx], ZERO) + t
    deg = max((d for d, c in coeffs.items() if c), default=0)
    cs = [coeffs.get(d, ZERO) for d in range(deg + 1)]
    if any(not c.is_real() for c in cs):
        return None
    cs = [c.re for c in cs]
    roots: list[Fraction] = []
    if deg == 0:
        if cs[0] == 0:
            roots = [Fraction(0)]
    elif deg == 1:
        roots = [-cs[0] / cs[1]]
    elif deg == 2:
        a, b, c = cs[2], cs[1], cs[0]
        s = _sqrt_fraction(b * b - 4 * a * c)
        if s is not None:
            roots = sorted({(-b + s) / (2 * a), (-b - s) / (2 * a)}, key=lambda r: (abs(r), r))
    else:
        return None
    if not roots:
        return None
    re = roots[min(branch, len(roots) - 1)]
    return tuple([GaussianRational(re, u)] + z)


def ambient_vector_from_ct(h: Hypersurface, coords: Sequence) -> tuple:
    """CT coordinates (a_1..a_m, b_1..b_m, c) to an ambient tangent vector."""
    m = h.m
    coords = [gr(x) for x in coords]
    return ct_vector(h, coords[:m], coords[m:2 * m], coords[2 * m] if len(coords) > 2 * m else 0)


def ct_basis(h: Hypersurface) -> list[tuple]:
    """Ambient vectors for d_{z_j}, d_{zbar_j} and the transversal direction, in that order."""
    m = h.m
    out = []
    for j in range(m):
        a = [0] * m
        a[j] = 1
        out.append(ct_vector(h, a, [0] * m, 0))
    for j in range(m):
        b = [0] * m
        b[j] = 1
        out.append(ct_vector(h, [0] * m, b, 0))
    out.append(ct_vector(h, [0] * m, [0] * m, 1))
    return out
