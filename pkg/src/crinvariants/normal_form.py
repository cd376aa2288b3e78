"""Cubic and weighted quartic normal forms with recorded coordinate changes.

Pipeline (all steps are holomorphic substitutions applied to rho, after
which the graph jet is re-solved):

1. translate the point to the origin and make the linear part -2 Re w;
2. remove harmonic terms of phi order by order with w -> w + g(z, w);
3. diagonalize the Levi block by a linear change of z (rational d_j);
4. shear z_{2j} -> z_{2j} + h_j(z, w) to kill cubic monomials conj(z_{2j}) h(z, u);
5. diagonalize the u-coefficient Hermitian form on the kernel block.

The quartic form continues with harmonic removal in degree 4 and then
checks that every monomial besides phi^2 and phi^4 has weight > 1 for
weights (u, z_2, z_4) = (1, 1/2, 1/4).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import ONE, ZERO, I, ExactMatrix, GaussianRational, congruence_diagonalize, gr, hermitian_signature
from .geometry import GeometryError, Hypersurface
from .poly import DEFAULT_ORDER, PolyExpr, ambient_ring, graph_ring, substitute_truncate, vector_ring


class NormalFormError(ValueError):
    """Raised when a normal form does not exist (e.g. nonzero cubic tensor)."""


@dataclass(frozen=True)
class CoordinateChange:
    """Holomorphic map new -> old: ``images[k]`` is old coordinate k (w, z1, ...) in new coordinates."""

    n: int
    images: tuple
    order: int | None = None
    steps: tuple = ()

    @classmethod
    def identity(cls, n: int, order: int | None = None) -> "CoordinateChange":
        r = ambient_ring(n)
        return cls(n, tuple(PolyExpr.var(r, k) for k in range(n)), order, ())

    @property
    def ring(self):
        return ambient_ring(self.n)

    def full_map(self) -> dict:
        out = {}
        for k, img in enumerate(self.images):
            out[k] = img
            out[k + self.n] = img.conjugate()
        return out

    def apply(self, p: PolyExpr, order: int | None = None) -> PolyExpr:
        return p.subs(self.full_map(), order or self.order).truncate(order or self.order)

    def then(self, other: "CoordinateChange", label: str | None = None) -> "CoordinateChange":
        """Compose: first ``self`` (old <- mid), then ``other`` (mid <- new)."""
        order = _min(self.order, other.order)
        fm = other.full_map()
        imgs = tuple(img.subs(fm, order).truncate(order) for img in self.images)
        steps = self.steps + other.steps
        return CoordinateChange(self.n, imgs, order, steps)

    def jacobian(self) -> ExactMatrix:
        """d old / d new at the origin on (w, z1, ...)."""
        return ExactMatrix([[img.linear_coeff(k) for k in range(self.n)] for img in self.images], self.n)

    def push_vector(self, v: Sequence) -> tuple:
        """Ambient vector (2n components) in new coordinates to old coordinates."""
        j = self.jacobian()
        hol = j.apply(v[: self.n])
        anti = j.conj().apply(v[self.n:])
        return tuple(hol) + tuple(anti)

    def inverse(self, order: int | None = None) -> "CoordinateChange":
        """Inverse as a truncated map (fixed-point iteration on the nonlinear part)."""
        order = order or self.order or DEFAULT_ORDER
        r = self.ring
        n = self.n
        for img in self.images:
            if img.constant():
                raise NormalFormError("inverse of a map not fixing the origin")
        jinv = self.jacobian().inverse()
        new_vars = [PolyExpr.var(r, k) for k in range(n)]
        nonlin = [img - _linear_part(img, n) for img in self.images]
        inv = [_lin_comb(jinv.entries[i], new_vars) for i in range(n)]
        for _ in range(order + 1):
            fm = {}
            for k in range(n):
                fm[k] = inv[k]
                fm[k + n] = inv[k].conjugate()
            evaluated = [nl.subs(fm, order).truncate(order) for nl in nonlin]
            rhs = [new_vars[k] - evaluated[k] for k in range(n)]
            nxt = [_lin_comb(jinv.entries[i], rhs).truncate(order) for i in range(n)]
            if all(a == b for a, b in zip(nxt, inv)):
                break
            inv = nxt
        return CoordinateChange(n, tuple(inv), order, ("inverse",))

    def render(self) -> list[str]:
        r = self.ring
        return [f"{r.labels[k]} -> {img.render()}" for k, img in enumerate(self.images)]


def _min(a, b):
    vals = [x for x in (a, b) if x is not None]
    return min(vals) if vals else None


def _linear_part(p: PolyExpr, n: int) -> PolyExpr:
    return PolyExpr(p.ring, {e: c for e, c in p.terms.items() if sum(e) == 1})


def _lin_comb(coeffs, polys) -> PolyExpr:
    out = PolyExpr.zero(polys[0].ring)
    for c, p in zip(coeffs, polys):
        if c:
            out = out + p.scale(c)
    return out


def _change_from(n: int, mapping: dict, order: int | None, label: str) -> CoordinateChange:
    r = ambient_ring(n)
    imgs = []
    for k in range(n):
        img = mapping.get(k)
        imgs.append(PolyExpr.var(r, k) if img is None else img)
    return CoordinateChange(n, tuple(imgs), order, (label,))


def _apply(h: Hypersurface, ch: CoordinateChange, order: int) -> Hypersurface:
    return Hypersurface(ch.apply(h.rho, order), h.name, order)


def _graph_to_ambient(p: PolyExpr, n: int) -> PolyExpr:
    """Holomorphic (z, u) monomials with u replaced by -i w (the holomorphic function equal to u + O(2) on M)."""
    r = ambient_ring(n)
    g = p.ring
    minus_iw = PolyExpr.var(r, "w").scale(-I)
    out = PolyExpr.zero(r)
    ku = g.index("u")
    for e, c in p.terms.items():
        if any(e[k] for k in g.anti):
            raise ValueError("expected a holomorphic (z, u) polynomial")
        term = PolyExpr.const(r, c)
        for j, k in enumerate(g.holo, start=1):
            if e[k]:
                term = term * PolyExpr.var(r, j) ** e[k]
        if e[ku]:
            term = term * minus_iw ** e[ku]
        out = out + term
    return out


# individual steps -------------------------------------------------------------

def normalize_linear(h: Hypersurface, order: int) -> tuple[Hypersurface, CoordinateChange]:
    """Linear change making the linear part of rho equal to -2 Re w."""
    n = h.n
    r = h.ring
    b = h.rho.diff(0).constant()
    a = [h.rho.diff(j).constant() for j in range(1, n)]
    if b == -ONE and not any(a):
        return h.with_order(order), CoordinateChange.identity(n, order)
    w = PolyExpr.var(r, "w")
    expr = w
    for j, aj in enumerate(a, start=1):
        if aj:
            expr = expr + PolyExpr.var(r, j).scale(aj)
    ch = _change_from(n, {0: expr.scale(-b.inverse())}, order, "linear: -2 Re w")
    return _apply(h, ch, order), ch


def remove_harmonic(h: Hypersurface, degree: int, order: int) -> tuple[Hypersurface, CoordinateChange]:
    """Kill the harmonic part of the degree-``degree`` component of phi via w -> w + g."""
    n = h.n
    phi = h.graph_jet(order)
    hk = phi.homogeneous(degree).harmonic_part()
    if hk.is_zero():
        return h, CoordinateChange.identity(n, order)
    g = phi.ring
    hol = {}
    for e, c in hk.terms.items():
        zdeg = sum(e[k] for k in g.holo)
        zbdeg = sum(e[k] for k in g.anti)
        if zdeg and not zbdeg:
            hol[e] = hol.get(e, ZERO) + c
        elif not zdeg and not zbdeg:
            if not c.is_real():
                raise NormalFormError("non-real pure u coefficient in a real graph jet")
            hol[e] = hol.get(e, ZERO) + c * Fraction(1, 2)
    gpoly = _graph_to_ambient(PolyExpr(g, hol), n)
    r = h.ring
    ch = _change_from(n, {0: PolyExpr.var(r, "w") + gpoly}, order, f"harmonic removal, degree {degree}")
    h2 = _apply(h, ch, order)
    left = h2.graph_jet(order).homogeneous(degree).harmonic_part()
    if not left.is_zero():
        raise NormalFormError(f"harmonic removal failed in degree {degree}: {left.render()}")
    return h2, ch


def levi_block(phi: PolyExpr, m: int) -> ExactMatrix:
    """A[j][k] = coefficient of z_j conj(z_k) in phi."""
    g = phi.ring
    rows = []
    for j in range(m):
        row = []
        for k in range(m):
            e = [0] * g.nvars
            e[g.holo[j]] += 1
            e[g.anti[k]] += 1
            row.append(phi.coeff(tuple(e)))
        rows.append(row)
    return ExactMatrix(rows, m)


def diagonalize_block(h: Hypersurface, order: int, indices: Sequence[int], matrix: ExactMatrix, label: str,
                      reorder: bool) -> tuple[Hypersurface, CoordinateChange, list[GaussianRational]]:
    """Linear change on z_{indices} with z_old = P z_new making ``matrix`` diagonal.

    ``matrix`` follows the coefficient convention of :func:`levi_block`.
    Nonzero diagonal entries are moved first when ``reorder`` is set.
    """
    n = h.n
    p, d = congruence_diagonalize(matrix.transpose())
    size = matrix.rows
    diag = [d[k, k] for k in range(size)]
    order_idx = list(range(size))
    if reorder:
        order_idx = [k for k in range(size) if diag[k]] + [k for k in range(size) if not diag[k]]
    p = ExactMatrix([[p[i, k] for k in order_idx] for i in range(size)], size)
    diag = [diag[k] for k in order_idx]
    if p == ExactMatrix.identity(size):
        return h, CoordinateChange.identity(n, order), diag
    r = h.ring
    mapping = {}
    for a, ia in enumerate(indices):
        expr = PolyExpr.zero(r)
        for b, ib in enumerate(indices):
            if p[a, b]:
                expr = expr + PolyExpr.var(r, ib + 1).scale(p[a, b])
        mapping[ia + 1] = expr
    ch = _change_from(n, mapping, order, label)
    return _apply(h, ch, order), ch, diag


def shear_cubic(h: Hypersurface, q: int, d: Sequence[GaussianRational], order: int) -> tuple[Hypersurface, CoordinateChange]:
    """Remove cubic monomials conj(z_{2j}) h(z, u), j <= q, by z_{2j} -> z_{2j} + h_j(z, w)."""
    n = h.n
    phi = h.graph_jet(order)
    g = phi.ring
    cubic = phi.homogeneous(3)
    handled = set()
    pieces: dict[int, dict] = {}
    for e, c in sorted(cubic.terms.items(), key=lambda t: tuple(-x for x in t[0])):
        if e in handled:
            continue
        barred = [(k, e[k]) for k in g.anti if e[k]]
        if len(barred) != 1 or barred[0][1] != 1:
            continue
        kbar = barred[0][0]
        j = g.anti.index(kbar)
        if j >= q:
            continue
        ce = g.conj_exp(e)
        coef = c if ce != e else c * Fraction(1, 2)
        handled.add(e)
        handled.add(ce)
        rest = list(e)
        rest[kbar] -= 1
        rest = tuple(rest)
        pieces.setdefault(j, {})
        pieces[j][rest] = pieces[j].get(rest, ZERO) - coef / d[j]
    if not pieces:
        return h, CoordinateChange.identity(n, order)
    r = h.ring
    mapping = {}
    for j, terms in sorted(pieces.items()):
        hj = _graph_to_ambient(PolyExpr(g, terms), n)
        mapping[j + 1] = PolyExpr.var(r, j + 1) + hj
    ch = _change_from(n, mapping, order, "cubic shear of the Levi block")
    return _apply(h, ch, order), ch


def u_block(phi: PolyExpr, idx: Sequence[int]) -> ExactMatrix:
    """B[j][k] = coefficient of z_j conj(z_k) u for j, k in idx."""
    g = phi.ring
    ku = g.index("u")
    rows = []
    for j in idx:
        row = []
        for k in idx:
            e = [0] * g.nvars
            e[g.holo[j]] += 1
            e[g.anti[k]] += 1
            e[ku] += 1
            row.append(phi.coeff(tuple(e)))
        rows.append(row)
    return ExactMatrix(rows, len(idx))


# results ---------------------------------------------------------------------

@dataclass
class CubicNormalForm:
    hypersurface: Hypersurface
    change: CoordinateChange
    phi: PolyExpr
    q: int
    signature: tuple
    d: list
    phi21: PolyExpr
    phi111: PolyExpr
    eps: list
    order: int

    @property
    def kernel_indices(self) -> list[int]:
        return list(range(self.q, self.hypersurface.m))

    def cubic_obstructions(self) -> list:
        """Cubic monomials forbidden by pseudoconvexity (nonzero exactly when tau^3 != 0)."""
        g = self.phi.ring
        q = self.q
        bad = []
        for e, c in self.phi.homogeneous(3).terms.items():
            ker_deg = sum(e[g.holo[j]] + e[g.anti[j]] for j in range(q, len(g.holo)))
            if ker_deg >= 2 or e[g.index("u")]:
                bad.append((e, c))
        return bad


@dataclass
class QuarticNormalForm:
    hypersurface: Hypersurface
    change: CoordinateChange
    phi: PolyExpr
    q: int
    d: list
    phi4: PolyExpr
    weights: tuple
    order: int
    cubic: CubicNormalForm = field(repr=False, default=None)

    @property
    def kernel_indices(self) -> list[int]:
        return list(range(self.q, self.hypersurface.m))

    def phi4_in_kernel(self) -> PolyExpr:
        """phi^4 as a polynomial in the kernel variables only (vector ring v1..v_k)."""
        g = self.phi.ring
        ker = self.kernel_indices
        vr = vector_ring(len(ker))
        terms = {}
        for e, c in self.phi4.terms.items():
            f = [0] * vr.nvars
            for a, j in enumerate(ker):
                f[a] = e[g.holo[j]]
                f[a + len(ker)] = e[g.anti[j]]
            terms[tuple(f)] = c
        return PolyExpr(vr, terms)


def cubic_normal_form(h: Hypersurface, p: Sequence | None = None, order: int | None = None) -> CubicNormalForm:
    order = order or max(h.order, 5)
    n = h.n
    m = n - 1
    h0 = h.recentered(p) if p is not None else h
    hc, change = normalize_linear(h0.with_order(order), order)
    for k in (2, 3):
        hc, ch = remove_harmonic(hc, k, order)
        change = change.then(ch)
        if k == 2:
            phi = hc.graph_jet(order)
            a = levi_block(phi, m)
            hc, ch, diag = diagonalize_block(hc, order, list(range(m)), a, "Levi block", True)
            change = change.then(ch)
            q = sum(1 for x in diag if x)
            d = diag[:q]
            sig = hermitian_signature(a)
    hc, ch = shear_cubic(hc, q, d, order)
    change = change.then(ch)
    ker = list(range(q, m))
    eps: list = []
    if ker:
        b = u_block(hc.graph_jet(order), ker)
        if not b.is_zero():
            hc, ch, diag = diagonalize_block(hc, order, ker, b, "u-form on the kernel block", False)
            change = change.then(ch)
        eps = [int((x.re > 0) - (x.re < 0)) for x in (diag if not b.is_zero() else [ZERO] * len(ker))]
    phi = hc.graph_jet(order)
    g = phi.ring
    cubic = phi.homogeneous(3)
    ku = g.index("u")
    phi111 = cubic.select(lambda e: e[ku] == 1)
    ker_bar = {g.anti[j] for j in ker}
    phi21 = cubic.select(lambda e: e[ku] == 0 and sum(e[k] for k in g.anti) == 1 and any(e[k] for k in ker_bar))
    return CubicNormalForm(hc, change, phi, q, sig, d, phi21, phi111, eps, order)


def quartic_normal_form(h: Hypersurface, p: Sequence | None = None, order: int | None = None,
                        cubic: CubicNormalForm | None = None) -> QuarticNormalForm:
    """Weighted normal form 2 Re w = sum d_j |z_2j|^2 + phi^4(z_4) + (weight > 1)."""
    order = order or max(h.order, 5)
    if order < 5:
        raise NormalFormError("the weight certificate needs jet order >= 5")
    cnf = cubic or cubic_normal_form(h, p, order)
    bad = cnf.cubic_obstructions()
    if bad:
        g = cnf.phi.ring
        shown = ", ".join(PolyExpr(g, {e: c}).render() for e, c in bad[:4])
        raise NormalFormError(f"cubic tensor does not vanish (non-pseudoconvex obstruction): {shown}")
    hq, ch = remove_harmonic(cnf.hypersurface, 4, order)
    change = cnf.change.then(ch)
    phi = hq.graph_jet(order)
    g = phi.ring
    q = cnf.q
    m = h.n - 1
    weights = [Fraction(1, 2) if j < q else Fraction(1, 4) for j in range(m)] * 2 + [Fraction(1)]
    quartic = phi.homogeneous(4)
    ker_vars = {g.holo[j] for j in range(q, m)} | {g.anti[j] for j in range(q, m)}
    phi4 = quartic.select(lambda e: all(not x or k in ker_vars for k, x in enumerate(e)))
    phi2 = phi.homogeneous(2)
    rest = phi - phi2 - phi4
    low = []
    for e, c in rest.terms.items():
        wt = sum((Fraction(x) * w for x, w in zip(e, weights)), Fraction(0))
        if wt <= 1:
            low.append((e, c))
    if low:
        shown = ", ".join(PolyExpr(g, {e: c}).render() for e, c in low[:4])
        raise NormalFormError(f"weight filter failed, monomials of weight <= 1 remain: {shown}")
    return QuarticNormalForm(hq, change, phi, q, cnf.d, phi4, (1, Fraction(1, 2), Fraction(1, 4)), order, cnf)
