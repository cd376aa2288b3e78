"""Kernel-up-to-order-1 fields, Levi-orthogonal complements, and ideal generators.

All checks are exact at a point (moved to the origin).  Statements that
quantify over a neighbourhood (sheaf membership) are decided on a finite
sample of rational points and reported as sampled verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .exact import ONE, ZERO, ExactMatrix, GaussianRational, congruence_diagonalize, gr, nullspace
from .geometry import (
    GeometryError,
    Hypersurface,
    VectorField,
    antiholo_field,
    ct_basis,
    directional_at_origin,
    field_from_coefficients,
    holo_field,
    lie_bracket,
    levi_function,
    pair_at_origin,
    tangent_field,
)
from .poly import PolyExpr


class AdmissibilityError(ValueError):
    pass


# Levi matrix ------------------------------------------------------------------

def levi_matrix(h: Hypersurface, frame: Sequence[VectorField] | None = None) -> ExactMatrix:
    """A[j][k] = <d'rho, [L_j, conj L_k]>(0) for the coordinate frame (or ``frame``)."""
    if frame is None:
        frame = coordinate_frame(h)
    conj = [f.conj() for f in frame]
    return ExactMatrix([[levi_function(h, a, b).constant() for b in conj] for a in frame], len(frame))


def coordinate_frame(h: Hypersurface) -> list[VectorField]:
    cache = h.__dict__.setdefault("_frame_cache", {})
    if h.order not in cache:
        m = h.m
        cache[h.order] = [holo_field(h, [1 if k == j else 0 for k in range(m)]) for j in range(m)]
    return cache[h.order]


def levi_kernel(a: ExactMatrix) -> list[tuple]:
    """Basis (z components) of K^{10} = {v : sum_j v_j A[j][k] = 0 for all k}."""
    return nullspace(a.transpose())


def nondegenerate_directions(a: ExactMatrix) -> list[tuple]:
    """Columns spanning a Levi-nondegenerate complement of the kernel."""
    p, d = congruence_diagonalize(a.transpose())
    return [p.column(k) for k in range(d.rows) if d[k, k]]


def in_kernel(a: ExactMatrix, v: Sequence) -> bool:
    v = [gr(x) for x in v]
    return all(not x for x in a.transpose().apply(v))


# series matrix inverse -----------------------------------------------------------

def series_matrix_inverse(mat: Sequence[Sequence[PolyExpr]], order: int) -> list[list[PolyExpr]]:
    """Inverse of a matrix of jets whose value at the origin is invertible."""
    k = len(mat)
    if k == 0:
        return []
    ring = mat[0][0].ring
    m0 = ExactMatrix([[x.constant() for x in row] for row in mat], k)
    m0inv = m0.inverse()
    inv0 = [[PolyExpr.const(ring, m0inv[i, j]) for j in range(k)] for i in range(k)]
    nil = [[mat[i][j] - m0[i, j] for j in range(k)] for i in range(k)]
    # step = -M0^{-1} N
    step = _matmul(inv0, nil, order)
    step = [[-x for x in row] for row in step]
    out = inv0
    power = inv0
    for _ in range(1, order):
        power = _matmul(step, power, order)
        if all(x.is_zero() for row in power for x in row):
            break
        out = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(out, power)]
    return [[x.truncate(order) for x in row] for row in out]


def _matmul(a, b, order):
    k, l, n = len(a), len(b), len(b[0])
    ring = a[0][0].ring
    out = []
    for i in range(k):
        row = []
        for j in range(n):
            acc = PolyExpr.zero(ring)
            for t in range(l):
                if a[i][t].is_zero() and a[i][t].prec is None:
                    continue
                if b[t][j].is_zero() and b[t][j].prec is None:
                    continue
                acc = acc + a[i][t].mul(b[t][j], order)
            row.append(acc)
        out.append(row)
    return out


# complements ------------------------------------------------------------------------

def levi_orthogonal_complement(h: Hypersurface, v_frame: Sequence[VectorField],
                               directions: Sequence[Sequence] | None = None,
                               order: int | None = None) -> list[VectorField]:
    """Fields L = L_v + sum_j c_j V_j with <d'rho, [L, conj V_k]> = 0 identically.

    ``directions`` are z-vectors v (default: a basis of the Levi-orthogonal
    complement of the values of ``v_frame`` at the origin).  The returned
    fields have value v at the origin when v is Levi-orthogonal to V there.
    """
    order = order or h.order
    vf = list(v_frame)
    qv = len(vf)
    vbar = [f.conj() for f in vf]
    if directions is None:
        if qv:
            gram_rows = [[levi_function(h, holo_field(h, e), vb).constant() for vb in vbar]
                         for e in _std_basis(h.m)]
            directions = nullspace(ExactMatrix(gram_rows, qv).transpose()) if qv else []
        else:
            directions = _std_basis(h.m)
    if not qv:
        return [holo_field(h, v, order) for v in directions]
    g = [[levi_function(h, vj, vk) for vk in vbar] for vj in vf]
    g0 = ExactMatrix([[x.constant() for x in row] for row in g], qv)
    if g0.rank() < qv:
        raise AdmissibilityError("V frame is Levi-degenerate at the origin")
    gt = [[g[j][k] for j in range(qv)] for k in range(qv)]
    gt_inv = series_matrix_inverse(gt, order)
    out = []
    for v in directions:
        lv = holo_field(h, v, order)
        f = [levi_function(h, lv, vk) for vk in vbar]
        coeffs = []
        for j in range(qv):
            acc = PolyExpr.zero(h.ring)
            for k in range(qv):
                acc = acc + gt_inv[j][k].mul(f[k], order)
            coeffs.append(-acc)
        field_ = lv
        for cj, vj in zip(coeffs, vf):
            field_ = field_ + vj.scale(cj).truncate(order)
        out.append(field_)
    return out


def _std_basis(m: int) -> list[tuple]:
    return [tuple(ONE if k == j else ZERO for k in range(m)) for j in range(m)]


# kernel up to order 1 ----------------------------------------------------------------

@dataclass
class AdmissibilityReport:
    verdict: str
    value_flags: list
    derivative_flags: list
    witness: dict | None = None
    directions: str = "CT"

    @property
    def ok(self) -> bool:
        return self.verdict != "fails"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "directions": self.directions,
               "value_checks": self.value_flags, "derivative_checks": self.derivative_flags}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def in_kernel_up_to_order1(h: Hypersurface, l: VectorField, v_directions: Sequence[Sequence] | None = None
                           ) -> AdmissibilityReport:
    """Check <d'rho,[L1, conj L]>(0) = 0 and its first derivatives along CT (or along V).

    L1 ranges over the coordinate frame (sufficient by linearity), the
    differentiating field over the CT basis or the given ambient vectors.
    """
    frame = coordinate_frame(h)
    lbar = l.conj()
    dirs = list(v_directions) if v_directions is not None else ct_basis(h)
    values, derivs = [], []
    witness = None
    for j, l1 in enumerate(frame):
        fn = levi_function(h, l1, lbar)
        val = fn.constant()
        values.append(not val)
        if val and witness is None:
            witness = {"frame_index": j, "kind": "value", "value": val.to_json()}
        for k, v in enumerate(dirs):
            d = directional_at_origin(fn, v)
            derivs.append(not d)
            if d and witness is None:
                witness = {"frame_index": j, "direction_index": k, "kind": "derivative", "value": d.to_json()}
    if witness is None:
        verdict = "order1-kernel" if v_directions is None else "microlocal"
    else:
        verdict = "fails"
    return AdmissibilityReport(verdict, values, derivs, witness, "CT" if v_directions is None else "V")


def freeman_N2_member(h: Hypersurface, l: VectorField) -> bool:
    """[L, conj L_j] in CH identically on M for every frame field L_j."""
    for lj in coordinate_frame(h):
        fn = levi_function(h, l, lj.conj())
        if not h.restrict(fn).is_zero():
            return False
    return True


def bracket_closure_check(h: Hypersurface, l: VectorField, lp: VectorField) -> bool:
    """[L, L'] and [conj L, L'] at the origin lie in CK."""
    a = levi_matrix(h)
    n, m = h.n, h.m
    grad = [h.rho.diff(k).constant() for k in range(2 * n)]
    for br in (lie_bracket(l, lp), lie_bracket(l.conj(), lp)):
        v = br.value()
        hol = sum((grad[k] * v[k] for k in range(n)), ZERO)
        anti = sum((grad[n + k] * v[n + k] for k in range(n)), ZERO)
        if hol or anti:
            return False
        if not in_kernel(a, v[1:n]):
            return False
        if not in_kernel(a, [x.conj() for x in v[n + 1:]]):
            return False
    return True


# sampled sheaf membership ---------------------------------------------------------------

FieldRecipe = Callable[[Hypersurface], VectorField]


def coefficient_recipe(coeffs: Sequence[PolyExpr]) -> FieldRecipe:
    """Recipe for the (1,0) field sum a_j d_{z_j} (+ tangency correction), a_j exact polynomials.

    The coefficients are translated exactly when the model is recentered.
    """
    def build(hc: Hypersurface, shift=None) -> VectorField:
        cs = coeffs
        if shift is not None:
            cs = [_translate(c, shift) for c in coeffs]
        return field_from_coefficients(hc, cs)

    build.coeffs = list(coeffs)
    return build


def _translate(p: PolyExpr, point) -> PolyExpr:
    r = p.ring
    n = r.nvars // 2
    mapping = {}
    for k in range(n):
        x = gr(point[k])
        mapping[k] = PolyExpr.var(r, k) + x
        mapping[k + n] = PolyExpr.var(r, k + n) + x.conj()
    return p.subs(mapping)


def field_at(h: Hypersurface, recipe, point) -> tuple[Hypersurface, VectorField]:
    hc = h.recentered(point)
    return hc, recipe(hc, point)


def sheaf_membership_S10q(h: Hypersurface, recipe, q: int, sample: Sequence[Sequence]) -> dict:
    """Sampled verdict for membership in S^{10}(q) (kernel up to order 1 at rank-<=q points)."""
    results = []
    for pt in sample:
        hc, l = field_at(h, recipe, pt)
        rank = levi_matrix(hc).rank()
        if rank > q:
            results.append({"point": [gr(x).to_json() for x in pt], "rank": rank, "skipped": True})
            continue
        rep = in_kernel_up_to_order1(hc, l)
        results.append({"point": [gr(x).to_json() for x in pt], "rank": rank, "verdict": rep.verdict})
    passed = all(r.get("skipped") or r["verdict"] != "fails" for r in results)
    return {"member": passed, "sampled": True, "points": results}


# ideal generators ------------------------------------------------------------------------

@dataclass
class IdealGenerator:
    kind: str
    function: PolyExpr
    differential: tuple
    fields: dict = field(default_factory=dict)

    def value(self) -> GaussianRational:
        return self.function.constant()

    def d_at(self, v: Sequence) -> GaussianRational:
        return directional_at_origin(self.function, v)


def ideal_generator(h: Hypersurface, kind: str, l3: VectorField | None, l2: VectorField, l1: VectorField,
                    check: bool = True) -> IdealGenerator:
    """g = <d'rho,[L2,L1]> or f = L3 g, with L2 and conj L1 in the kernel up to order 1."""
    if check:
        for f_ in (l2, l1.conj()):
            if not in_kernel_up_to_order1(h, f_).ok:
                raise AdmissibilityError("ideal generators need L2, conj L1 in the kernel up to order 1")
    g = levi_function(h, l2, l1)
    if kind == "g":
        fn = g
    elif kind == "f":
        if l3 is None:
            raise ValueError("f-generators need L3")
        fn = l3(g)
    else:
        raise ValueError("kind is 'g' or 'f'")
    diff = tuple(directional_at_origin(fn, v) for v in ct_basis(h))
    return IdealGenerator(kind, fn, diff, {"L3": l3, "L2": l2, "L1": l1})


def verify_vanishing_on_rank_locus(h: Hypersurface, builder, q: int, sample: Sequence[Sequence],
                                   min_order: int = 1) -> dict:
    """Evaluate generators built at each sample point; check vanishing to ``min_order`` on M.

    ``builder(hc, point)`` returns an :class:`IdealGenerator` in the chart
    centred at ``point``.
    """
    out = []
    for pt in sample:
        hc = h.recentered(pt)
        if levi_matrix(hc).rank() != q:
            out.append({"point": [gr(x).to_json() for x in pt], "skipped": True})
            continue
        gen = builder(hc, pt)
        jet = hc.restrict(gen.function)
        low = [e for e in jet.terms if sum(e) < min_order]
        out.append({"point": [gr(x).to_json() for x in pt], "vanishes": not low})
    return {"vanishes": all(r.get("skipped") or r["vanishes"] for r in out), "points": out}
