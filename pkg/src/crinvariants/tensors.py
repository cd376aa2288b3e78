"""Levi, cubic and quartic tensors through several independent routes.

Vectors are given in CT coordinates ``(a_1..a_m, b_1..b_m, c)``: z part,
zbar part and transversal part (see :func:`geometry.ct_vector`).  Kernel
slots also accept bare length-m vectors (the z part for K^{10}, the zbar
part for conj K^{10}).  Values are scalars: the bracket is paired with
d'rho (equivalently i * theta_cal), so |z1|^2 has Levi value +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

from .exact import I, ONE, ZERO, ExactMatrix, GaussianRational, gr, nullspace
from .geometry import (
    GeometryError,
    Hypersurface,
    VectorField,
    ambient_vector_from_ct,
    antiholo_field,
    ch_field,
    contact_form,
    directional_at_origin,
    holo_field,
    levi_function,
    lie_bracket,
    lie_derivative_form,
    pair_at_origin,
    tangent_field,
)
from .normal_form import QuarticNormalForm, cubic_normal_form, quartic_normal_form
from .poly import PolyExpr
from .sheaves import (
    AdmissibilityError,
    coordinate_frame,
    levi_kernel,
    levi_matrix,
    levi_orthogonal_complement,
    nondegenerate_directions,
)

CT, CH, K10, KBAR, CK = "CT", "CH", "K10", "conjK10", "CK"


class SlotError(ValueError):
    """An argument lies outside the declared slot domain."""


@dataclass
class TensorValue:
    """Multilinear form stored as components over per-slot bases (CT coordinates)."""

    name: str
    slots: tuple
    bases: tuple
    values: dict
    frame: dict = field(default_factory=dict)
    evaluator: Callable | None = field(default=None, repr=False)

    @property
    def arity(self) -> int:
        return len(self.slots)

    def is_zero(self) -> bool:
        return all(not v for v in self.values.values())

    def component(self, *idx) -> GaussianRational:
        return self.values.get(tuple(idx), ZERO)

    def coordinates(self, slot: int, v: Sequence) -> list:
        """Coordinates of v in the basis of ``slot`` (raises SlotError outside the span)."""
        basis = self.bases[slot]
        v = [gr(x) for x in v]
        if not basis:
            if any(v):
                raise SlotError(f"slot {slot} ({self.slots[slot]}) is zero-dimensional")
            return []
        dim = len(basis[0])
        m = ExactMatrix([[basis[k][i] for k in range(len(basis))] + [v[i]] for i in range(dim)])
        red, piv = m.rref()
        if len(basis) in piv:
            raise SlotError(f"argument outside slot domain {self.slots[slot]}")
        coords = [ZERO] * len(basis)
        for r, c in enumerate(piv):
            coords[c] = red[r, len(basis)]
        return coords

    def evaluate(self, *vectors) -> GaussianRational:
        if len(vectors) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} arguments")
        coords = [self.coordinates(s, v) for s, v in enumerate(vectors)]
        acc = ZERO
        for idx, val in self.values.items():
            if not val:
                continue
            t = val
            for s, k in enumerate(idx):
                t = t * coords[s][k]
                if not t:
                    break
            acc = acc + t
        return acc

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "slots": list(self.slots),
            "bases": [[[x.to_json() for x in v] for v in b] for b in self.bases],
            "components": [{"index": list(k), "value": v.to_json()} for k, v in sorted(self.values.items()) if v],
            "frame": self.frame,
        }


# vector helpers -------------------------------------------------------------------

def _ct(v: Sequence, m: int, kind: str) -> tuple:
    v = [gr(x) for x in v]
    if len(v) == 2 * m + 1:
        return tuple(v)
    if len(v) == 2 * m:
        return tuple(v) + (ZERO,)
    if len(v) == m:
        if kind == K10:
            return tuple(v) + (ZERO,) * (m + 1)
        if kind == KBAR:
            return (ZERO,) * m + tuple(v) + (ZERO,)
    raise SlotError(f"cannot read {len(v)} components as a {kind} vector (m={m})")


def conj_ct(v: Sequence, m: int) -> tuple:
    """Complex conjugate of a CT vector: swap the z and zbar parts, conjugate c."""
    v = [gr(x) for x in v]
    return tuple(x.conj() for x in v[m:2 * m]) + tuple(x.conj() for x in v[:m]) + (v[2 * m].conj(),)


class TensorLab:
    """Tensor evaluators at one point of a model (moved to the origin).

    ``v_frame`` optionally overrides the Levi-nondegenerate directions used
    to build admissible extensions (a list of z-vectors or (1,0) fields).
    """

    def __init__(self, h: Hypersurface, p: Sequence | None = None, order: int | None = None,
                 v_frame: Sequence | None = None):
        order = order or max(h.order, 6)
        self.original = h
        self.point = tuple(gr(x) for x in p) if p is not None else None
        self.h = (h.recentered(p) if p is not None else h).with_order(order)
        self.order = order
        self.m = self.h.m
        self.levi = levi_matrix(self.h)
        self.kernel = levi_kernel(self.levi)
        self.q = self.m - len(self.kernel)
        if v_frame is None:
            self.v_fields = [holo_field(self.h, d) for d in nondegenerate_directions(self.levi)]
        else:
            self.v_fields = [f if isinstance(f, VectorField) else holo_field(self.h, f) for f in v_frame]
        self._adm: dict = {}
        self._fields: dict = {}
        self._tau3_zero: bool | None = None

    # slot domains ------------------------------------------------------------
    def in_kernel(self, a: Sequence) -> bool:
        return all(not x for x in self.levi.transpose().apply([gr(x) for x in a]))

    def check(self, v: Sequence, kind: str) -> tuple:
        m = self.m
        v = _ct(v, m, kind)
        a, b, c = v[:m], v[m:2 * m], v[2 * m]
        if kind == CT:
            return v
        if c:
            raise SlotError(f"{kind} slot does not accept a transversal component")
        if kind == CH:
            return v
        if kind in (K10, CK) and not self.in_kernel(a):
            raise SlotError("(1,0) part is not in the Levi kernel")
        if kind in (KBAR, CK) and not self.in_kernel([x.conj() for x in b]):
            raise SlotError("(0,1) part is not in the conjugate Levi kernel")
        if kind == K10 and any(b):
            raise SlotError("K10 slot takes (1,0) vectors")
        if kind == KBAR and any(a):
            raise SlotError("conj-K10 slot takes (0,1) vectors")
        return v

    def ambient(self, v: Sequence) -> tuple:
        return ambient_vector_from_ct(self.h, v)

    def basis(self, kind: str) -> list[tuple]:
        m = self.m
        zero = (ZERO,) * m
        if kind == CT:
            return [tuple(ONE if k == j else ZERO for k in range(2 * m + 1)) for j in range(2 * m + 1)]
        if kind == CH:
            return [tuple(ONE if k == j else ZERO for k in range(2 * m + 1)) for j in range(2 * m)]
        k10 = [tuple(v) + zero + (ZERO,) for v in self.kernel]
        kbar = [zero + tuple(x.conj() for x in v) + (ZERO,) for v in self.kernel]
        return {K10: k10, KBAR: kbar, CK: k10 + kbar}[kind]

    # fields --------------------------------------------------------------------
    def field(self, v: Sequence) -> VectorField:
        """Extension of a CT vector: CH vectors by frame fields, otherwise corrected constant fields."""
        key = tuple(v)
        if key not in self._fields:
            m = self.m
            if not v[2 * m]:
                self._fields[key] = ch_field(self.h, v[:m], v[m:2 * m])
            else:
                self._fields[key] = tangent_field(self.h, self.ambient(v))
        return self._fields[key]

    def admissible_holo(self, a: Sequence) -> VectorField:
        """(1,0) field with value a, Levi-orthogonal to the V frame identically."""
        key = tuple(gr(x) for x in a)
        if key not in self._adm:
            if not self.in_kernel(key):
                raise SlotError("admissible extensions need a Levi-kernel value")
            if not any(key):
                self._adm[key] = holo_field(self.h, key)
            else:
                self._adm[key] = levi_orthogonal_complement(self.h, self.v_fields, [key], self.order)[0]
        return self._adm[key]

    def admissible_anti(self, b: Sequence) -> VectorField:
        return self.admissible_holo([gr(x).conj() for x in b]).conj()

    # tau^2 --------------------------------------------------------------------
    def tau2(self, a: Sequence, b: Sequence) -> GaussianRational:
        """Levi form on a (1,0) vector a and a (0,1) vector with zbar components b."""
        a = [gr(x) for x in a]
        b = [gr(x) for x in b]
        return sum((a[j] * b[k] * self.levi[j, k] for j in range(self.m) for k in range(self.m)), ZERO)

    def levi_tensor(self) -> TensorValue:
        m = self.m
        e = [tuple(ONE if k == j else ZERO for k in range(m)) for j in range(m)]
        hb = [ei + (ZERO,) * (m + 1) for ei in e]
        ab = [(ZERO,) * m + ei + (ZERO,) for ei in e]
        vals = {(j, k): self.levi[j, k] for j in range(m) for k in range(m)}
        return TensorValue("tau2", ("H10", "H01"), (hb, ab), vals, self.frame_record())

    # tau^3 --------------------------------------------------------------------
    def tau3(self, v3, v2, v1) -> GaussianRational:
        """L3 <d'rho,[L2,L1]> at the origin (frame-field extensions)."""
        v3 = self.check(v3, CT)
        v2 = self.check(v2, K10)
        v1 = self.check(v1, KBAR)
        m = self.m
        l2 = holo_field(self.h, v2[:m])
        l1 = antiholo_field(self.h, v1[m:2 * m])
        g = levi_function(self.h, l2, l1)
        return directional_at_origin(g, self.ambient(v3))

    def tau31(self, v3, v2, v1) -> GaussianRational:
        """<d'rho, [L3,[L2,L1]]> at the origin."""
        v3 = self.check(v3, CK)
        v2 = self.check(v2, K10)
        v1 = self.check(v1, KBAR)
        m = self.m
        l2 = holo_field(self.h, v2[:m])
        l1 = antiholo_field(self.h, v1[m:2 * m])
        return pair_at_origin(self.h, lie_bracket(self.field(v3), lie_bracket(l2, l1)))

    def tau21(self, v3, v2, v1, domain: str = "kernel") -> GaussianRational:
        """<T_{L3} T_{L2} theta_cal, L1> at the origin (Lie derivatives of the calibrated contact form).

        ``domain="kernel"``: v3 in CH, v2 and v1 in CK.  ``domain="raw"``
        skips slot checks (used by the diagnostics).
        """
        if domain == "kernel":
            v3 = self.check(v3, CH)
            v2 = self.check(v2, CK)
            v1 = self.check(v1, CK)
        else:
            v3, v2, v1 = (_ct(v, self.m, CT) for v in (v3, v2, v1))
        theta = contact_form(self.h, calibrated=True)
        t = lie_derivative_form(self.field(v3), lie_derivative_form(self.field(v2), theta))
        return t.pair(self.field(v1)).constant()

    def tau3_vanishes(self) -> bool:
        if self._tau3_zero is None:
            self._tau3_zero = self.tau3_array().is_zero()
        return self._tau3_zero

    def tau3_array(self) -> TensorValue:
        b3, b2, b1 = self.basis(CT), self.basis(K10), self.basis(KBAR)
        vals = {}
        m = self.m
        for j, v2 in enumerate(b2):
            for k, v1 in enumerate(b1):
                g = levi_function(self.h, holo_field(self.h, v2[:m]), antiholo_field(self.h, v1[m:2 * m]))
                for i, v3 in enumerate(b3):
                    vals[(i, j, k)] = directional_at_origin(g, self.ambient(v3))
        return TensorValue("tau3", (CT, K10, KBAR), (b3, b2, b1), vals, self.frame_record())

    # tau^4 --------------------------------------------------------------------
    def _require_tau3(self):
        if not self.tau3_vanishes():
            raise AdmissibilityError("tau4 needs tau3 = 0 at the point")

    def levi_jet(self, a2: Sequence, b1: Sequence) -> PolyExpr:
        """<d'rho,[L2, L1]> for admissible extensions of a2 in K10 and b1 in conj K10."""
        l2 = self.admissible_holo(a2)
        l1 = self.admissible_anti(b1)
        return levi_function(self.h, l2, l1)

    def tau4(self, v4, v3, v2, v1) -> GaussianRational:
        """L4 L3 <d'rho,[L2,L1]> at the origin with L2, conj L1 in the kernel up to order 1."""
        self._require_tau3()
        v4 = self.check(v4, CT)
        v3 = self.check(v3, CT)
        v2 = self.check(v2, K10)
        v1 = self.check(v1, KBAR)
        m = self.m
        g = self.levi_jet(v2[:m], v1[m:2 * m])
        return directional_at_origin(self.field(v3)(g), self.ambient(v4))

    def tau4_bracket(self, v4, v3, v2, v1) -> GaussianRational:
        """<d'rho,[L4,[L3,[L2,L1]]]> at the origin (L3, L4 in CH, kernel-valued)."""
        self._require_tau3()
        v4 = self.check(v4, CK)
        v3 = self.check(v3, CK)
        v2 = self.check(v2, K10)
        v1 = self.check(v1, KBAR)
        m = self.m
        inner = lie_bracket(self.admissible_holo(v2[:m]), self.admissible_anti(v1[m:2 * m]))
        return pair_at_origin(self.h, lie_bracket(self.field(v4), lie_bracket(self.field(v3), inner)))

    def tau4_array(self, outer: str = CK) -> TensorValue:
        """tau4 components with the two outer slots over ``outer`` (CK or CT)."""
        self._require_tau3()
        bo = self.basis(outer)
        b2, b1 = self.basis(K10), self.basis(KBAR)
        m = self.m
        vals = {}
        for j, v2 in enumerate(b2):
            for k, v1 in enumerate(b1):
                g = self.levi_jet(v2[:m], v1[m:2 * m])
                for i3, v3 in enumerate(bo):
                    g3 = self.field(v3)(g)
                    for i4, v4 in enumerate(bo):
                        vals[(i4, i3, j, k)] = directional_at_origin(g3, self.ambient(v4))
        return TensorValue("tau4", (outer, outer, K10, KBAR), (bo, bo, b2, b1), vals, self.frame_record())

    def quartic_bracket_check(self) -> bool:
        """Quadruple-bracket route equals the derivative route on CK x CK x K10 x conjK10."""
        t = self.tau4_array(CK)
        bo = self.basis(CK)
        for (i4, i3, j, k), val in t.values.items():
            if self.tau4_bracket(bo[i4], bo[i3], t.bases[2][j], t.bases[3][k]) != val:
                return False
        return True

    def frame_record(self) -> dict:
        rec = {"chart": "recentered" if self.point is not None else "given", "q": self.q,
               "kernel_dim": len(self.kernel), "pairing": "d'rho = i*theta_cal",
               "kernel_basis": [[x.to_json() for x in v] for v in self.kernel]}
        if self.point is not None:
            rec["point"] = [x.to_json() for x in self.point]
        return rec


# module-level entry points -----------------------------------------------------------

def levi_tensor(h: Hypersurface, p: Sequence | None = None) -> TensorValue:
    return TensorLab(h, p).levi_tensor()


def tau3_derivative_route(h, p, v3, v2, v1) -> GaussianRational:
    return TensorLab(h, p).tau3(v3, v2, v1)


def tau31_bracket_route(h, p, v3, v2, v1) -> GaussianRational:
    return TensorLab(h, p).tau31(v3, v2, v1)


def tau21_lie_route(h, p, v3, v2, v1) -> GaussianRational:
    return TensorLab(h, p).tau21(v3, v2, v1)


def tau4(h, p, v4, v3, v2, v1) -> GaussianRational:
    return TensorLab(h, p).tau4(v4, v3, v2, v1)


def quartic_bracket_check(h, p=None) -> bool:
    return TensorLab(h, p).quartic_bracket_check()


# normal-form routes --------------------------------------------------------------------

class NormalFormTensors:
    """tau3 / tau40 read off the cubic and quartic normal forms, with vectors given in the original chart."""

    def __init__(self, h: Hypersurface, p: Sequence | None = None, order: int | None = None,
                 quartic: bool = True):
        order = order or max(h.order, 6)
        self.lab = TensorLab(h, p, order)
        self.cubic = cubic_normal_form(h, p, order)
        self.quartic: QuarticNormalForm | None = quartic_normal_form(h, p, order, self.cubic) if quartic else None
        self.m = h.n - 1
        jac = (self.quartic or self.cubic).change.jacobian()
        self._jinv = jac.inverse()

    def to_nf(self, v: Sequence) -> tuple:
        """CT coordinates in the original chart to (z, zbar, u) derivative directions in the normal-form chart."""
        m = self.m
        v = _ct(v, m, CT)
        amb = self.lab.ambient(v)
        n = m + 1
        hol = self._jinv.apply(amb[:n])
        anti = self._jinv.conj().apply(amb[n:])
        # transversal: real part of w component gives d/dx (zero on tangent vectors), imaginary part d/du
        c = (hol[0] - anti[0]) / (2 * I)
        return tuple(hol[1:]) + tuple(anti[1:]) + (c,)

    def _derivative(self, poly: PolyExpr, vecs: Sequence[tuple]) -> GaussianRational:
        g = poly.ring
        out = poly
        ku = g.index("u")
        for v in vecs:
            coeffs = {}
            for j in range(self.m):
                if v[j]:
                    coeffs[g.holo[j]] = v[j]
                if v[self.m + j]:
                    coeffs[g.anti[j]] = v[self.m + j]
            if v[2 * self.m]:
                coeffs[ku] = v[2 * self.m]
            out = out.directional(coeffs)
        return out.constant()

    def tau3(self, v3, v2, v1) -> GaussianRational:
        v3 = self.lab.check(v3, CT)
        v2 = self.lab.check(v2, K10)
        v1 = self.lab.check(v1, KBAR)
        phi3 = self.cubic.phi.homogeneous(3)
        return self._derivative(phi3, [self.to_nf(v) for v in (v3, v2, v1)])

    def tau40(self, v4, v3, v2, v1) -> GaussianRational:
        if self.quartic is None:
            raise AdmissibilityError("quartic normal form not computed")
        v4 = self.lab.check(v4, CK)
        v3 = self.lab.check(v3, CK)
        v2 = self.lab.check(v2, K10)
        v1 = self.lab.check(v1, KBAR)
        return self._derivative(self.quartic.phi4, [self.to_nf(v) for v in (v4, v3, v2, v1)])

    def tau40_array(self) -> TensorValue:
        lab = self.lab
        bk, b2, b1 = lab.basis(CK), lab.basis(K10), lab.basis(KBAR)
        vals = {}
        for (i4, v4), (i3, v3), (j, v2), (k, v1) in product(enumerate(bk), enumerate(bk), enumerate(b2), enumerate(b1)):
            vals[(i4, i3, j, k)] = self.tau40(v4, v3, v2, v1)
        return TensorValue("tau40", (CK, CK, K10, KBAR), (bk, bk, b2, b1), vals,
                           dict(lab.frame_record(), route="normal form"))


def tau40_normalform_route(h, p, v4, v3, v2, v1) -> GaussianRational:
    return NormalFormTensors(h, p).tau40(v4, v3, v2, v1)


# symmetric extensions ---------------------------------------------------------------------

@dataclass
class SymmetricForm:
    """Fully symmetric multilinear form on CK given by a homogeneous polynomial in (v, vbar).

    ``evaluate(x1, .., xk)`` is the iterated directional derivative
    d_{x1}...d_{xk} P, each x a kernel-coordinate vector (alpha, beta):
    alpha on the kernel z variables, beta on their conjugates.
    """

    name: str
    poly: PolyExpr
    degree: int

    def evaluate(self, *vecs) -> GaussianRational:
        if len(vecs) != self.degree:
            raise ValueError(f"{self.name} takes {self.degree} arguments")
        g = self.poly.ring
        k = len(g.holo)
        out = self.poly
        for v in vecs:
            v = [gr(x) for x in v]
            coeffs = {g.holo[j]: v[j] for j in range(k) if v[j]}
            coeffs.update({g.anti[j]: v[k + j] for j in range(k) if v[k + j]})
            out = out.directional(coeffs)
        return out.constant()

    def is_zero(self) -> bool:
        return self.poly.is_zero()


def symmetric_extension(t: NormalFormTensors, which: str = "tau40") -> SymmetricForm:
    """tilde tau30 or tilde tau40: the normal-form polynomial on the kernel variables."""
    from .poly import vector_ring

    if which == "tau40":
        if t.quartic is None:
            raise AdmissibilityError("quartic normal form not computed")
        return SymmetricForm("tau40~", t.quartic.phi4_in_kernel(), 4)
    if which == "tau30":
        cnf = t.cubic
        g = cnf.phi.ring
        ker = cnf.kernel_indices
        vr = vector_ring(len(ker))
        ku = g.index("u")
        terms = {}
        for e, c in cnf.phi.homogeneous(3).terms.items():
            if e[ku]:
                continue
            if any(e[g.holo[j]] or e[g.anti[j]] for j in range(cnf.q)):
                continue
            f = [0] * vr.nvars
            for a, j in enumerate(ker):
                f[a] = e[g.holo[j]]
                f[a + len(ker)] = e[g.anti[j]]
            terms[tuple(f)] = c
        return SymmetricForm("tau30~", PolyExpr(vr, terms), 3)
    raise ValueError("symmetric extensions exist for tau30 and tau40 only")


# diagnostics -----------------------------------------------------------------------------

def twisted_fields(h: Hypersurface, c, nondeg: int = 0, kern: int = 1) -> tuple[VectorField, VectorField, VectorField]:
    """L3 = d_{z_k}, L2 = d_{z_k} + c z_k L1, L1 = the (1,0) field along z_j (j nondegenerate, k kernel)."""
    r = h.ring
    m = h.m
    ek = [1 if i == kern else 0 for i in range(m)]
    ej = [1 if i == nondeg else 0 for i in range(m)]
    l1 = holo_field(h, ej)
    l3 = holo_field(h, ek)
    zk = PolyExpr.var(r, 1 + kern)
    l2 = l3 + l1.scale(zk.scale(gr(c)))
    return l3, l2, l1


def twisted_kernel_field(h: Hypersurface, c, nondeg: int = 0, kern: int = 1) -> VectorField:
    """L = d_{z_k} + c z_k (d_{z_j} + ...): kernel value at 0, 1-jet not Levi-orthogonal."""
    return twisted_fields(h, c, nondeg, kern)[1]


def double_bracket_diagnostic(h: Hypersurface, cs: Sequence, nondeg: int = 0, kern: int = 1) -> dict:
    """c -> <d'rho, [L3, [L2, conj L1]]>(0) for the twisted triple (no slot checks)."""
    out = {}
    for c in cs:
        l3, l2, l1 = twisted_fields(h, c, nondeg, kern)
        out[gr(c)] = pair_at_origin(h, lie_bracket(l3, lie_bracket(l2, l1.conj())))
    return out


def quadruple_bracket_diagnostic(h: Hypersurface, cs: Sequence, nondeg: int = 0, kern: int = 1) -> dict:
    """c -> (<d'rho,[L,[Lbar,[L,Lbar]]]>(0), (L Lbar <d'rho,[L,Lbar]>)(0)) for the twisted kernel field."""
    out = {}
    for c in cs:
        l = twisted_kernel_field(h, c, nondeg, kern)
        lb = l.conj()
        inner = lie_bracket(l, lb)
        quad = pair_at_origin(h, lie_bracket(l, lie_bracket(lb, inner)))
        deriv = l(lb(levi_function(h, l, lb))).constant()
        out[gr(c)] = (quad, deriv)
    return out


def lie_route_extension_diagnostic(h: Hypersurface, v3, v2, v1, perturbations: Sequence[PolyExpr]) -> list:
    """<T_{L3'} T_{L2} theta_cal, L1>(0) with L3' = (1 + f) L3 for each f vanishing at 0.

    Tensorial slots give one value for every f; with a transversal first
    slot the value moves with df (no slot checks are applied).
    """
    lab = TensorLab(h)
    v3, v2, v1 = (_ct(v, lab.m, CT) for v in (v3, v2, v1))
    theta = contact_form(lab.h, calibrated=True)
    inner = lie_derivative_form(lab.field(v2), theta)
    l3 = lab.field(v3)
    out = []
    for f in perturbations:
        if f.constant():
            raise ValueError("perturbations must vanish at the origin")
        t = lie_derivative_form(l3 + l3.scale(f), inner)
        out.append(t.pair(lab.field(v1)).constant())
    return out
