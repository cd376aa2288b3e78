"""Levi rank, pseudoconvexity, holomorphic kernels, type <= 4 and multitype prefixes."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Sequence

import numpy as np

from . import _kernels
from .exact import ONE, ZERO, ExactMatrix, GaussianRational, gr, hermitian_signature, is_pd, is_psd, nullspace, span_rank
from .geometry import Hypersurface, point_from_graph
from .normal_form import NormalFormError, QuarticNormalForm, quartic_normal_form
from .poly import PolyExpr, vector_ring
from .sheaves import levi_kernel, levi_matrix
from .tensors import CK, CT, K10, KBAR, NormalFormTensors, TensorLab


class NotPseudoconvexError(ValueError):
    pass


NUMERIC_TOL = 1e-9


def levi_rank_kernel(h: Hypersurface, p: Sequence | None = None) -> tuple[int, list[tuple]]:
    hc = (h.recentered(p) if p is not None else h).with_order(3)
    a = levi_matrix(hc)
    ker = levi_kernel(a)
    return hc.m - len(ker), ker


# pseudoconvexity ------------------------------------------------------------------

@dataclass
class PseudoconvexCertificate:
    pseudoconvex: bool
    signature: tuple
    orientation: int
    sampled: list = field(default_factory=list)
    witness: dict | None = None

    def __bool__(self):
        return self.pseudoconvex

    def to_json(self) -> dict:
        out = {"pseudoconvex": self.pseudoconvex, "signature": list(self.signature),
               "orientation": self.orientation, "sampled_points": len(self.sampled)}
        if self.witness:
            out["witness"] = self.witness
        return out


def default_sample(m: int, count: int = 32, radius=Fraction(1, 8), seed: int = 0) -> list[tuple]:
    """Deterministic rational (z, u) sample in a small box around 0, signs chosen independently."""
    r = Fraction(radius)
    vals = [r, -r, r / 2, -r / 2, Fraction(0)]
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        z = tuple(GaussianRational(rng.choice(vals), rng.choice(vals)) for _ in range(m))
        out.append((z, rng.choice(vals)))
    return out


def is_pseudoconvex_at(h: Hypersurface, p: Sequence | None = None, sample: Sequence | None = None,
                       count: int = 32) -> PseudoconvexCertificate:
    """Semidefinite Levi form at p, and with the same orientation at sampled nearby points of M.

    Sample points are (z, u) pairs relative to p; Re w is solved exactly
    (points without a rational solution are skipped).
    """
    hc = (h.recentered(p) if p is not None else h).with_order(3)
    a = levi_matrix(hc)
    sig = hermitian_signature(a)
    pos, neg, _ = sig
    if pos and neg:
        return PseudoconvexCertificate(False, sig, 0, [], {"point": "p", "signature": list(sig)})
    orient = 1 if pos else (-1 if neg else 0)
    base = h.recentered(p) if p is not None else h
    pts = list(sample) if sample is not None else default_sample(base.m, count)
    checked = []
    for z, u in pts:
        pt = point_from_graph(base, z, u)
        if pt is None:
            continue
        sa = levi_matrix(base.recentered(pt).with_order(3))
        s = hermitian_signature(sa)
        checked.append(s)
        if s[0] and s[1]:
            return PseudoconvexCertificate(False, sig, orient, checked,
                                           {"point": [x.to_json() for x in pt], "signature": list(s)})
        o = 1 if s[0] else (-1 if s[1] else 0)
        if o and orient and o != orient:
            return PseudoconvexCertificate(False, sig, orient, checked,
                                           {"point": [x.to_json() for x in pt], "signature": list(s)})
        orient = orient or o
    return PseudoconvexCertificate(True, sig, orient, checked)


# holomorphic kernels ---------------------------------------------------------------

def _holo_anti(ring) -> tuple[list[int], list[int]]:
    return list(ring.holo), list(ring.anti)


def holomorphic_kernel(p: PolyExpr, variables: Sequence[int] | None = None) -> list[tuple]:
    """Basis of {v : d_v P = 0 and d_{conj v} P = 0} over the (1,0) variables of the ring.

    ``variables`` restricts to a subset of indices into ``ring.holo``.
    """
    r = p.ring
    holo, anti = _holo_anti(r)
    idx = list(range(len(holo))) if variables is None else list(variables)
    if not idx:
        return []
    cols_h = [p.diff(holo[j]) for j in idx]
    # conj(d_{zbar_j} P): v enters linearly
    cols_a = [p.diff(anti[j]).conjugate() for j in idx]
    rows = []
    for cols in (cols_h, cols_a):
        monos = sorted({e for c in cols for e in c.terms})
        for e in monos:
            rows.append([c.coeff(e) for c in cols])
    if not rows:
        return [tuple(ONE if k == j else ZERO for k in range(len(idx))) for j in range(len(idx))]
    return nullspace(ExactMatrix(rows, len(idx)))


def poly_rank(p: PolyExpr, variables: Sequence[int] | None = None) -> int:
    n = len(p.ring.holo) if variables is None else len(variables)
    return n - len(holomorphic_kernel(p, variables))


# kernel coincidence -------------------------------------------------------------------

def _slot_kernel(t, slot: int) -> list[tuple]:
    """Kernel of a component array in one slot, as vectors in that slot's basis coordinates."""
    dims = [len(b) for b in t.bases]
    others = [range(d) for s, d in enumerate(dims) if s != slot]
    rows = []
    for rest in product(*others):
        row = []
        for i in range(dims[slot]):
            idx = list(rest)
            idx.insert(slot, i)
            row.append(t.values.get(tuple(idx), ZERO))
        rows.append(row)
    if dims[slot] == 0:
        return []
    if not rows:
        return [tuple(ONE if k == j else ZERO for k in range(dims[slot])) for j in range(dims[slot])]
    return nullspace(ExactMatrix(rows, dims[slot]))


def _combine(basis: Sequence[tuple], coords: Sequence[tuple]) -> list[tuple]:
    out = []
    for c in coords:
        dim = len(basis[0])
        out.append(tuple(sum((c[k] * basis[k][i] for k in range(len(basis))), ZERO) for i in range(dim)))
    return out


@dataclass
class KernelReport:
    slot_kernels: list
    holomorphic_kernel: list
    coincide: bool | None
    checked: bool

    def to_json(self) -> dict:
        enc = lambda vs: [[x.to_json() for x in v] for v in vs]  # noqa: E731
        return {"slot_kernels": [enc(k) for k in self.slot_kernels],
                "holomorphic_kernel": enc(self.holomorphic_kernel),
                "coincide": self.coincide, "asserted": self.checked}


def kernel_coincidence_check(h: Hypersurface, p: Sequence | None = None, pseudoconvex: bool | None = None
                             ) -> KernelReport:
    """Slot-wise kernels of tau40 (in normal-form z coordinates) against the holomorphic kernel of phi4.

    Slots 1 and 2 are compared through their (1,0) parts, slot 3 with V
    and slot 4 with conj V.  Equality is asserted only for pseudoconvex input.
    """
    nft = NormalFormTensors(h, p)
    t = nft.tau40_array()
    m = nft.m
    ker_idx = nft.quartic.kernel_indices
    v_nf = holomorphic_kernel(nft.quartic.phi4, ker_idx)
    v_nf = [tuple(ZERO if j not in ker_idx else c[ker_idx.index(j)] for j in range(m)) for c in v_nf]
    slots = []
    for s in range(4):
        coords = _slot_kernel(t, s)
        vecs = _combine(t.bases[s], coords) if coords else []
        nf = [nft.to_nf(v) for v in vecs]
        if s in (0, 1):
            # holomorphic part of the slot kernel: vectors with zero (0,1) part
            nf = _holomorphic_subspace(nf, m)
            slots.append([tuple(v[:m]) for v in nf])
        elif s == 2:
            slots.append([tuple(v[:m]) for v in nf])
        else:
            slots.append([tuple(x.conj() for x in v[m:2 * m]) for v in nf])
    if pseudoconvex is None:
        pseudoconvex = bool(is_pseudoconvex_at(h, p))
    same = [_same_span(k, v_nf, m) for k in slots]
    return KernelReport(slots, v_nf, all(same) if pseudoconvex else None, bool(pseudoconvex))


def _holomorphic_subspace(vecs: Sequence[tuple], m: int) -> list[tuple]:
    if not vecs:
        return []
    # combinations with zero (0,1) part
    rows = [[v[m + j] for v in vecs] for j in range(m)]
    coords = nullspace(ExactMatrix(rows, len(vecs)))
    return _combine(vecs, coords) if coords else []


def _same_span(a, b, m) -> bool:
    if not a and not b:
        return True
    ra = span_rank(a, m) if a else 0
    rb = span_rank(b, m) if b else 0
    return ra == rb == span_rank(list(a) + list(b), m)


def slot_kernel_dims(h: Hypersurface, p: Sequence | None = None) -> list[int]:
    rep = kernel_coincidence_check(h, p, pseudoconvex=False)
    return [span_rank(k, h.n - 1) if k else 0 for k in rep.slot_kernels]


# type <= 4 -------------------------------------------------------------------------------

@dataclass
class TypeVerdict:
    verdict: str
    tier: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "tier": self.tier, **self.detail}


def _phi22(qnf: QuarticNormalForm) -> PolyExpr:
    p = qnf.phi4_in_kernel()
    r = p.ring
    k = len(r.holo)
    return p.select(lambda e: sum(e[:k]) == 2 and sum(e[k:]) == 2)


def _sym2_gram(p22: PolyExpr) -> ExactMatrix:
    """Hermitian matrix C with phi22(v) = sum conj(m_a) C_ab m_b, m = monomials v^alpha, |alpha| = 2."""
    r = p22.ring
    k = len(r.holo)
    monos = list(combinations_with_replacement(range(k), 2))

    def exp_of(pair):
        e = [0] * k
        for j in pair:
            e[j] += 1
        return e

    rows = []
    for a in monos:
        row = []
        for b in monos:
            e = exp_of(b) + exp_of(a)
            row.append(p22.coeff(tuple(e)))
        rows.append(row)
    return ExactMatrix(rows, len(monos))


def _kernel_misses_veronese(gram: ExactMatrix, k: int) -> bool:
    """Kernel of the Gram matrix has zero pure-square coordinates v_j^2.

    Then m(v) = (v^alpha) in the kernel forces every v_j^2 = 0, so phi22 > 0 off 0.
    """
    monos = list(combinations_with_replacement(range(k), 2))
    pure = [i for i, (a, b) in enumerate(monos) if a == b]
    return all(not vec[i] for vec in nullspace(gram) for i in pure)


def _veronese_meet(gram: ExactMatrix, k: int):
    """Does null(gram) contain some m(v) = (v_a v_b), v != 0?  Returns (meets, witness) or None if undecided.

    One-dimensional null space n: m(v) in span(n) iff the symmetric matrix
    S with S_ab = n_ab has rank 1, and then any nonzero column of S is a
    witness (column j of v v^T is v_j v).  For k = 2 a two-dimensional null
    space is a projective line in P^2 and always meets the conic
    x00 x11 = x01^2.
    """
    monos = list(combinations_with_replacement(range(k), 2))
    null = nullspace(gram)
    if len(null) == 1:
        n = null[0]
        sym = [[ZERO] * k for _ in range(k)]
        for i, (a, b) in enumerate(monos):
            sym[a][b] = sym[b][a] = gr(n[i])
        mat = ExactMatrix(sym, k)
        if mat.rank() != 1:
            return False, None
        col = next(c for c in range(k) if any(sym[r][c] for r in range(k)))
        return True, [sym[r][col] for r in range(k)]
    if k == 2 and len(null) == 2:
        return True, None
    return None


def _to_arrays(p: PolyExpr):
    r = p.ring
    k = len(r.holo)
    items = list(p.terms.items())
    coef = np.array([complex(c) for _, c in items], dtype=np.complex128)
    ez = np.array([[e[r.holo[j]] for j in range(k)] for e, _ in items], dtype=np.int64).reshape(len(items), k)
    ezb = np.array([[e[r.anti[j]] for j in range(k)] for e, _ in items], dtype=np.int64).reshape(len(items), k)
    return coef, ez, ezb


def _rationalize(x: np.ndarray, den: int = 64) -> list[GaussianRational]:
    scale = np.max(np.abs(x)) or 1.0
    y = x / scale
    return [GaussianRational(Fraction(round(v.real * den), den), Fraction(round(v.imag * den), den)) for v in y]


def dangelo_type_le4(h: Hypersurface, p: Sequence | None = None, check_pseudoconvex: bool = True,
                     qnf: QuarticNormalForm | None = None) -> TypeVerdict:
    """type2 / type4 / type>4 (or undecided-numeric) from the quartic normal form."""
    if check_pseudoconvex:
        cert = is_pseudoconvex_at(h, p)
        if not cert:
            raise NotPseudoconvexError("type decision needs a pseudoconvex point")
    q, ker = levi_rank_kernel(h, p)
    if not ker:
        return TypeVerdict("type2", "exact", {"q2": q})
    qnf = qnf or quartic_normal_form(h, p, max(h.order, 6))
    p22 = _phi22(qnf)
    k = len(ker)
    r = p22.ring
    # coordinate witnesses
    for j in range(k):
        e = [0] * (2 * k)
        e[j] = 2
        e[k + j] = 2
        if not p22.coeff(tuple(e)):
            return TypeVerdict("type>4", "exact", {"witness": [1 if i == j else 0 for i in range(k)]})
    if k == 1:
        c = p22.coeff((2, 2))
        return TypeVerdict("type4" if c.re > 0 else "type>4", "exact", {"coefficient": c.to_json()})
    gram = _sym2_gram(p22)
    meets_conic = False
    if is_pd(gram):
        return TypeVerdict("type4", "exact", {"certificate": "sym2-gram-pd"})
    if is_psd(gram):
        if _kernel_misses_veronese(gram, k):
            return TypeVerdict("type4", "exact", {"certificate": "sym2-gram-psd-veronese"})
        meet = _veronese_meet(gram, k)
        if meet is not None:
            hit, wit = meet
            if not hit:
                return TypeVerdict("type4", "exact", {"certificate": "sym2-gram-psd-veronese"})
            if wit is not None:
                return TypeVerdict("type>4", "exact", {"witness": [x.to_json() for x in wit]})
            meets_conic = True
    coef, ez, ezb = _to_arrays(p22)
    val, arg = _kernels.sphere_minimum(coef, ez, ezb, k)
    if val > NUMERIC_TOL and not meets_conic:
        return TypeVerdict("type4", "numeric", {"minimum": f"{val:.6e}", "tolerance": NUMERIC_TOL})
    for den in (4, 16, 64, 256):
        v = _rationalize(arg, den)
        if any(v) and not p22.evaluate(list(v) + [x.conj() for x in v]):
            return TypeVerdict("type>4", "exact", {"witness": [x.to_json() for x in v]})
    if meets_conic:
        return TypeVerdict("type>4", "exact", {"certificate": "sym2-null-line-meets-conic"})
    return TypeVerdict("undecided-numeric", "numeric", {"minimum": f"{val:.6e}", "tolerance": NUMERIC_TOL})


# multitype --------------------------------------------------------------------------------

def is_admissible(weights: Sequence) -> bool:
    """Each finite lambda_k admits a k-tuple a with a_k > 0 and sum a_j / lambda_j = 1."""
    lams = []
    for k, lam in enumerate(weights):
        if lam is None or lam == float("inf"):
            lams.append(None)
            continue
        lam = Fraction(lam)
        lams.append(lam)
        inv = [1 / x for x in lams if x is not None]
        target = Fraction(1)
        last = 1 / lam
        ok = False
        for ak in range(1, int(lam) + 1):
            rest = target - ak * last
            if rest < 0:
                break
            if _representable(rest, inv[:-1]):
                ok = True
                break
        if not ok:
            return False
    return True


def _representable(x: Fraction, parts: Sequence[Fraction]) -> bool:
    if x == 0:
        return True
    if not parts:
        return False
    head, tail = parts[0], parts[1:]
    n = 0
    while n * head <= x:
        if _representable(x - n * head, tail):
            return True
        n += 1
    return False


@dataclass
class Multitype:
    entries: list
    q2: int
    q4: int
    admissible: bool
    absent: int = 0
    order: int | None = None

    def render(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"

    def to_json(self) -> dict:
        out = {"entries": [str(e) for e in self.entries], "q2": self.q2, "q4": self.q4,
               "admissible": self.admissible}
        if self.absent:
            out["absent_from_jet"] = {"directions": self.absent, "order": self.order}
        return out


def multitype_prefix(h: Hypersurface, p: Sequence | None = None, check_pseudoconvex: bool = True,
                     qnf: QuarticNormalForm | None = None) -> Multitype:
    """1, then q2 twos, q4 fours, then '>4' per remaining direction.

    Directions of the kernel on which the whole known N-jet of phi does not
    depend are counted in ``absent`` (their entry is infinite up to order N).
    """
    if check_pseudoconvex and not is_pseudoconvex_at(h, p):
        raise NotPseudoconvexError("multitype prefix needs a pseudoconvex point")
    qnf = qnf or quartic_normal_form(h, p, max(h.order, 6))
    m = h.n - 1
    q2 = qnf.q
    ker = qnf.kernel_indices
    q4 = poly_rank(qnf.phi4, ker)
    rest = m - q2 - q4
    # directions of the kernel absent from the whole known jet
    phi_rest = qnf.phi.truncate(qnf.phi.prec)
    absent = len(holomorphic_kernel(phi_rest, ker)) if ker else 0
    absent = min(absent, rest)
    entries = [1] + [2] * q2 + [4] * q4 + [">4"] * rest
    finite = [e for e in entries if isinstance(e, int)]
    return Multitype(entries, q2, q4, is_admissible(finite), absent, qnf.order)


# T_p S -------------------------------------------------------------------------------------

def _real_param_matrix(m: int) -> list[list[GaussianRational]]:
    """CT coordinates of the real tangent vector with parameters (s_1..s_m, t_1..t_m, c)."""
    i = GaussianRational(0, 1)
    cols = []
    for j in range(m):
        v = [ZERO] * (2 * m + 1)
        v[j] = ONE
        v[m + j] = ONE
        cols.append(v)
    for j in range(m):
        v = [ZERO] * (2 * m + 1)
        v[j] = i
        v[m + j] = -i
        cols.append(v)
    v = [ZERO] * (2 * m + 1)
    v[2 * m] = ONE
    cols.append(v)
    return cols


def _real_nullspace(rows: Sequence[Sequence[GaussianRational]], cols: Sequence[Sequence[GaussianRational]]
                    ) -> list[tuple]:
    n = len(cols)
    real_rows = []
    for row in rows:
        combo = [sum((row[k] * c[k] for k in range(len(row))), ZERO) for c in cols]
        real_rows.append([x.re for x in combo])
        real_rows.append([x.im for x in combo])
    if not real_rows:
        return [tuple(ONE if k == j else ZERO for k in range(n)) for j in range(n)]
    return nullspace(ExactMatrix(real_rows, n))


@dataclass
class TangentSpaceS:
    basis: list
    kernel_part: list
    totally_real: bool

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        enc = lambda vs: [[x.to_json() for x in v] for v in vs]  # noqa: E731
        return {"dim": self.dim, "basis": enc(self.basis), "kernel_part": enc(self.kernel_part),
                "totally_real": self.totally_real}


def tangent_space_S(h: Hypersurface, p: Sequence | None = None, lab: TensorLab | None = None) -> TangentSpaceS:
    """Real tangent vectors v with tau4(v, ., ., .) = 0 (CT coordinates)."""
    lab = lab or TensorLab(h, p)
    m = lab.m
    t = lab.tau4_array(CT)
    rows = []
    dims = [len(b) for b in t.bases]
    for rest in product(range(dims[1]), range(dims[2]), range(dims[3])):
        rows.append([t.values.get((i,) + rest, ZERO) for i in range(dims[0])])
    cols = _real_param_matrix(m)
    null = _real_nullspace(rows, cols)
    basis = _combine(cols, null) if null else []
    # intersection with the real kernel directions (a in K, conj a, c = 0)
    kcols = []
    for v in lab.kernel:
        for unit in (ONE, GaussianRational(0, 1)):
            a = [unit * x for x in v]
            kcols.append(list(a) + [x.conj() for x in a] + [ZERO])
    kernel_part = []
    if basis and kcols:
        # x in span_R(basis) and in span_R(kcols): real nullspace of [basis | -kcols]
        allc = list(basis) + [[-x for x in c] for c in kcols]
        real_rows = []
        for i in range(2 * m + 1):
            real_rows.append([gr(c[i]).re for c in allc])
            real_rows.append([gr(c[i]).im for c in allc])
        sol = nullspace(ExactMatrix(real_rows, len(allc)))
        kernel_part = _combine(basis, [s[:len(basis)] for s in sol]) if sol else []
    totally_real = _is_totally_real(kernel_part, m)
    return TangentSpaceS(basis, kernel_part, totally_real)


def _is_totally_real(vecs: Sequence[tuple], m: int) -> bool:
    if not vecs:
        return True
    i = GaussianRational(0, 1)

    def realify(v):
        return [x.re for x in v[:m]] + [x.im for x in v[:m]] + [gr(v[2 * m]).re]

    jv = [tuple(i * x for x in v[:m]) + tuple(-i * x for x in v[m:2 * m]) + (v[2 * m],) for v in vecs]
    base = [realify(v) for v in vecs]
    both = base + [realify(v) for v in jv]
    return span_rank(both, 2 * m + 1) == 2 * span_rank(base, 2 * m + 1)


# plurisubharmonic quartics -----------------------------------------------------------------

@dataclass
class PshVerdict:
    psh: bool | None
    tier: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"psh": self.psh, "tier": self.tier, **self.detail}


def complex_hessian(p: PolyExpr) -> list[list[PolyExpr]]:
    r = p.ring
    return [[p.diff(a).diff(b) for b in r.anti] for a in r.holo]


def is_psh_quartic(p: PolyExpr, samples: int = 2048) -> PshVerdict:
    """Plurisubharmonicity of a real homogeneous quartic in (z, zbar) (vector ring).

    Exact certificate: Hermitian PSD Gram matrix in the monomials z_a xi_j,
    zbar_a xi_j for the form xi^* H(z) xi.  Otherwise numeric eigenvalue
    sampling, with an exact rational witness confirming any failure.
    """
    r = p.ring
    k = len(r.holo)
    hess = complex_hessian(p)
    gram_ok = False
    for lam in (Fraction(1, 2), Fraction(1), Fraction(0), Fraction(1, 4), Fraction(3, 4)):
        if is_psd(_psh_gram(hess, k, lam)):
            gram_ok = True
            break
    if gram_ok:
        return PshVerdict(True, "exact", {"certificate": "gram", "split": str(lam)})
    entries = [[_to_arrays(e) for e in row] for row in hess]
    val, arg = _kernels.min_hessian_eigenvalue(entries, k, samples)
    if val < -NUMERIC_TOL:
        for den in (4, 16, 64, 256, 1024):
            z = _rationalize(arg, den)
            pt = list(z) + [x.conj() for x in z]
            h = ExactMatrix([[e.evaluate(pt) for e in row] for row in hess], k)
            if not is_psd(h):
                return PshVerdict(False, "exact", {"witness": [x.to_json() for x in z]})
        return PshVerdict(False, "numeric", {"min_eigenvalue": f"{val:.6e}", "tolerance": NUMERIC_TOL})
    return PshVerdict(True, "numeric", {"min_eigenvalue": f"{val:.6e}", "tolerance": NUMERIC_TOL})


def _psh_gram(hess, k: int, lam: Fraction) -> ExactMatrix:
    # Q(z, xi) = sum_{j,l} H_{j l}(z) xi_j conj(xi_l); monomial vector m = [z_a xi_j ; zbar_a xi_j]
    size = 2 * k * k
    g = [[ZERO] * size for _ in range(size)]

    def idx(block, a, j):
        return block * k * k + a * k + j

    for j in range(k):
        for l in range(k):
            hjl = hess[j][l]
            # xi_j conj(xi_l): row index for conj side is l, column side j
            for e, c in hjl.terms.items():
                zs = [a for a in range(k) for _ in range(e[a])]
                zbs = [a for a in range(k) for _ in range(e[k + a])]
                if len(zs) == 1 and len(zbs) == 1:
                    b, a = zs[0], zbs[0]
                    # conj(z_a xi_l) * z_b xi_j ; conj(zbar_b xi_l) * zbar_a xi_j
                    g[idx(0, a, l)][idx(0, b, j)] += c * lam
                    g[idx(1, b, l)][idx(1, a, j)] += c * (1 - lam)
                elif len(zs) == 2:
                    a, b = zs
                    # conj(zbar_a xi_l) * z_b xi_j, symmetrized over a <-> b
                    if a == b:
                        g[idx(1, a, l)][idx(0, b, j)] += c
                    else:
                        g[idx(1, a, l)][idx(0, b, j)] += c / 2
                        g[idx(1, b, l)][idx(0, a, j)] += c / 2
                elif len(zbs) == 2:
                    a, b = zbs
                    if a == b:
                        g[idx(0, a, l)][idx(1, b, j)] += c
                    else:
                        g[idx(0, a, l)][idx(1, b, j)] += c / 2
                        g[idx(0, b, l)][idx(1, a, j)] += c / 2
    return ExactMatrix(g, size)


# bundle ---------------------------------------------------------------------------------------

@dataclass
class PointInvariants:
    point: tuple | None
    q2: int
    kernel: list
    pseudoconvex: PseudoconvexCertificate
    type4: TypeVerdict | None
    q4: int | None
    multitype: Multitype | None
    tangent_S: TangentSpaceS | None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        enc = lambda vs: [[x.to_json() for x in v] for v in vs]  # noqa: E731
        return {
            "point": None if self.point is None else [gr(x).to_json() for x in self.point],
            "levi_rank": self.q2,
            "levi_kernel": enc(self.kernel),
            "pseudoconvex": self.pseudoconvex.to_json(),
            "type": None if self.type4 is None else self.type4.to_json(),
            "quartic_rank": self.q4,
            "multitype": None if self.multitype is None else self.multitype.to_json(),
            "tangent_space_S": None if self.tangent_S is None else self.tangent_S.to_json(),
            "notes": list(self.notes),
        }


def point_invariants(h: Hypersurface, p: Sequence | None = None, order: int | None = None) -> PointInvariants:
    order = order or max(h.order, 6)
    q, ker = levi_rank_kernel(h, p)
    cert = is_pseudoconvex_at(h, p)
    notes = []
    type4 = mt = ts = None
    q4 = None
    if cert:
        try:
            qnf = quartic_normal_form(h, p, order)
        except NormalFormError as exc:
            notes.append(f"quartic normal form unavailable: {exc}")
        else:
            type4 = dangelo_type_le4(h, p, check_pseudoconvex=False, qnf=qnf)
            mt = multitype_prefix(h, p, check_pseudoconvex=False, qnf=qnf)
            q4 = mt.q4
            ts = tangent_space_S(h, p, TensorLab(h, p, order))
    else:
        notes.append("not pseudoconvex: type and multitype refused")
    return PointInvariants(tuple(gr(x) for x in p) if p is not None else None, q, ker, cert, type4, q4, mt, ts, notes)
