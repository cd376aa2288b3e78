"""Higher Levi-form derivatives along ordered lists of fields and the boundary-system step.

A list is written outermost first: ``(L^m, ..., L^1)`` with derivative
``L^m ... L^3 <d'rho, [L^2, L^1]>``.  Entries are ``Entry(source, conj)``
where ``source`` indexes the fields of a :class:`BoundarySystemState`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Sequence

from .exact import ZERO, GaussianRational, gr
from .geometry import Hypersurface, VectorField, directional_at_origin, levi_function
from .poly import PolyExpr
from .tensors import NormalFormTensors, TensorLab

DEFAULT_BUDGET = 4


@dataclass(frozen=True)
class Entry:
    source: int
    conj: bool = False

    def render(self) -> str:
        return f"conj(L{self.source})" if self.conj else f"L{self.source}"


@dataclass(frozen=True)
class DerivativeList:
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def weight(self, weights: dict) -> Fraction:
        return sum((Fraction(1) / Fraction(weights[e.source]) for e in self.entries), Fraction(0))

    def is_ordered(self) -> bool:
        src = [e.source for e in self.entries]
        return all(a >= b for a, b in zip(src, src[1:]))

    def render(self) -> str:
        return "(" + ", ".join(e.render() for e in self.entries) + ")"


def list_derivative(h: Hypersurface, fields: Sequence[VectorField]) -> PolyExpr:
    """L^m ... L^3 <d'rho, [L^2, L^1]> for fields given outermost first."""
    if len(fields) < 2:
        raise ValueError("lists have length >= 2")
    g = levi_function(h, fields[-2], fields[-1])
    for f in reversed(fields[:-2]):
        g = f(g)
    return g


@dataclass
class BoundarySystemState:
    """Boundary system at one point (moved to the origin of ``lab.h``).

    Sources 2..q+1 are the Levi-nondegenerate fields (weight 2); later
    sources are added by :func:`boundary_system_step`.
    """

    lab: TensorLab
    fields: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    @classmethod
    def start(cls, h: Hypersurface, p: Sequence | None = None, order: int | None = None,
              v_frame: Sequence | None = None) -> "BoundarySystemState":
        lab = TensorLab(h, p, order, v_frame)
        st = cls(lab)
        st.functions[1] = lab.h.rho
        st.weights[1] = 1
        for k, f in enumerate(lab.v_fields, start=2):
            st.fields[k] = f
            st.values[k] = tuple(c for c in f.value()[1:lab.h.n])
            st.weights[k] = 2
        return st

    @property
    def h(self) -> Hypersurface:
        return self.lab.h

    @property
    def nu(self) -> int:
        return max([1] + list(self.fields))

    @property
    def q(self) -> int:
        return self.lab.q

    def kernel_sources(self) -> list[int]:
        return [k for k in sorted(self.fields) if k >= self.q + 2]

    def field_of(self, e: Entry) -> VectorField:
        f = self.fields[e.source]
        return f.conj() if e.conj else f

    def ct_value(self, e: Entry) -> tuple:
        m = self.lab.m
        a = self.values[e.source]
        if e.conj:
            return (ZERO,) * m + tuple(x.conj() for x in a) + (ZERO,)
        return tuple(a) + (ZERO,) * (m + 1)

    def admits(self, v: Sequence) -> bool:
        """v lies in T^{10}_{nu+1}: Levi-kernel value annihilated by d'r_k for the constructed r_k."""
        v = [gr(x) for x in v]
        if not self.lab.in_kernel(v):
            return False
        n = self.h.n
        amb = [ZERO] + v + [ZERO] * n
        for k, r in self.functions.items():
            if k < 2:
                continue
            if directional_at_origin(r, amb):
                return False
        return True

    def add_field(self, fld: VectorField, value: Sequence, weight) -> int:
        k = max(self.nu + 1, self.q + 2)
        self.fields[k] = fld
        self.values[k] = tuple(gr(x) for x in value)
        self.weights[k] = weight
        return k

    def evaluate(self, lst: DerivativeList) -> GaussianRational:
        return list_derivative(self.h, [self.field_of(e) for e in lst.entries]).constant()

    def to_json(self) -> dict:
        return {
            "nu": self.nu,
            "q": self.q,
            "weights": {str(k): str(v) for k, v in sorted(self.weights.items())},
            "values": {str(k): [x.to_json() for x in v] for k, v in sorted(self.values.items())},
            "trace": self.trace,
        }


def candidate_weights(weights: dict, sources: Sequence[int], budget=DEFAULT_BUDGET) -> list[Fraction]:
    """All alpha = c / (1 - s) <= budget from c copies of the new field and a multiset of older ones."""
    budget = Fraction(budget)
    inv = sorted({Fraction(1) / Fraction(weights[s]) for s in sources if weights[s] not in (None, float("inf"))})
    found = set()
    max_len = int(budget) + 1

    def rec(start: int, s: Fraction, depth: int):
        if s >= 1:
            return
        for c in range(1, max_len + 1):
            alpha = Fraction(c) / (1 - s)
            if alpha <= budget:
                found.add(alpha)
        if depth >= max_len:
            return
        for i in range(start, len(inv)):
            rec(i, s + inv[i], depth + 1)

    rec(0, Fraction(0), 0)
    return sorted(a for a in found if a >= 2)


def enumerate_weight1_lists(state: BoundarySystemState, new_source: int, alpha, balanced: bool = False
                            ) -> list[DerivativeList]:
    """Ordered lists of total weight 1 over the kernel sources and ``new_source`` containing the latter.

    ``balanced`` keeps only lists with as many L as conj(L) entries per source.
    Deterministic order: by length, then lexicographically.
    """
    weights = dict(state.weights)
    weights[new_source] = alpha
    pool = sorted(set(state.kernel_sources()) | {new_source}, reverse=True)
    inv = {s: Fraction(1) / Fraction(weights[s]) for s in pool}
    out = []
    max_len = max(2, int(max(Fraction(weights[s]) for s in pool)) + 1)
    for length in range(2, max_len + 1):
        for combo in combinations_with_replacement(pool, length):
            if new_source not in combo:
                continue
            if sum((inv[s] for s in combo), Fraction(0)) != 1:
                continue
            srcs = sorted(combo, reverse=True)
            for conj in product((False, True), repeat=length):
                entries = tuple(Entry(s, c) for s, c in zip(srcs, conj))
                if balanced and not _balanced(entries):
                    continue
                out.append(DerivativeList(entries))
    return out


def _balanced(entries) -> bool:
    count: dict = {}
    for e in entries:
        count[e.source] = count.get(e.source, 0) + (-1 if e.conj else 1)
    return all(v == 0 for v in count.values())


@dataclass
class StepResult:
    success: bool
    alpha: Fraction | None = None
    source: int | None = None
    list: DerivativeList | None = None
    value: GaussianRational | None = None
    part: str | None = None
    function: PolyExpr | None = None
    tried: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"success": self.success, "tried": self.tried}
        if self.success:
            out.update({"alpha": str(self.alpha), "source": self.source, "list": self.list.render(),
                        "value": self.value.to_json(), "part": self.part})
        else:
            out["status"] = "exhausted"
        return out


def boundary_system_step(state: BoundarySystemState, candidate: Sequence, budget=DEFAULT_BUDGET,
                         commit: bool = True) -> StepResult:
    """Find the minimal weight alpha with a nonvanishing ordered weight-1 list containing the candidate.

    ``candidate`` is a z-vector in T^{10}_{nu+1}; its field is the
    admissible (Levi-orthogonal) extension.  On success r_{nu+1} is Re or
    Im of the inner derivative, whichever has the larger |(L r)_p|.
    """
    cand = tuple(gr(x) for x in candidate)
    if not state.admits(cand):
        raise ValueError("candidate is not in T10_{nu+1}")
    fld = state.lab.admissible_holo(cand)
    src = max(state.nu + 1, state.q + 2)
    state.fields[src] = fld
    state.values[src] = cand
    tried = []
    try:
        older = [k for k in state.kernel_sources() if k != src]
        for alpha in candidate_weights(state.weights, older, budget):
            state.weights[src] = alpha
            for lst in enumerate_weight1_lists(state, src, alpha):
                val = state.evaluate(lst)
                tried.append({"alpha": str(alpha), "list": lst.render(), "value": val.to_json()})
                if not val:
                    continue
                inner = list_derivative(state.h, [state.field_of(e) for e in lst.entries[1:]]) \
                    if len(lst) > 2 else None
                if inner is None:
                    # length-2 list: r is the defining function itself, not a new function
                    continue
                re_f, im_f = inner.real_part(), inner.imag_part()
                a = fld(re_f).constant()
                b = fld(im_f).constant()
                part, fn = ("Re", re_f) if a.abs2() >= b.abs2() else ("Im", im_f)
                res = StepResult(True, alpha, src, lst, val, part, fn, tried)
                if commit:
                    state.functions[src] = fn
                    state.trace.append(res.to_json())
                else:
                    _drop(state, src)
                return res
        _drop(state, src)
        res = StepResult(False, tried=tried)
        if commit:
            state.trace.append(res.to_json())
        return res
    except Exception:
        _drop(state, src)
        raise


def _drop(state: BoundarySystemState, src: int) -> None:
    state.fields.pop(src, None)
    state.values.pop(src, None)
    state.weights.pop(src, None)


# reduction to the quartic tensor ------------------------------------------------------------

def expected_from_tau40(nft: NormalFormTensors, state: BoundarySystemState, lst: DerivativeList) -> GaussianRational:
    """tau40 prediction for a length-4 list: innermost (L, conj L') -> tau40, swapped -> -tau40, same type -> 0."""
    e4, e3, e2, e1 = lst.entries
    v4, v3 = state.ct_value(e4), state.ct_value(e3)
    if not e2.conj and e1.conj:
        return nft.tau40(v4, v3, state.ct_value(e2), state.ct_value(e1))
    if e2.conj and not e1.conj:
        return -nft.tau40(v4, v3, state.ct_value(e1), state.ct_value(e2))
    return ZERO


@dataclass
class ReductionReport:
    length4_equal: bool
    length3_vanish: bool
    lists: list

    @property
    def ok(self) -> bool:
        return self.length4_equal and self.length3_vanish

    def to_json(self) -> dict:
        return {"length4_equal": self.length4_equal, "length3_vanish": self.length3_vanish,
                "lists": self.lists}


def quartic_reduction_check(h: Hypersurface, p: Sequence | None = None, vectors: Sequence | None = None,
                            v_frame: Sequence | None = None, order: int | None = None) -> ReductionReport:
    """Every ordered length-4 list over admissible kernel fields equals the tau40 prediction at p,
    and every ordered length-3 list vanishes.

    ``vectors`` are kernel z-vectors used as sources (default: the kernel basis).
    """
    st = BoundarySystemState.start(h, p, order, v_frame)
    nft = NormalFormTensors(h, p, order)
    vecs = list(vectors) if vectors is not None else list(st.lab.kernel)
    for v in vecs:
        st.add_field(st.lab.admissible_holo(v), v, 4)
    sources = st.kernel_sources()
    rows = []
    eq4 = True
    van3 = True
    for length in (3, 4):
        for combo in combinations_with_replacement(sorted(sources, reverse=True), length):
            srcs = sorted(combo, reverse=True)
            for conj in product((False, True), repeat=length):
                lst = DerivativeList(tuple(Entry(s, c) for s, c in zip(srcs, conj)))
                val = st.evaluate(lst)
                if length == 3:
                    ok = not val
                    van3 = van3 and ok
                    rows.append({"list": lst.render(), "value": val.to_json(), "ok": ok})
                else:
                    exp = expected_from_tau40(nft, st, lst)
                    ok = val == exp
                    eq4 = eq4 and ok
                    rows.append({"list": lst.render(), "value": val.to_json(), "tau40": exp.to_json(), "ok": ok})
    return ReductionReport(eq4, van3, rows)
