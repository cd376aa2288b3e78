from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crinvariants.exact import I, ONE, ZERO, GaussianRational, gr
from crinvariants.parser import parse_expression
from crinvariants.poly import (
    PolyExpr, ambient_ring, graph_ring, is_O_Lambda, vector_ring, weight_of_monomial,
)

R = ambient_ring(3)
W, Z1, Z2 = (PolyExpr.var(R, v) for v in ("w", "z1", "z2"))

coef = st.builds(GaussianRational, st.fractions(-4, 4, max_denominator=3), st.fractions(-4, 4, max_denominator=3))
exps = st.tuples(*[st.integers(0, 2)] * R.nvars)
polys = st.dictionaries(exps, coef, max_size=5).map(lambda d: PolyExpr(R, {e: c for e, c in d.items() if c}))
points = st.lists(coef, min_size=3, max_size=3).map(lambda z: list(z) + [x.conj() for x in z])


def test_ring_layout():
    assert list(R.labels) == ["w", "z1", "z2", "conj(w)", "conj(z1)", "conj(z2)"]
    assert list(R.holo) == [1, 2]
    assert graph_ring(3).labels[-1] == "u"
    assert list(vector_ring(2).labels) == ["v1", "v2", "conj(v1)", "conj(v2)"]


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == PolyExpr.zero(R)


@given(polys, polys)
def test_conjugation(a, b):
    assert a.conjugate().conjugate() == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert a.real_part().is_real() and a.imag_part().is_real()
    assert a.real_part() + a.imag_part().scale(I) == a


@given(polys, polys, st.integers(0, R.nvars - 1))
def test_wirtinger_leibniz(a, b, k):
    assert (a * b).diff(k) == a.diff(k) * b + a * b.diff(k)


@given(polys, st.integers(0, R.nvars - 1))
def test_derivative_conjugation(a, k):
    # conj(d/dx_k a) = d/dx_{conj k} conj(a)
    assert a.diff(k).conjugate() == a.conjugate().diff(R.conj_perm[k])


@given(polys, polys, points)
def test_evaluation_is_a_homomorphism(a, b, pt):
    assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
    assert (a + b).evaluate(pt) == a.evaluate(pt) + b.evaluate(pt)


@given(polys)
def test_render_parses_back(a):
    assert parse_expression(a.render(), 3) == a


@given(polys)
def test_substitution_composes(a):
    s1 = {0: W + Z1 * Z2, 3: (W + Z1 * Z2).conjugate()}
    s2 = {1: Z1 + W.scale(2), 4: (Z1 + W.scale(2)).conjugate()}
    both = {k: v.subs(s2) for k, v in s1.items()}
    for k, v in s2.items():
        both.setdefault(k, v)
    assert a.subs(s1).subs(s2) == a.subs(both)


def test_series_inverse_and_precision():
    f = PolyExpr.const(R, 1) + W + Z1 * Z1.conjugate()
    inv = f.inverse_series(6)
    assert inv.prec == 6
    assert (f.mul(inv, 6)) == PolyExpr.const(R, 1).truncate(6)
    with pytest.raises(ArithmeticError):
        inv.homogeneous(7)
    with pytest.raises(ArithmeticError):
        inv.evaluate([0] * R.nvars)


def test_truncated_product_tracks_precision():
    a = (W + Z1).truncate(3)
    b = Z2 * Z2
    p = a * b
    # a is known below degree 3 and has valuation 1; b is exact with valuation 2
    assert p.prec == 5
    assert p == (W * Z2 * Z2 + Z1 * Z2 * Z2)


def test_valuation_degree_coeff():
    p = Z1 * Z1.conjugate() + W.scale(3)
    assert p.valuation() == 1 and p.degree() == 2
    assert p.linear_coeff("w") == gr(3)
    assert p.coeff((0, 1, 0, 0, 1, 0)) == ONE
    assert p.constant() == ZERO


def test_weighted_order():
    rho = parse_expression("-(w + conj(w)) + z1*conj(z1) + (z2*conj(z2))^2", 3)
    assert is_O_Lambda(rho, [1, 2, 4])
    assert not is_O_Lambda(rho, [1, 2, 5])
    assert weight_of_monomial((0, 2, 2), [1, 2, 4]) == Fraction(3, 2)
    with pytest.raises(ValueError):
        is_O_Lambda(rho, [1, 4, 2])


def test_pickled_polynomials_share_the_ring():
    import pickle

    p = pickle.loads(pickle.dumps(W * Z1 + Z2))
    assert p.ring is R
    assert p - (W * Z1 + Z2) == PolyExpr.zero(R)
