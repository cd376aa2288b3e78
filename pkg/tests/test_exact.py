from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crinvariants.exact import (
    I, ONE, ZERO, ExactMatrix, GaussianRational, congruence_diagonalize, gr, hermitian_signature,
    is_pd, is_psd, nullspace, same_span, span_rank,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(GaussianRational, fractions, fractions)


def hermitian(entries, k):
    rows = [[ZERO] * k for _ in range(k)]
    it = iter(entries)
    for i in range(k):
        rows[i][i] = gr(next(it).re)
        for j in range(i + 1, k):
            x = next(it)
            rows[i][j] = x
            rows[j][i] = x.conj()
    return ExactMatrix(rows, k)


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    if a:
        assert a * a.inverse() == ONE


@given(scalars, scalars)
def test_conjugation_is_an_involutive_automorphism(a, b):
    assert a.conj().conj() == a
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert (a * a.conj()).is_real()


def test_normalized_representation():
    x = GaussianRational(Fraction(2, 4), Fraction(-6, 8))
    assert (x._a, x._b, x._d) == (2, -3, 4)
    assert GaussianRational(Fraction(3, 6)) == gr("1/2")
    assert hash(gr(Fraction(1, 2))) == hash(GaussianRational(Fraction(2, 4), 0))


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_render_forms():
    assert gr(0).render() == "0"
    assert I.render() == "i"
    assert GaussianRational(Fraction(1, 2), 3).render() in ("1/2+3*i", "(1/2+3*i)")


def test_signature_examples():
    assert hermitian_signature(ExactMatrix.diag([2, 3])) == (2, 0, 0)
    assert hermitian_signature(ExactMatrix([[0, 1], [1, 0]])) == (1, 1, 0)
    assert hermitian_signature(ExactMatrix([[1, I], [-I, 1]])) == (1, 0, 1)
    assert hermitian_signature(ExactMatrix.zeros(3, 3)) == (0, 0, 3)


@given(st.integers(1, 4).flatmap(lambda k: st.tuples(st.just(k), st.lists(scalars, min_size=k * (k + 1) // 2,
                                                                          max_size=k * (k + 1) // 2))))
def test_congruence_diagonalization(data):
    k, entries = data
    m = hermitian(entries, k)
    p, d = congruence_diagonalize(m)
    assert p.adjoint() @ m @ p == d
    assert all(not d[i, j] for i in range(k) for j in range(k) if i != j)
    assert p.rank() == k
    pos, neg, zero = hermitian_signature(m)
    assert pos + neg + zero == k
    assert zero == k - m.rank()
    assert is_psd(m) == (neg == 0)
    assert is_pd(m) == (pos == k)


@given(st.integers(1, 4).flatmap(lambda k: st.lists(scalars, min_size=k * k, max_size=k * k).map(
    lambda xs: ExactMatrix([xs[i * k:(i + 1) * k] for i in range(k)], k))))
def test_inverse_and_nullspace(m):
    k = m.rows
    if m.rank() == k:
        assert m @ m.inverse() == ExactMatrix.identity(k)
    ns = nullspace(m)
    assert len(ns) == k - m.rank()
    for v in ns:
        assert all(not x for x in m.apply(v))


def test_spans():
    a = [(ONE, ZERO, ONE), (ZERO, ONE, ZERO)]
    b = [(ONE, ONE, ONE), (ONE, -ONE, ONE)]
    assert span_rank(a, 3) == 2
    assert same_span(a, b, 3)
    assert not same_span(a, [(ONE, ZERO, ZERO)], 3)


def test_rref_pivots():
    m = ExactMatrix([[0, 2, 4], [0, 1, 2], [1, 0, 1]])
    red, piv = m.rref()
    assert piv == [0, 1]
    assert red[0, 0] == ONE and red[1, 1] == ONE
