from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crinvariants.exact import ZERO, GaussianRational, gr
from crinvariants.poly import PolyExpr
from crinvariants.sheaves import AdmissibilityError
from crinvariants.tensors import (
    CK, CT, NormalFormTensors, SlotError, TensorLab, conj_ct, double_bracket_diagnostic,
    lie_route_extension_diagnostic, quadruple_bracket_diagnostic, symmetric_extension,
)

from helpers import CUBIC_2RE, DANGELO, I, MIXED_QUARTIC, QUADRIC, TWO_SQUARES, model

q = st.fractions(-2, 2, max_denominator=3)
cplx = st.builds(GaussianRational, q, q)
LAB = TensorLab(model(MIXED_QUARTIC, 3))
DANGELO_NF = NormalFormTensors(model(DANGELO, 3))


def ct5():
    return st.lists(cplx, min_size=5, max_size=5)


def real_ct(m):
    return st.tuples(st.lists(cplx, min_size=m, max_size=m), q).map(
        lambda t: tuple(t[0]) + tuple(x.conj() for x in t[0]) + (gr(t[1]),))


@given(ct5(), ct5(), cplx)
def test_tau4_linear_in_outer_slot(x, y, s):
    k, kb = [0, 1], [0, 1]
    xy = [a + s * b for a, b in zip(x, y)]
    assert LAB.tau4(xy, x, k, kb) == LAB.tau4(x, x, k, kb) + s * LAB.tau4(y, x, k, kb)


@given(real_ct(2))
def test_tau4_real_on_real_arguments(v):
    assert LAB.tau4(v, v, [0, 1], [0, 1]).is_real()


@given(ct5())
def test_tau4_reality_symmetry(x):
    # conj tau4(X, X, v, vbar) = tau4(conj X, conj X, v, vbar)
    lhs = LAB.tau4(x, x, [0, 1], [0, 1]).conj()
    assert lhs == LAB.tau4(conj_ct(x, 2), conj_ct(x, 2), [0, 1], [0, 1])


def test_levi_tensor_hermitian():
    lab = TensorLab(model(QUADRIC, 2))
    assert lab.tau2([1], [1]) == gr(1)
    t = TensorLab(model(MIXED_QUARTIC, 3)).levi_tensor()
    assert t.component(0, 0) == gr(1) and t.component(1, 1) == ZERO


def test_frame_choice_does_not_change_tau4():
    other = TensorLab(model(MIXED_QUARTIC, 3), v_frame=[[1, Fraction(1, 2)]])
    assert LAB.tau4_array(CT).values == other.tau4_array(CT).values


def test_quartic_routes_on_mixed_model():
    assert LAB.quartic_bracket_check()
    assert LAB.tau4([0, 1, 0, 1, 0], [0, 1, 0, 1, 0], [0, 1], [0, 1]) == gr(8)
    assert LAB.tau4([0, 0, 0, 0, 1], [0, 0, 0, 0, 1], [0, 1], [0, 1]) == ZERO


def test_cubic_routes_agree_on_2re_family():
    lab = TensorLab(model(CUBIC_2RE, 2))
    for v3 in ([1, 0, 0], [0, 1, 0], [I, 2, 0]):
        assert lab.tau3(v3, [1], [1]) == lab.tau31(v3, [1], [1])
    assert lab.tau3([1, 0, 0], [1], [1]) == gr(2)
    assert not lab.tau3_vanishes()


def test_tau21_on_2re_family():
    lab = TensorLab(model(CUBIC_2RE, 2))
    assert lab.tau21([1, 0, 0], [1, 0, 0], [0, 1, 0]) == 2 * I


def test_tau4_refused_when_cubic_survives():
    lab = TensorLab(model(CUBIC_2RE, 2))
    with pytest.raises(AdmissibilityError):
        lab.tau4([1, 0, 0], [1, 0, 0], [1], [1])


def test_slot_checks():
    with pytest.raises(SlotError):
        LAB.tau4([0, 0, 0, 0, 1], [0, 1, 0, 1, 0], [1, 0], [0, 1])
    with pytest.raises(SlotError):
        LAB.check([0, 1, 0, 1, 1], CK)
    with pytest.raises(SlotError):
        LAB.check([1, 2, 3], CT)


def test_normal_form_route_matches_derivative_route():
    lab = DANGELO_NF.lab
    basis = lab.basis(CK)
    for v4 in basis:
        for v3 in basis:
            for v2 in lab.basis("K10"):
                for v1 in lab.basis("conjK10"):
                    assert lab.tau4(v4, v3, v2, v1) == DANGELO_NF.tau40(v4, v3, v2, v1)


def test_symmetric_extension_of_two_squares():
    sym = symmetric_extension(NormalFormTensors(model(TWO_SQUARES, 3)))
    v, vb = (1, 0, 0, 0, 0), (0, 0, 1, 0, 0)
    assert sym.evaluate(v, vb, v, vb) == gr(4)
    assert sym.evaluate(v, v, v, vb) == ZERO


def test_levi_flat_rescaled_transversal_slot_is_not_tensorial():
    hs = model("-(1 + z1 + conj(z1))*(w + conj(w))", 2)
    z = PolyExpr.var(hs.ring, "z1")
    moved = lie_route_extension_diagnostic(hs, [0, 0, 1], [1, 0, 0], [0, 1, 0],
                                           [z, z.conjugate(), z.conjugate().scale(2)])
    assert moved == [ZERO, gr(-1), gr(-2)]
    fixed = lie_route_extension_diagnostic(hs, [1, 0, 0], [1, 0, 0], [0, 1, 0], [z, z.conjugate()])
    assert fixed == [ZERO, ZERO]


def test_twisted_fields_move_bracket_values():
    h = model(MIXED_QUARTIC, 3)
    dbl = double_bracket_diagnostic(h, [0, 1])
    assert dbl[gr(0)] != dbl[gr(1)]
    quad = quadruple_bracket_diagnostic(h, [0, 1, 2, I])
    assert {c: v[0] for c, v in quad.items()} == {gr(0): gr(4), gr(1): gr(5), gr(2): gr(8), I: gr(5)}
    assert all(a == b for a, b in quad.values())
