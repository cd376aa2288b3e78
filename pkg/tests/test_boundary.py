from fractions import Fraction

import pytest

from crinvariants.boundary import (
    BoundarySystemState, DerivativeList, Entry, boundary_system_step, candidate_weights,
    enumerate_weight1_lists, quartic_reduction_check,
)
from crinvariants.exact import gr

from helpers import DANGELO, LEVI_FLAT, MIXED_QUARTIC, TWO_SQUARES, U_TERM, model


def test_ordered_weight_one_lists():
    st = BoundarySystemState.start(model(U_TERM, 2))
    src = st.add_field(st.lab.admissible_holo([1]), [1], 4)
    full = enumerate_weight1_lists(st, src, 4)
    balanced = enumerate_weight1_lists(st, src, 4, balanced=True)
    assert len(full) == 16
    assert len(balanced) == 6
    assert all(len(lst) == 4 and lst.weight(st.weights) == 1 for lst in full)
    assert {lst.render() for lst in balanced} <= {lst.render() for lst in full}


def test_candidate_weights():
    assert candidate_weights({}, []) == [Fraction(2), Fraction(3), Fraction(4)]
    assert Fraction(4) in candidate_weights({4: 4}, [4], budget=6)
    assert all(a <= 6 for a in candidate_weights({4: 4}, [4], budget=6))


def test_step_on_u_term_model():
    st = BoundarySystemState.start(model(U_TERM, 2))
    res = boundary_system_step(st, [1])
    assert res.success and res.alpha == 4
    assert res.list.render() == "(L2, conj(L2), L2, conj(L2))"
    assert res.value == gr(4)
    # the new function removes the direction from T10
    assert not st.admits([1])
    assert st.trace and st.trace[-1]["alpha"] == "4"


def test_steps_on_dangelo_exhaust_kernel():
    st = BoundarySystemState.start(model(DANGELO, 3))
    first = boundary_system_step(st, [1, 0])
    assert first.alpha == 4
    assert not st.admits([1, 0]) and st.admits([0, 1])
    second = boundary_system_step(st, [0, 1])
    assert second.alpha == 4 and second.source == 3


def test_step_exhausts_on_levi_flat():
    st = BoundarySystemState.start(model(LEVI_FLAT, 2))
    res = boundary_system_step(st, [1])
    assert not res.success
    assert res.to_json()["status"] == "exhausted"
    assert st.kernel_sources() == []


def test_candidate_must_be_admitted():
    st = BoundarySystemState.start(model(MIXED_QUARTIC, 3))
    assert st.q == 1 and st.nu == 2
    with pytest.raises(ValueError):
        boundary_system_step(st, [1, 0])
    assert boundary_system_step(st, [0, 1], commit=False).alpha == 4
    assert st.kernel_sources() == []


def test_list_weights_and_rendering():
    lst = DerivativeList((Entry(3), Entry(3, True), Entry(3), Entry(3, True)))
    assert lst.weight({3: 4}) == 1
    assert lst.render() == "(L3, conj(L3), L3, conj(L3))"


@pytest.mark.parametrize("text", [U_TERM, DANGELO, TWO_SQUARES, MIXED_QUARTIC])
def test_reduction_to_tau40(text):
    n = 2 if text == U_TERM else 3
    rep = quartic_reduction_check(model(text, n))
    assert rep.length3_vanish and rep.length4_equal
