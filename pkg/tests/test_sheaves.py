import pytest

from crinvariants.geometry import holo_field, levi_function, point_from_graph
from crinvariants.poly import PolyExpr
from crinvariants.report import ideal_section
from crinvariants.sheaves import (
    AdmissibilityError, bracket_closure_check, coefficient_recipe, freeman_N2_member, ideal_generator,
    in_kernel_up_to_order1, levi_orthogonal_complement, sheaf_membership_S10q, verify_vanishing_on_rank_locus,
)
from crinvariants.tensors import TensorLab, twisted_kernel_field

from helpers import DANGELO, I, LEVI_FLAT, MIXED_QUARTIC, QUADRIC, TWO_SQUARES, U_TERM, model

MIXED = model(MIXED_QUARTIC, 3)
# points where the Levi rank drops to 1 (z2 = 0)
RANK1 = [point_from_graph(MIXED, [z, 0], u) for z in (0, 1, I / 2) for u in (0, 1)]


def _coeffs(*texts):
    r = MIXED.ring
    out = []
    for t in texts:
        out.append(PolyExpr.var(r, t) if isinstance(t, str) else PolyExpr.const(r, t))
    return out


@pytest.mark.parametrize("c, verdict", [(0, "order1-kernel"), (1, "fails"), (I, "fails")])
def test_twisted_field_order1(c, verdict):
    assert in_kernel_up_to_order1(MIXED, twisted_kernel_field(MIXED, c)).verdict == verdict


def test_orthogonal_complement_is_admissible():
    lab = TensorLab(MIXED)
    ext = levi_orthogonal_complement(MIXED, lab.v_fields, [(0, 1)], 6)[0]
    assert in_kernel_up_to_order1(MIXED, ext).ok
    # Levi-orthogonal to the frame identically, not only at the origin
    assert levi_function(MIXED, lab.v_fields[0], ext.conj()).is_zero()


def test_sheaf_membership_on_rank_locus():
    assert all(p is not None for p in RANK1)
    assert sheaf_membership_S10q(MIXED, coefficient_recipe(_coeffs(0, 1)), 1, RANK1)["member"]
    assert not sheaf_membership_S10q(MIXED, coefficient_recipe(_coeffs("z1", 1)), 1, RANK1)["member"]
    # the z1 coefficient vanishes on the locus but only to first order
    assert not sheaf_membership_S10q(MIXED, coefficient_recipe(_coeffs("z2", 1)), 1, RANK1)["member"]


def test_g_generator_vanishes_on_rank_locus():
    def build(hc, pt):
        l = holo_field(hc, [0, 1])
        return ideal_generator(hc, "g", None, l, l.conj())

    assert verify_vanishing_on_rank_locus(MIXED, build, 1, RANK1)["vanishes"]


def test_generator_needs_admissible_fields():
    l = twisted_kernel_field(MIXED, 1)
    with pytest.raises(AdmissibilityError):
        ideal_generator(MIXED, "g", None, l, l.conj())


def test_u_term_ideal_cuts_transversally():
    sec = ideal_section(TensorLab(model(U_TERM, 2)))
    assert sec["transversal_cut"]
    assert sec["tangential_vanish_on_dz0"]
    transversal = [g for g in sec["generators"] if g["kind"] == "f" and not g["L3_tangential"]]
    assert transversal and all(g["differential"][2] != {"re": "0", "im": "0"} for g in transversal)


def test_freeman_and_bracket_closure():
    flat = model(LEVI_FLAT, 2)
    assert freeman_N2_member(flat, holo_field(flat, [1]))
    quad = model(QUADRIC, 2)
    assert not freeman_N2_member(quad, holo_field(quad, [1]))
    d = model(DANGELO, 3)
    assert bracket_closure_check(d, holo_field(d, [1, 0]), holo_field(d, [0, 1]))


def test_two_squares_membership_needs_order_one_vanishing():
    h = model(TWO_SQUARES, 3)
    r = h.ring
    z1, z2 = PolyExpr.var(r, "z1"), PolyExpr.var(r, "z2")
    one = PolyExpr.const(r, 1)
    branch1 = [point_from_graph(h, [z, 0], u) for z in (1, I / 2, 1 + I) for u in (0, 1)]
    branch2 = [point_from_graph(h, [0, z], u) for z in (1, I / 2) for u in (0, 1)]

    def member(a1, a2, sample):
        return sheaf_membership_S10q(h, coefficient_recipe([a1, a2]), 1, sample)["member"]

    assert member(z2 * z2 * (one + z1), one, branch1)
    assert not member(z2 * z2, one, branch2)
    # a1 vanishing only to order 0 is not enough
    assert not member(z2, one, branch1)
    assert member(z2 * z2, z1 * z1, branch1 + branch2 + [(0, 0, 0)])


def test_two_squares_g_vanishes_to_second_order():
    h = model(TWO_SQUARES, 3)
    branch1 = [point_from_graph(h, [z, 0], u) for z in (1, I / 2) for u in (0, 1)]

    def build(hc, pt):
        l = holo_field(hc, [0, 1])
        return ideal_generator(hc, "g", None, l, l.conj())

    assert verify_vanishing_on_rank_locus(h, build, 1, branch1, min_order=2)["vanishes"]
