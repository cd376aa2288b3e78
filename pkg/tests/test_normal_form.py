import pytest

from crinvariants.exact import ONE
from crinvariants.invariants import poly_rank
from crinvariants.normal_form import NormalFormError, cubic_normal_form, quartic_normal_form
from crinvariants.poly import PolyExpr
from crinvariants.random_models import random_model

from helpers import CUBIC_2RE, DANGELO, MIXED_QUARTIC, U_TERM, model


def _harmonic_terms(phi, top=4):
    g = phi.ring
    return [e for e in phi.terms if sum(e) <= top
            and (all(not e[k] for k in g.anti) or all(not e[k] for k in g.holo))]


def test_dangelo_quartic_part():
    q = quartic_normal_form(model(DANGELO, 3))
    assert q.q == 0
    assert q.phi4_in_kernel().render() == "v1^2*conj(v1)^2 + v2^2*conj(v2)^2"


def test_mixed_model_splits_levi_block():
    c = cubic_normal_form(model(MIXED_QUARTIC, 3))
    assert c.q == 1 and c.d == [ONE]
    assert c.signature == (1, 0, 1)
    assert c.kernel_indices == [1]
    assert quartic_normal_form(model(MIXED_QUARTIC, 3)).phi4_in_kernel().render() == "v1^2*conj(v1)^2"


def test_u_term_is_weight_above_one():
    q = quartic_normal_form(model(U_TERM, 2))
    assert q.phi4.render() == "z1^2*conj(z1)^2"


def test_non_pseudoconvex_cubic_is_refused():
    h = model(CUBIC_2RE, 2)
    assert cubic_normal_form(h).cubic_obstructions()
    with pytest.raises(NormalFormError, match="cubic"):
        quartic_normal_form(h)


@pytest.mark.parametrize("seed", range(8))
def test_normal_form_invariants_survive_coordinate_change(seed):
    plain = quartic_normal_form(random_model(seed, change=False).hypersurface)
    moved = quartic_normal_form(random_model(seed).hypersurface)
    assert plain.q == moved.q
    assert poly_rank(plain.phi4_in_kernel()) == poly_rank(moved.phi4_in_kernel())
    assert not _harmonic_terms(moved.phi)


def test_change_inverse_is_identity():
    q = quartic_normal_form(random_model(3).hypersurface)
    comp = q.change.then(q.change.inverse())
    for k in range(3):
        assert (comp.full_map()[k] - PolyExpr.var(comp.ring, k)).is_zero()


def test_short_jet_is_rejected():
    with pytest.raises(NormalFormError):
        quartic_normal_form(model(DANGELO, 3), order=4)
