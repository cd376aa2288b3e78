"""Acceptance criteria 1-13; the terminal summary prints one PASS/FAIL line per criterion."""

import os
import subprocess
import sys
from fractions import Fraction
from itertools import product

import pytest

from crinvariants.boundary import quartic_reduction_check
from crinvariants.cli import FIXTURES, fixture_report, golden_path
from crinvariants.exact import ZERO, GaussianRational, gr
from crinvariants.geometry import point_from_graph
from crinvariants.invariants import (
    dangelo_type_le4, is_pseudoconvex_at, kernel_coincidence_check, multitype_prefix,
)
from crinvariants.normal_form import cubic_normal_form, quartic_normal_form
from crinvariants.parser import load_spec, parse_polynomial, parse_spec
from crinvariants.poly import PolyExpr, vector_ring
from crinvariants.random_models import random_model
from crinvariants.report import AnalysisConfig, analyze, ideal_section, positivity_sample
from crinvariants.tensors import CK, KBAR, K10, NormalFormTensors, TensorLab, double_bracket_diagnostic, \
    quadruple_bracket_diagnostic

from helpers import CUBIC_2RE, DANGELO, I, U_TERM, model

PSEUDOCONVEX_FIXTURES = ["dangelo", "two-quartic-squares", "quartic-with-u-term", "degenerate-quadric",
                         "levi-flat", "levi-flat-scaled", "random-seed-0", "random-seed-1", "random-seed-2"]
RANDOM_SUITE_SIZE = 100


def criterion(n):
    def mark(fn):
        fn.criterion = n
        return fn
    return mark


def _fixture(name):
    return load_spec(FIXTURES / f"{name}.crs")


def _fixture_points(name):
    spec = _fixture(name)
    return spec.hypersurface(), (spec.points or [None])


def _quartic_polynomial(table, kernel):
    """X(v) = T(v, vbar, v, vbar) for a tensor on CK x CK x K10 x conj K10, as a polynomial in v."""
    k = len(kernel)
    vr = vector_ring(k)
    v = [PolyExpr.var(vr, j) for j in range(k)]
    vb = [PolyExpr.var(vr, k + j) for j in range(k)]
    out = PolyExpr.zero(vr)
    for (i4, i3, j, l), val in table.values.items():
        if not val or i4 >= k or i3 < k:
            continue
        out = out + (v[i4] * vb[i3 - k] * v[j] * vb[l]).scale(val)
    return out


@criterion(1)
def test_c01_dangelo_quartic_value():
    """D'Angelo model at 0: tau40(v, vbar, v, vbar) = 4(|v1|^4 + |v2|^4) exactly, by two routes."""
    nft = NormalFormTensors(model(DANGELO, 3))
    lab = nft.lab
    assert [list(v) for v in lab.kernel] == [[1, 0], [0, 1]]
    want = parse_polynomial("4*(v1^2*conj(v1)^2 + v2^2*conj(v2)^2)", vector_ring(2))
    assert _quartic_polynomial(nft.tau40_array(), lab.kernel) == want
    assert _quartic_polynomial(lab.tau4_array(CK), lab.kernel) == want


@criterion(2)
@pytest.mark.parametrize("t", [Fraction(1), Fraction(1, 2)])
def test_c02_dangelo_off_origin(t):
    """D'Angelo model at (it, 0, 0), t = 1, 1/2: Levi rank 1, phi4 = 0 and tau4(v, vbar, v, vbar) = 0 on the kernel."""
    h = model(DANGELO, 3)
    p = (GaussianRational(0, t), ZERO, ZERO)
    assert h.contains(p)
    nft = NormalFormTensors(h, p)
    assert nft.lab.q == 1
    assert nft.quartic.phi4.is_zero()
    for c in (gr(1), GaussianRational(2, -1), GaussianRational(Fraction(1, 3), 5)):
        v = [c * x for x in nft.lab.kernel[0]]
        vb = [x.conj() for x in v]
        m = nft.lab.m
        v_ck = tuple(v) + (ZERO,) * (m + 1)
        vb_ck = (ZERO,) * m + tuple(vb) + (ZERO,)
        assert nft.lab.tau4(v_ck, vb_ck, v, vb) == ZERO
        assert nft.tau40(v_ck, vb_ck, v, vb) == ZERO
    assert nft.lab.tau4_array(CK).is_zero()


def _pseudoconvex_samples():
    out = []
    zs = [gr(0), gr(Fraction(1, 2)), GaussianRational(0, Fraction(1, 3)), GaussianRational(Fraction(-1, 4), Fraction(1, 4))]
    for name in PSEUDOCONVEX_FIXTURES:
        h, listed = _fixture_points(name)
        pts = [p for p in listed if p is not None] + [None]
        for z in zs:
            for slot in range(h.m):
                for u in (0, Fraction(1, 2)):
                    zz = [ZERO] * h.m
                    zz[slot] = z
                    p = point_from_graph(h, zz, u)
                    if p is not None and p not in pts and any(x for x in p):
                        pts.append(p)
        out.extend((name, h, p) for p in pts)
    return out


@criterion(3)
def test_c03_pseudoconvex_cubic_vanishing():
    """tau3 = 0 in every slot combination at >= 20 pseudoconvex points on >= 5 fixtures."""
    checked = set()
    count = 0
    for name, h, p in _pseudoconvex_samples():
        if not is_pseudoconvex_at(h, p):
            continue
        lab = TensorLab(h, p)
        assert lab.tau3_array().is_zero(), (name, p)
        assert not cubic_normal_form(h, p).cubic_obstructions(), (name, p)
        checked.add(name)
        count += 1
    assert len(checked) >= 5
    assert count >= 20


@pytest.fixture(scope="module")
def random_suite():
    rows = []
    seed = 0
    while len(rows) < RANDOM_SUITE_SIZE:
        rm = random_model(seed)
        seed += 1
        h = rm.hypersurface
        assert h.n <= 3
        assert all(c.re.denominator and c.im.denominator for c in h.rho.terms.values())
        if not is_pseudoconvex_at(h):
            continue
        lab = TensorLab(h)
        nft = NormalFormTensors(h)
        row = {"seed": rm.seed, "tau3_zero": lab.tau3_vanishes(), "kernel": len(lab.kernel)}
        if row["tau3_zero"] and lab.kernel:
            row["routes"] = lab.tau4_array(CK).values == nft.tau40_array().values
            row["bracket"] = lab.quartic_bracket_check()
        row["type"] = dangelo_type_le4(h).to_json()
        rows.append(row)
    return rows


@criterion(4)
def test_c04_cross_route_quartic(random_suite):
    """>= 100 random pseudoconvex models: derivative tau4 = normal-form tau40 = quadruple bracket on CK x CK x K10 x conj K10."""
    assert len(random_suite) >= RANDOM_SUITE_SIZE
    with_kernel = [r for r in random_suite if r["kernel"]]
    assert len(with_kernel) >= RANDOM_SUITE_SIZE // 2
    for r in with_kernel:
        assert r["tau3_zero"], r["seed"]
        assert r["routes"], r["seed"]
        assert r["bracket"], r["seed"]


@criterion(5)
@pytest.mark.parametrize("coef", [gr(1), gr(2), I, GaussianRational(Fraction(1, 2), -1)])
def test_c05_cubic_routes_non_pseudoconvex(coef):
    """2 Re w = 2 Re(c z^2 zbar) family: derivative tau3 = bracket tau31 on CK x K10 x conj K10, with tau3 != 0."""
    c = coef.render()
    h = model(f"-2*Re(w) + 2*Re(({c})*z1^2*conj(z1))", 2)
    lab = TensorLab(h)
    assert not is_pseudoconvex_at(h)
    nonzero = False
    for v3, v2, v1 in product(lab.basis(CK), lab.basis(K10), lab.basis(KBAR)):
        a = lab.tau3(v3, v2, v1)
        assert a == lab.tau31(v3, v2, v1)
        nonzero = nonzero or bool(a)
    assert nonzero
    nft = NormalFormTensors(h, quartic=False)
    for v3, v2, v1 in product(lab.basis("CT"), lab.basis(K10), lab.basis(KBAR)):
        assert lab.tau3(v3, v2, v1) == nft.tau3(v3, v2, v1)


@criterion(6)
def test_c06_non_tensoriality_witnesses():
    """Diagnostics: bracket values along twisted extensions change with c (c = 0 vs 1) and the quadruple bracket moves by |c|^2."""
    spec = _fixture("degenerate-quadric")
    diag = analyze(spec).data["points"][0]["diagnostics"]
    assert diag["available"] and diag["depends_on_c"]
    h = spec.hypersurface()
    dbl = double_bracket_diagnostic(h, [0, 1])
    assert dbl[gr(0)] != dbl[gr(1)]
    cs = [gr(0), gr(1), gr(2), I, GaussianRational(1, 1)]
    quad = quadruple_bracket_diagnostic(h, cs)
    base = quad[gr(0)][0]
    step = quad[gr(1)][0] - base
    assert step
    for c in cs:
        assert quad[c][0] - base == step * c.abs2()


@criterion(7)
def test_c07_kernel_coincidence():
    """Slot kernels of tau40 equal the holomorphic kernel of phi4 on pseudoconvex fixtures; on 2 Re(z1^3 conj z2) d/dz2 kills slots 1, 2 but not slot 3."""
    for name in PSEUDOCONVEX_FIXTURES:
        h, pts = _fixture_points(name)
        for p in pts:
            rep = kernel_coincidence_check(h, p)
            assert rep.checked and rep.coincide, (name, p)
    rep = kernel_coincidence_check(_fixture("different-kernels").hypersurface())
    dz2 = (gr(0), gr(1))
    spans = [[tuple(v) for v in k] for k in rep.slot_kernels]
    assert dz2 in spans[0] and dz2 in spans[1]
    assert spans[2] == []
    assert rep.holomorphic_kernel == []
    assert spans[:2] != [rep.holomorphic_kernel] * 2


@criterion(8)
@pytest.mark.parametrize("name, point, entries", [
    ("quartic-with-u-term", None, ["1", "4"]),
    ("dangelo", None, ["1", "4", "4"]),
    ("two-quartic-squares", None, ["1", "4", "4"]),
    ("degenerate-quadric", None, ["1", "2", ">4"]),
])
def test_c08_multitype_prefixes(name, point, entries):
    """Multitype prefixes (1,4), (1,4,4), (1,4,4) and (1,2,>4) on the four reference models."""
    assert multitype_prefix(_fixture(name).hypersurface(), point).to_json()["entries"] == entries


@criterion(9)
def test_c09_positivity():
    """tau4(v2, v2, v1, conj v1) >= 0 (and real) on >= 500 random rational arguments over pseudoconvex fixtures."""
    total = 0
    for k, name in enumerate(PSEUDOCONVEX_FIXTURES):
        h, pts = _fixture_points(name)
        for p in pts:
            lab = TensorLab(h, p)
            if not lab.kernel:
                continue
            res = positivity_sample(lab, 60, seed=100 + k)
            assert res["ok"], (name, p, res["witness"])
            total += res["samples"]
    assert total >= 500


@criterion(10)
def test_c10_no_type_three(random_suite):
    """Type verdicts over the random suite are exact and never 3 (no cubic obstruction survives)."""
    verdicts = {r["type"]["verdict"] for r in random_suite}
    assert "type3" not in verdicts
    assert verdicts <= {"type2", "type4", "type>4"}
    assert all(r["type"]["tier"] == "exact" for r in random_suite)
    assert all(r["tau3_zero"] for r in random_suite)


@criterion(11)
@pytest.mark.parametrize("text, n", [(U_TERM, 2), (DANGELO, 3)])
def test_c11_boundary_reduction(text, n):
    """Every ordered length-4 list derivative equals the tau40 prediction, length-3 lists vanish."""
    rep = quartic_reduction_check(model(text, n))
    rows = rep.lists
    assert rep.length3_vanish and rep.length4_equal
    four = [r for r in rows if r["list"].count("L") == 4]
    assert four and any(r["value"] != {"re": "0", "im": "0"} for r in four)


@criterion(12)
def test_c12_ideal_cuts_to_origin():
    """2 Re w = |z|^4 + u^2|z|^2: transversal f-generator has nonzero du part, tangential ones vanish on {dz = 0}."""
    lab = TensorLab(model(U_TERM, 2))
    sec = ideal_section(lab)
    assert sec["transversal_cut"] and sec["tangential_vanish_on_dz0"]
    m = lab.m
    fs = [g for g in sec["generators"] if g["kind"] == "f"]
    zero = {"re": "0", "im": "0"}
    assert any(not g["L3_tangential"] and g["differential"][2 * m] != zero for g in fs)
    assert all(g["differential"][2 * m] == zero for g in fs if g["L3_tangential"])


@criterion(13)
def test_c13_tooling_roundtrip_and_determinism():
    """Corpus: parse -> print -> parse is the identity and reports are byte-identical to the golden files (also without numba)."""
    specs = sorted(FIXTURES.glob("*.crs"))
    assert len(specs) >= 10
    for path in specs:
        spec = load_spec(path)
        assert parse_spec(spec.render()) == spec
        assert fixture_report(path) == golden_path(path).read_text(encoding="utf-8"), path.name
    env = dict(os.environ, CRINV_DISABLE_NUMBA="1")
    res = subprocess.run([sys.executable, "-m", "crinvariants.cli", "corpus"], capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stdout + res.stderr
