import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from crinvariants import _kernels
from crinvariants._kernels import eval_poly, min_hessian_eigenvalue, sphere_minimum

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed or disabled")

# |v1|^4 + |v2|^4 with minimum 1/2 on the unit sphere
TWO_SQUARES = ([1.0, 1.0], [[2, 0], [0, 2]], [[2, 0], [0, 2]])

terms = st.lists(st.tuples(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                           st.lists(st.integers(0, 3), min_size=4, max_size=4)), min_size=1, max_size=6)


def _split(ts):
    coef = [c for c, _ in ts]
    ez = [e[:2] for _, e in ts]
    ezb = [e[2:] for _, e in ts]
    return coef, ez, ezb


@needs_numba
@given(terms)
def test_backends_agree(ts):
    coef, ez, ezb = _split(ts)
    pts = _kernels.sphere_points(17, 2, seed=5)
    a = eval_poly(coef, ez, ezb, pts, backend="numba")
    b = eval_poly(coef, ez, ezb, pts, backend="numpy")
    assert np.allclose(a, b, rtol=1e-10, atol=1e-10)


def test_numpy_matches_direct_evaluation():
    pts = np.array([[1 + 1j, 0.5], [0.2j, -1]])
    vals = eval_poly(*TWO_SQUARES, pts, backend="numpy")
    assert np.allclose(vals, np.abs(pts[:, 0]) ** 4 + np.abs(pts[:, 1]) ** 4)


def test_empty_polynomial():
    assert not eval_poly([], [], [], np.zeros((3, 2))).any()


def test_sphere_minimum_is_deterministic():
    a, xa = sphere_minimum(*TWO_SQUARES, dim=2, samples=512, seed=2)
    b, xb = sphere_minimum(*TWO_SQUARES, dim=2, samples=512, seed=2)
    assert a == b and np.array_equal(xa, xb)
    assert a == pytest.approx(0.5, abs=1e-6)


def test_hessian_eigenvalue_of_identity():
    one = ([1.0], [[0, 0]], [[0, 0]])
    zero = ([], [], [])
    val, _ = min_hessian_eigenvalue([[one, zero], [zero, one]], dim=2, samples=64)
    assert val == pytest.approx(1.0)


def test_env_flag_forces_numpy():
    env = dict(os.environ, CRINV_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from crinvariants import _kernels; print(_kernels.HAVE_NUMBA)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "False"
