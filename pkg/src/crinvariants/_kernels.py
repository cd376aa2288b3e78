"""Numeric kernels for the non-exact tiers (sphere minimization, Hessian sampling).

Polynomials are passed as flat arrays: complex coefficients ``coef[t]`` and
integer exponent rows ``ez[t, j]`` (z_j) and ``ezb[t, j]`` (zbar_j).
Set ``CRINV_DISABLE_NUMBA=1`` to force the pure numpy path.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("CRINV_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    HAVE_NUMBA = False


def _eval_numpy(coef, ez, ezb, pts):
    # pts: (N, m) complex
    zp = pts[:, None, :] ** ez[None, :, :]
    zbp = np.conj(pts)[:, None, :] ** ezb[None, :, :]
    return (zp.prod(axis=2) * zbp.prod(axis=2)) @ coef


if HAVE_NUMBA:
    @njit(cache=True)
    def _eval_numba(coef, ez, ezb, pts):
        n, m = pts.shape
        t = coef.shape[0]
        out = np.zeros(n, dtype=np.complex128)
        for i in range(n):
            acc = 0j
            for k in range(t):
                term = coef[k]
                for j in range(m):
                    e = ez[k, j]
                    if e:
                        term *= pts[i, j] ** e
                    e = ezb[k, j]
                    if e:
                        term *= np.conj(pts[i, j]) ** e
                acc += term
            out[i] = acc
        return out


def eval_poly(coef, ez, ezb, pts, backend: str | None = None) -> np.ndarray:
    """Evaluate sum coef * z^ez * zbar^ezb at each row of ``pts``."""
    coef = np.asarray(coef, dtype=np.complex128)
    pts = np.ascontiguousarray(pts, dtype=np.complex128)
    if len(coef) == 0:
        return np.zeros(len(pts), dtype=np.complex128)
    ez = np.asarray(ez, dtype=np.int64).reshape(len(coef), -1)
    ezb = np.asarray(ezb, dtype=np.int64).reshape(len(coef), -1)
    use = backend or ("numba" if HAVE_NUMBA else "numpy")
    if use == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend unavailable")
        return _eval_numba(coef, ez, ezb, pts)
    return _eval_numpy(coef, ez, ezb, pts)


def sphere_points(count: int, dim: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    return x / np.linalg.norm(x, axis=1)[:, None]


def sphere_minimum(coef, ez, ezb, dim: int, samples: int = 4096, seed: int = 0, refine: int = 200):
    """Approximate min of Re P over the unit sphere; returns (value, argmin).

    Random sampling followed by a deterministic shrinking local search.
    """
    pts = sphere_points(samples, dim, seed)
    vals = eval_poly(coef, ez, ezb, pts).real
    best = int(np.argmin(vals))
    x, fx = pts[best], float(vals[best])
    rng = np.random.default_rng(seed + 1)
    step = 0.25
    for _ in range(refine):
        cand = x[None, :] + step * (rng.normal(size=(16, dim)) + 1j * rng.normal(size=(16, dim)))
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        cv = eval_poly(coef, ez, ezb, cand).real
        k = int(np.argmin(cv))
        if cv[k] < fx:
            x, fx = cand[k], float(cv[k])
        else:
            step *= 0.8
        if step < 1e-12:
            break
    return fx, x


def min_hessian_eigenvalue(entries, dim: int, samples: int = 2048, seed: int = 0):
    """Smallest eigenvalue of a Hermitian polynomial matrix over sphere samples.

    ``entries[j][k]`` is a (coef, ez, ezb) triple.  Returns (value, point).
    """
    pts = sphere_points(samples, dim, seed)
    k = len(entries)
    mats = np.zeros((samples, k, k), dtype=np.complex128)
    for a in range(k):
        for b in range(k):
            coef, ez, ezb = entries[a][b]
            mats[:, a, b] = eval_poly(coef, ez, ezb, pts)
    eig = np.linalg.eigvalsh(mats)[:, 0]
    i = int(np.argmin(eig))
    return float(eig[i]), pts[i]
