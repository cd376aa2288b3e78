#!/usr/bin/env python3
"""Numba vs numpy timings for the numeric kernels, plus the exact-arithmetic share of a full analysis.

    python3 benchmarks/bench_kernels.py [--points N] [--repeat R]
"""

import argparse
import time

import numpy as np

from crinvariants import _kernels
from crinvariants.cli import FIXTURES
from crinvariants.invariants import _to_arrays
from crinvariants.parser import load_spec, parse_polynomial
from crinvariants.poly import vector_ring
from crinvariants.report import analyze

QUARTIC = ("9*v1^2*conj(v1)^2 + (-3-i)*v1^2*conj(v1)*conj(v2) + (-5-3*i)*v1^2*conj(v2)^2"
           " + (5/4)*v1*v2*conj(v1)*conj(v2) + (17/4)*v2^2*conj(v2)^2 + (-3+i)*v1*v2*conj(v1)^2"
           " + (-5+3*i)*v2^2*conj(v1)^2")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    coef, ez, ezb = _to_arrays(parse_polynomial(QUARTIC, vector_ring(2)))
    pts = _kernels.sphere_points(args.points, 2, seed=0)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    if _kernels.HAVE_NUMBA:
        _kernels.eval_poly(coef, ez, ezb, pts[:8], backend="numba")  # compile

    print(f"eval_poly on {args.points} sphere points, {len(coef)} terms")
    ref = None
    for b in backends:
        t = best_of(lambda: _kernels.eval_poly(coef, ez, ezb, pts, backend=b), args.repeat)
        vals = _kernels.eval_poly(coef, ez, ezb, pts, backend=b)
        ref = vals if ref is None else ref
        print(f"  {b:6s} {t * 1e3:9.2f} ms   max |diff| vs numpy {np.max(np.abs(vals - ref)):.1e}")

    t = best_of(lambda: _kernels.sphere_minimum(coef, ez, ezb, 2), args.repeat)
    print(f"sphere_minimum (default backend {backends[-1]}): {t * 1e3:.2f} ms")

    spec = load_spec(FIXTURES / "dangelo.crs")
    t = best_of(lambda: analyze(spec), 1)
    print(f"full exact analysis of {spec.name} ({len(spec.points)} points): {t:.2f} s")


if __name__ == "__main__":
    main()
