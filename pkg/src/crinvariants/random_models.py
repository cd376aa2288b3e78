"""Random pseudoconvex degree-4 models with rational coefficients.

rho = -(w + wbar) + sum_k |h_k|^2 pulled back by a random polynomial
biholomorphism fixing 0, then truncated to total degree 4.  The 4-jet at
0 is that of a plurisubharmonic-plus-pluriharmonic defining function, so
pointwise invariants at 0 are those of a pseudoconvex hypersurface.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exact import GaussianRational
from .geometry import Hypersurface
from .poly import PolyExpr, ambient_ring

_SMALL = [Fraction(x, d) for x in range(-2, 3) for d in (1, 2) if x]


@dataclass
class RandomModel:
    seed: int
    n: int
    q: int
    hypersurface: Hypersurface
    description: str


def _coef(rng: random.Random, imag: bool = True) -> GaussianRational:
    re = rng.choice(_SMALL + [Fraction(0)])
    im = rng.choice(_SMALL + [Fraction(0)]) if imag else Fraction(0)
    return GaussianRational(re, im)


def _random_form(rng, variables, degree, density=0.6) -> PolyExpr:
    ring = variables[0].ring
    out = PolyExpr.zero(ring)
    if degree == 1:
        monos = [(v,) for v in variables]
    else:
        monos = [(a, b) for i, a in enumerate(variables) for b in variables[i:]]
    for mono in monos:
        if rng.random() < density:
            t = PolyExpr.const(ring, _coef(rng))
            for v in mono:
                t = t * v
            out = out + t
    return out


def random_model(seed: int, n: int | None = None, q: int | None = None, change: bool = True,
                 mixed: bool = True) -> RandomModel:
    rng = random.Random(seed)
    n = n or rng.choice([2, 3, 3])
    m = n - 1
    q = rng.randint(0, m - 1) if q is None else q
    r = ambient_ring(n)
    w = PolyExpr.var(r, "w")
    z = [PolyExpr.var(r, f"z{j}") for j in range(1, n)]
    phi = PolyExpr.zero(r)
    # Levi-nondegenerate directions
    for j in range(q):
        phi = phi + z[j] * z[j].conjugate()
    # quartic part from squares of quadratic holomorphic forms in the remaining variables
    rest = z[q:]
    count = rng.randint(1, max(1, len(rest) + 1))
    for _ in range(count):
        hk = _random_form(rng, rest, 2)
        if mixed and q:
            hk = hk + _random_form(rng, z[:q] + [w], 1, 0.3).scale(Fraction(1))
        phi = phi + hk * hk.conjugate()
    # diagonal terms to keep the quartic part from degenerating too often
    for v in rest:
        if rng.random() < 0.7:
            phi = phi + (v * v.conjugate()) ** 2
    rho = -(w + w.conjugate()) + phi
    if change:
        imgs = {}
        for k, var in enumerate([w] + z):
            img = var
            if k > 0:
                img = img + _random_form(rng, [w] + z, 2, 0.3)
                if rng.random() < 0.5:
                    img = img + w.scale(_coef(rng))
            else:
                img = img + _random_form(rng, [w] + z, 2, 0.3)
            imgs[k] = img
            imgs[k + n] = img.conjugate()
        jet = rho.subs(imgs, 5)
        rho = PolyExpr(r, {e: c for e, c in jet.terms.items() if sum(e) <= 4})
    h = Hypersurface(rho, f"random-{seed}")
    desc = f"n={n}, q={q}, seed={seed}" + (", with coordinate change" if change else "")
    return RandomModel(seed, n, q, h, desc)


def random_suite(count: int = 100, start: int = 0) -> list[RandomModel]:
    return [random_model(s) for s in range(start, start + count)]
