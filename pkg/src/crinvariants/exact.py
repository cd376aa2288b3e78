"""Exact scalars in Q(i) and small dense matrices over them."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class GaussianRational:
    """The number (a + b*i)/d with integers a, b, d, d > 0 and gcd(a, b, d) = 1."""

    __slots__ = ("_a", "_b", "_d", "_h")

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        g = gcd(gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        self._a, self._b, self._d = a, b, d
        self._h = None

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        if d < 0:
            a, b, d = -a, -b, -d
        obj = object.__new__(cls)
        obj._set(a, b, d)
        return obj

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x)

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_real(self) -> bool:
        return self._b == 0

    def conj(self) -> "GaussianRational":
        obj = object.__new__(GaussianRational)
        obj._a, obj._b, obj._d, obj._h = self._a, -self._b, self._d, None
        return obj

    def abs2(self) -> Fraction:
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if self._d == o._d:
            return GaussianRational._raw(self._a + o._a, self._b + o._b, self._d)
        return GaussianRational._raw(
            self._a * o._d + o._a * self._d, self._b * o._d + o._b * self._d, self._d * o._d
        )

    __radd__ = __add__

    def __neg__(self):
        obj = object.__new__(GaussianRational)
        obj._a, obj._b, obj._d, obj._h = -self._a, -self._b, self._d, None
        return obj

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, e = self._a, self._b, o._a, o._b
        if b == 0 and e == 0:
            return GaussianRational._raw(a * c, 0, self._d * o._d)
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(i)")
        n = self._a * self._a + self._b * self._b
        return GaussianRational._raw(self._a * self._d, -self._b * self._d, n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return False
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._h is None:
            self._h = hash((self._a, self._b, self._d))
        return self._h

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return self.render()

    def render(self) -> str:
        """Canonical text such as ``3/4``, ``-i``, ``1/2+3*i``."""
        re, im = self.re, self.im
        if im == 0:
            return str(re)
        if im == 1:
            ims = "i"
        elif im == -1:
            ims = "-i"
        else:
            ims = f"{im}*i"
        if re == 0:
            return ims
        if ims.startswith("-"):
            return f"{re}{ims}"
        return f"{re}+{ims}"

    def to_json(self) -> dict:
        return {"re": str(self.re), "im": str(self.im)}


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return GaussianRational._raw(x, 0, 1)
    if isinstance(x, Fraction):
        return GaussianRational._raw(x.numerator, 0, x.denominator)
    return NotImplemented


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

Scalar = GaussianRational


def gr(x) -> GaussianRational:
    """Coerce ints, Fractions, decimal strings like ``'1/2'`` or complex to Q(i)."""
    if isinstance(x, str):
        return GaussianRational(Fraction(x))
    return GaussianRational.coerce(x)


class ExactMatrix:
    """Immutable dense matrix over Q(i)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable], cols: int | None = None):
        grid = tuple(tuple(gr(x) for x in row) for row in entries)
        self.rows = len(grid)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        for row in grid:
            if len(row) != cols:
                raise ValueError("ragged matrix")
        self.cols = cols
        self.entries = grid

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "ExactMatrix":
        return cls([[0] * c for _ in range(r)], c)

    @classmethod
    def diag(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "ExactMatrix":
        if not columns:
            return cls([[] for _ in range(rows or 0)], 0)
        r = len(columns[0])
        return cls([[columns[j][i] for j in range(len(columns))] for i in range(r)], len(columns))

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.entries == other.entries and self.cols == other.cols

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(x.render() for x in row) for row in self.entries)
        return f"ExactMatrix[{body}]"

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def conj(self) -> "ExactMatrix":
        return ExactMatrix([[x.conj() for x in row] for row in self.entries], self.cols)

    def adjoint(self) -> "ExactMatrix":
        return self.conj().transpose()

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for row in self.entries:
            new = []
            for j in range(other.cols):
                acc = ZERO
                for k, x in enumerate(row):
                    if x:
                        y = other.entries[k][j]
                        if y:
                            acc = acc + x * y
                new.append(acc)
            out.append(new)
        return ExactMatrix(out, other.cols)

    def apply(self, vec: Sequence) -> tuple:
        vec = [gr(v) for v in vec]
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        out = []
        for row in self.entries:
            acc = ZERO
            for x, y in zip(row, vec):
                if x and y:
                    acc = acc + x * y
            out.append(acc)
        return tuple(out)

    def is_hermitian(self) -> bool:
        if self.rows != self.cols:
            return False
        return all(
            self.entries[i][j] == self.entries[j][i].conj() for i in range(self.rows) for j in range(i, self.cols)
        )

    def is_zero(self) -> bool:
        return all(not x for row in self.entries for x in row)

    def rref(self) -> tuple["ExactMatrix", list[int]]:
        """Reduced row echelon form and pivot columns."""
        m = [list(row) for row in self.entries]
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            piv = next((i for i in range(r, self.rows) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = m[r][c].inverse()
            m[r] = [x * inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return ExactMatrix(m, self.cols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def inverse(self) -> "ExactMatrix":
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of non-square matrix")
        aug = ExactMatrix([list(self.entries[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)])
        red, piv = aug.rref()
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return ExactMatrix([row[n:] for row in red.entries], n)


def nullspace(m: ExactMatrix) -> list[tuple]:
    """Basis of {x : m x = 0}, one vector per free column."""
    red, pivots = m.rref()
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [ZERO] * m.cols
        vec[f] = ONE
        for r, pc in enumerate(pivots):
            vec[pc] = -red.entries[r][f]
        basis.append(tuple(vec))
    return basis


def column_space(vectors: Sequence[Sequence], dim: int) -> list[tuple]:
    """Independent subset-free basis (row-reduced) of the span of ``vectors``."""
    if not vectors:
        return []
    red, piv = ExactMatrix(vectors, dim).rref()
    return [red.entries[i] for i in range(len(piv))]


def span_rank(vectors: Sequence[Sequence], dim: int) -> int:
    if not vectors:
        return 0
    return ExactMatrix(vectors, dim).rank()


def same_span(a: Sequence[Sequence], b: Sequence[Sequence], dim: int) -> bool:
    ra, rb = span_rank(a, dim), span_rank(b, dim)
    return ra == rb and span_rank(list(a) + list(b), dim) == ra


def _congruence(m: ExactMatrix, e: ExactMatrix) -> ExactMatrix:
    return e.adjoint() @ m @ e


def congruence_diagonalize(m: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix]:
    """Return (p, d) with p invertible and p* m p = d diagonal and real.

    Symmetric pivoting: take the first nonzero diagonal entry; when the
    remaining diagonal vanishes, add a multiple of another column to create
    one (the 2x2 block trick).
    """
    if not m.is_hermitian():
        raise ValueError("congruence_diagonalize needs a Hermitian matrix")
    n = m.rows
    a = m
    p = ExactMatrix.identity(n)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i, i]), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(k, n) if i != j and a[i, j]), None)
            if pair is None:
                break
            i, j = pair
            for c in (ONE, I):
                e = [[1 if r == s else 0 for s in range(n)] for r in range(n)]
                e[j][i] = c
                e = ExactMatrix(e, n)
                trial = _congruence(a, e)
                if trial[i, i]:
                    a, p, piv = trial, p @ e, i
                    break
        if piv != k:
            perm = ExactMatrix([[1 if s == _swap(r, k, piv) else 0 for s in range(n)] for r in range(n)], n)
            a, p = _congruence(a, perm), p @ perm
        e = [[1 if r == s else 0 for s in range(n)] for r in range(n)]
        dirty = False
        for r in range(k + 1, n):
            if a[k, r]:
                e[k][r] = -(a[k, r] / a[k, k])
                dirty = True
        if dirty:
            e = ExactMatrix(e, n)
            a, p = _congruence(a, e), p @ e
    return p, a


def _swap(r: int, k: int, piv: int) -> int:
    if r == k:
        return piv
    if r == piv:
        return k
    return r


def hermitian_signature(m: ExactMatrix) -> tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) of a Hermitian matrix."""
    _, d = congruence_diagonalize(m)
    plus = sum(1 for i in range(d.rows) if d[i, i].re > 0)
    minus = sum(1 for i in range(d.rows) if d[i, i].re < 0)
    return plus, minus, d.rows - plus - minus


def is_psd(m: ExactMatrix) -> bool:
    return hermitian_signature(m)[1] == 0


def is_pd(m: ExactMatrix) -> bool:
    plus, _, _ = hermitian_signature(m)
    return plus == m.rows
