"""Exact rational matrices, integer normal forms, lattices and signatures.

Everything here works over ``fractions.Fraction`` and Python integers, so no
rounding ever happens.  Lattices are stored by a column Hermite normal form,
which makes equality a syntactic comparison.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInput, NotContained, NotSymmetric, UsageError

Rat = Fraction

_ENTRY = re.compile(r"^[+-]?\d+(/\d+)?$")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact entry")


class RatMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(_frac(x) for x in r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self.rows = rows
        self._hash = None

    # construction helpers
    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, k: int | None = None) -> "RatMatrix":
        k = m if k is None else k
        return cls([[0] * k for _ in range(m)])

    @classmethod
    def diag(cls, entries: Sequence) -> "RatMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, n: int, s) -> "RatMatrix":
        return cls.diag([s] * n)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["RatMatrix"]]) -> "RatMatrix":
        rows = []
        for brow in blocks:
            for i in range(brow[0].nrows):
                rows.append(sum((b.rows[i] for b in brow), ()))
        return cls(rows)

    # shape and access
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def sub(self, r0: int, r1: int, c0: int, c1: int) -> "RatMatrix":
        return RatMatrix(r[c0:c1] for r in self.rows[r0:r1])

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self) -> str:
        return f"RatMatrix({format_matrix(self)!r})"

    def __str__(self) -> str:
        return format_matrix(self)

    # arithmetic
    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._same_shape(other)
        return RatMatrix((x + y for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._same_shape(other)
        return RatMatrix((x - y for x, y in zip(r, s)) for r, s in zip(self.rows, other.rows))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix((-x for x in r) for r in self.rows)

    def __mul__(self, s) -> "RatMatrix":
        s = _frac(s)
        return RatMatrix((x * s for x in r) for r in self.rows)

    __rmul__ = __mul__

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        return RatMatrix((sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in cols) for r in self.rows)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(zip(*self.rows)) if self.rows else self

    # predicates
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self.is_square() and self == self.T

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.rows for x in r)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    # derived quantities
    def det(self) -> Fraction:
        return det_exact(self)

    def rank(self) -> int:
        return len(_row_echelon(self.rows)[1])

    def inv(self) -> "RatMatrix":
        return RatMatrix(_solve(self.rows, [[1 if i == j else 0 for j in range(self.nrows)] for i in range(self.nrows)]))

    def solve(self, rhs: "RatMatrix") -> "RatMatrix":
        """Return X with self @ X == rhs, for square invertible self."""
        return RatMatrix(_solve(self.rows, rhs.rows))

    def denominator_lcm(self) -> int:
        d = 1
        for r in self.rows:
            for x in r:
                d = lcm(d, x.denominator)
        return d

    def to_int_rows(self) -> tuple[tuple[int, ...], ...]:
        if not self.is_integral():
            raise ValueError("matrix is not integral")
        return tuple(tuple(x.numerator for x in r) for r in self.rows)

    def to_numpy(self, dtype=float) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=dtype).reshape(self.shape)


def as_ratmatrix(M) -> RatMatrix:
    if isinstance(M, RatMatrix):
        return M
    if isinstance(M, str):
        return parse_matrix(M)
    return RatMatrix(M)


# ---------------------------------------------------------------- text format

def parse_matrix(text: str) -> RatMatrix:
    """Parse ``"1,0;0,1"`` style text; entries are ``p`` or ``p/q``."""
    text = text.strip()
    if not text:
        raise UsageError("empty matrix text")
    rows = []
    for row in text.split(";"):
        entries = []
        for e in row.split(","):
            e = e.strip()
            if not _ENTRY.match(e):
                raise UsageError(f"bad matrix entry {e!r}")
            try:
                entries.append(Fraction(e))
            except ZeroDivisionError:
                raise UsageError(f"zero denominator in {e!r}") from None
        rows.append(entries)
    if any(len(r) != len(rows[0]) for r in rows):
        raise UsageError("rows of unequal length")
    return RatMatrix(rows)


def format_matrix(M: RatMatrix) -> str:
    return ";".join(",".join(str(x) for x in r) for r in M.rows)


# ---------------------------------------------------------------- elimination

def det_exact(M: RatMatrix) -> Fraction:
    """Determinant by fraction-free Bareiss elimination on a scaled integer copy."""
    if not M.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = M.nrows
    if n == 0:
        return Fraction(1)
    scale = 1
    A = []
    for r in M.rows:
        d = 1
        for x in r:
            d = lcm(d, x.denominator)
        scale *= d
        A.append([(x * d).numerator for x in r])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        p = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * p - A[i][k] * A[k][j]) // prev
        prev = p
    return Fraction(sign * A[n - 1][n - 1], scale)


def _row_echelon(rows):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    A = [[_frac(x) for x in r] for r in rows]
    m = len(A)
    k = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        A[r] = [x / pv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def _solve(A_rows, B_rows):
    n = len(A_rows)
    aug = [list(map(_frac, a)) + list(map(_frac, b)) for a, b in zip(A_rows, B_rows)]
    R, piv = _row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise DegenerateInput("singular matrix")
    return [r[n:] for r in R[:n]]


def rref(M: RatMatrix) -> tuple[RatMatrix, list[int]]:
    R, piv = _row_echelon(M.rows)
    return RatMatrix(R), piv


def nullspace(M: RatMatrix) -> list[tuple[Fraction, ...]]:
    """Rational basis of {v : M v = 0}."""
    R, piv = _row_echelon(M.rows)
    k = M.ncols
    free = [c for c in range(k) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * k
        v[f] = Fraction(1)
        for row, c in zip(R, piv):
            v[c] = -row[f]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------- Hermite form

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf(M) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """Column Hermite normal form: returns (H, U) with H = M U, U unimodular.

    Pivot rows strictly increase from left to right, pivots are positive,
    entries to the left of a pivot are reduced into [0, pivot), zero columns
    come last.
    """
    if isinstance(M, RatMatrix):
        M = M.to_int_rows()
    A = [list(map(int, r)) for r in M]
    m = len(A)
    k = len(A[0]) if A else 0
    U = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    def colop(c1, c2, p, q, r, s):
        # (C1, C2) <- (p C1 + r C2, q C1 + s C2)
        for X in (A, U):
            for row in X:
                u, v = row[c1], row[c2]
                row[c1], row[c2] = p * u + r * v, q * u + s * v

    col = 0
    for i in range(m):
        if col == k:
            break
        for j in range(col + 1, k):
            b = A[i][j]
            if b == 0:
                continue
            a = A[i][col]
            g, x, y = _xgcd(a, b)
            colop(col, j, x, -b // g, y, a // g)
        if A[i][col] == 0:
            continue
        if A[i][col] < 0:
            for X in (A, U):
                for row in X:
                    row[col] = -row[col]
        p = A[i][col]
        for j in range(col):
            q = A[i][j] // p
            if q:
                for X in (A, U):
                    for row in X:
                        row[j] -= q * row[col]
        col += 1
    return tuple(map(tuple, A)), tuple(map(tuple, U))


def _int_det(rows) -> int:
    return det_exact(RatMatrix(rows)).numerator


def integer_kernel(M) -> list[tuple[int, ...]]:
    """Basis of the integer kernel {v in Z^k : M v = 0} (automatically saturated)."""
    if isinstance(M, RatMatrix):
        M = M.to_int_rows()
    k = len(M[0])
    H, U = hnf(M)
    nonzero = [j for j in range(k) if any(H[i][j] for i in range(len(H)))]
    return [tuple(U[i][j] for i in range(k)) for j in range(len(nonzero), k)]


@dataclass(frozen=True)
class IntLattice:
    """A sublattice of Z^ambient_rank; ``basis`` holds its canonical HNF columns."""

    ambient_rank: int
    basis: tuple[tuple[int, ...], ...]  # ambient_rank rows x rank columns

    @classmethod
    def from_columns(cls, ambient_rank: int, columns: Sequence[Sequence]) -> "IntLattice":
        columns = [tuple(int(x) for x in c) for c in columns]
        if not columns:
            return cls(ambient_rank, tuple(() for _ in range(ambient_rank)))
        rows = [tuple(c[i] for c in columns) for i in range(ambient_rank)]
        H, _ = hnf(rows)
        keep = [j for j in range(len(columns)) if any(H[i][j] for i in range(ambient_rank))]
        return cls(ambient_rank, tuple(tuple(H[i][j] for j in keep) for i in range(ambient_rank)))

    @classmethod
    def from_matrix(cls, M: RatMatrix) -> "IntLattice":
        """Lattice spanned by the (integral) columns of M."""
        return cls.from_columns(M.nrows, [M.column(j) for j in range(M.ncols)])

    @property
    def rank(self) -> int:
        return len(self.basis[0]) if self.basis else 0

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(r[j] for r in self.basis) for j in range(self.rank)]

    def matrix(self) -> RatMatrix:
        return RatMatrix(self.basis)

    def contains(self, v: Sequence) -> bool:
        try:
            _coords_in(self, [tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in v)])
            return True
        except NotContained:
            return False


def _coords_in(sup: IntLattice, cols) -> list[list[Fraction]]:
    """Coordinates of the given vectors in the HNF basis of sup (must lie in it)."""
    B = sup.basis
    r = sup.rank
    pivots = []
    for j in range(r):
        pivots.append(next(i for i in range(sup.ambient_rank) if B[i][j] != 0))
    out = []
    for v in cols:
        x = []
        for t, p in enumerate(pivots):
            s = Fraction(v[p]) - sum(B[p][s_] * x[s_] for s_ in range(t))
            x.append(s / B[p][t])
        for i in range(sup.ambient_rank):
            if sum(B[i][j] * x[j] for j in range(r)) != v[i]:
                raise NotContained("vector not in the Q-span of the lattice")
        if any(c.denominator != 1 for c in x):
            raise NotContained("vector not in the lattice")
        out.append(x)
    return out


def saturate(L: IntLattice) -> IntLattice:
    """Integral points of the rational span of L."""
    N = L.ambient_rank
    r = L.rank
    if r == 0:
        return L
    if r == N:
        return IntLattice.from_columns(N, [tuple(1 if i == j else 0 for i in range(N)) for j in range(N)])
    BT = [tuple(L.basis[i][j] for i in range(N)) for j in range(r)]
    K = integer_kernel(BT)  # vectors w with w . b = 0 for all basis b
    sat = integer_kernel(K)
    return IntLattice.from_columns(N, sat)


def sublattice_index(sub: IntLattice, sup: IntLattice) -> int:
    if sub.ambient_rank != sup.ambient_rank or sub.rank != sup.rank:
        raise NotContained("lattices of different rank")
    X = _coords_in(sup, sub.columns())  # one coordinate list per column of sub
    return abs(det_exact(RatMatrix(X)).numerator)


# ---------------------------------------------------------------- signatures

def signature_sym(S: RatMatrix) -> tuple[int, int, int]:
    """Inertia (n_plus, n_minus, n_zero) by congruence diagonalization."""
    if not S.is_symmetric():
        raise NotSymmetric("signature of a non-symmetric matrix")
    A = [list(r) for r in S.rows]
    pos = neg = 0
    while A:
        m = len(A)
        k = next((i for i in range(m) if A[i][i] != 0), None)
        if k is not None:
            p = A[k][k]
            if p > 0:
                pos += 1
            else:
                neg += 1
            rest = [i for i in range(m) if i != k]
            A = [[A[i][j] - A[i][k] * A[k][j] / p for j in rest] for i in rest]
            continue
        pair = next(((i, j) for i in range(m) for j in range(i + 1, m) if A[i][j] != 0), None)
        if pair is None:
            break
        # block [[0,b],[b,0]] has one positive and one negative direction
        k, l = pair
        b = A[k][l]
        pos += 1
        neg += 1
        rest = [i for i in range(m) if i not in pair]
        # Schur complement with inverse block [[0,1/b],[1/b,0]]
        A = [[A[i][j] - (A[i][k] * A[l][j] + A[i][l] * A[k][j]) / b for j in rest] for i in rest]
    return pos, neg, S.nrows - pos - neg


def is_positive_definite(S: RatMatrix) -> bool:
    return signature_sym(S)[0] == S.nrows


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
