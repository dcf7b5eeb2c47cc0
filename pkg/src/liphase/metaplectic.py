"""Branch-carrying group elements, the integer cocycle, degrees and the spin cover.

A MetaElement is a pair (g, theta) where theta lifts Arg Delta(g) at the base
point i I.  It stands for the pair (g, f) with Delta(g) = exp(-2 pi i f), so
Re f = -theta / (2 pi) along the continued branch.  The central integer k
(f = k) therefore has theta = -2 pi k; see ``central``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import BranchMismatch, IntegralityViolated, OutOfU0, SignUndetermined, Unsupported
from .exact import IntLattice, RatMatrix, det_exact, integer_kernel, sublattice_index
from .polypath import line_index, wrap
from .siegel import (SiegelPoint, SpElement, base_point, identity, sp_act, square_arg_along,
                     square_arg_from_infinity, square_arg_from_zero)

TWO_PI = 2 * math.pi
INT_TOL = 1e-6
BRANCH_TOL = 1e-6


def _omega(w) -> np.ndarray:
    return w.omega if isinstance(w, SiegelPoint) else np.asarray(w, dtype=complex)


@dataclass(frozen=True, eq=False)
class MetaElement:
    g: SpElement
    base_arg: float

    def __post_init__(self):
        # stored values are snapped onto the exact lift of the principal argument
        v = self.delta_at_base
        off = wrap(self.base_arg - math.atan2(v.imag, v.real))
        if abs(off) > BRANCH_TOL:
            raise BranchMismatch(f"base_arg {self.base_arg} misses Arg Delta(g)(iI) by {off:.3g}")
        object.__setattr__(self, "base_arg", float(self.base_arg - off))

    @cached_property
    def delta_at_base(self) -> complex:
        a, b, _, _ = self.g.blocks_complex
        return complex(np.linalg.det(a + 1j * b)) ** 2

    @property
    def n(self) -> int:
        return self.g.n

    def arg_at(self, w) -> float:
        """The continued branch of Arg Delta(g) at w."""
        a, b, _, _ = self.g.blocks_complex
        return square_arg_along(a, b, 1j * np.eye(self.n), _omega(w), self.base_arg)

    def f_at(self, w) -> complex:
        """The function f with Delta(g) = exp(-2 pi i f), at w."""
        a, b, _, _ = self.g.blocks_complex
        mod = abs(np.linalg.det(a + b @ _omega(w))) ** 2
        return complex(-self.arg_at(w), math.log(mod)) / TWO_PI

    def __matmul__(self, other: "MetaElement") -> "MetaElement":
        return meta_mul(self, other)

    def inv(self) -> "MetaElement":
        return meta_inv(self)

    def shifted(self, k: int) -> "MetaElement":
        """Multiply by the central integer k."""
        return MetaElement(self.g, self.base_arg - TWO_PI * k)

    def same(self, other: "MetaElement", tol: float = 1e-6) -> bool:
        return self.g == other.g and abs(self.base_arg - other.base_arg) < tol

    def __repr__(self) -> str:
        return f"MetaElement(g={self.g.matrix}, base_arg={self.base_arg!r})"


def central(n: int, k: int = 1) -> MetaElement:
    """The central integer k, i.e. (I, f = k); it shifts lifted objects by [k]."""
    return MetaElement(identity(n), -TWO_PI * k)


def meta_identity(n: int) -> MetaElement:
    return MetaElement(identity(n), 0.0)


def canonical_lift(g: SpElement) -> MetaElement:
    """Distinguished lift of g.

    b = 0: the lower parabolic splitting, base_arg 0.
    det b != 0: the branch tending to n pi as w = iT I, T -> oo.
    c = 0 with b singular: the upper parabolic splitting, tending to 0 as w -> 0.
    """
    n = g.n
    a, b, _, _ = g.blocks_complex
    w0 = 1j * np.eye(n)
    if g.is_lower:
        return MetaElement(g, 0.0)
    if g.in_u0:
        return MetaElement(g, square_arg_from_infinity(a, b, n * math.pi, w0))
    if g.is_upper:
        return MetaElement(g, square_arg_from_zero(a, b, w0))
    raise Unsupported("canonical lift needs det b != 0 or a triangular element; factor g first")


def parabolic_lift(g: SpElement) -> MetaElement:
    """Splitting over the upper parabolic: the branch tending to 0 as w -> 0."""
    if not g.is_upper:
        raise Unsupported("parabolic lift needs c = 0")
    a, b, _, _ = g.blocks_complex
    return MetaElement(g, square_arg_from_zero(a, b, 1j * np.eye(g.n)))


def principal_lift(g: SpElement) -> MetaElement:
    """Some lift of g: the principal value of Arg Delta(g) at the base point."""
    a, b, _, _ = g.blocks_complex
    v = complex(np.linalg.det(a + 1j * b)) ** 2
    return MetaElement(g, math.atan2(v.imag, v.real))


def meta_mul(m1: MetaElement, m2: MetaElement) -> MetaElement:
    w = sp_act(m2.g, base_point(m2.n))
    return MetaElement(m1.g @ m2.g, m1.arg_at(w) + m2.base_arg)


def meta_inv(m: MetaElement) -> MetaElement:
    ginv = m.g.inv()
    return MetaElement(ginv, -m.arg_at(sp_act(ginv, base_point(m.n))))


def _round_int(x: float, what: str, tol: float = INT_TOL) -> int:
    k = round(x)
    if abs(x - k) > tol:
        raise IntegralityViolated(f"{what} = {x!r} is not an integer")
    return int(k)


# ---------------------------------------------------------------- the integer cocycle

def lambda_exact(g1: SpElement, g2: SpElement) -> int:
    """-i(b1^{-1} b12 b2^{-1}) for g1, g2, g1 g2 with invertible b."""
    g12 = g1 @ g2
    for name, g in (("g1", g1), ("g2", g2), ("g1 g2", g12)):
        if not g.in_u0:
            raise OutOfU0(f"{name} has singular b block")
    M = g1.b.inv() @ g12.b @ g2.b.inv()
    assert M == g1.b.inv() @ g1.a + g2.d @ g2.b.inv()
    assert M.is_symmetric()
    return -line_index(M)


def lambda_general(g1: SpElement, g2: SpElement) -> int:
    """The cocycle read off from branches: lift(g1) lift(g2) = lift(g1 g2) (I, lambda)."""
    prod = meta_mul(canonical_lift(g1), canonical_lift(g2))
    ref = canonical_lift(g1 @ g2)
    return _round_int(-(prod.base_arg - ref.base_arg) / TWO_PI, "lambda")


def lambda_graph(g: SpElement, phi: RatMatrix) -> int:
    """Shift attached to moving the graph of phi by g: -i(b^{-1} a + phi)."""
    if not g.in_u0:
        raise OutOfU0("b block is singular")
    return -line_index(g.b.inv() @ g.a + phi)


# ---------------------------------------------------------------- degrees

def _preimage_index(g: SpElement) -> int:
    """[Z^{2n} : Z^{2n} cap g^{-1} Z^{2n}]."""
    M = g.matrix
    N = M.nrows
    D = M.denominator_lcm()
    if D == 1:
        return 1
    G = (M * D).to_int_rows()
    # v with G v = D w for integral w: kernel of [G | -D I], projected to v
    rows = [list(G[i]) + [-D if j == i else 0 for j in range(N)] for i in range(N)]
    K = integer_kernel(rows)
    sub = IntLattice.from_columns(N, [k[:N] for k in K])
    full = IntLattice.from_columns(N, [[int(i == j) for i in range(N)] for j in range(N)])
    return sublattice_index(sub, full)


def q_of(g: SpElement) -> int:
    return _preimage_index(g) ** 2


def N_of(g1: SpElement, g2: SpElement) -> int:
    val = Fraction(_preimage_index(g1) * _preimage_index(g2), _preimage_index(g1 @ g2))
    if val.denominator != 1:
        raise IntegralityViolated(f"N = {val} is not an integer")
    return val.numerator


# ---------------------------------------------------------------- spin cover

@dataclass(frozen=True)
class SpinElement:
    """(g, f) with f(w) = sign * det(a + b w)."""

    g: SpElement
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def __matmul__(self, other: "SpinElement") -> "SpinElement":
        return SpinElement(self.g @ other.g, self.sign * other.sign)

    def inv(self) -> "SpinElement":
        return SpinElement(self.g.inv(), self.sign)

    def f_exact(self, phi: RatMatrix) -> Fraction:
        return self.sign * det_exact(self.g.a + self.g.b @ phi)

    def f_at(self, w) -> complex:
        a, b, _, _ = self.g.blocks_complex
        return self.sign * complex(np.linalg.det(a + b @ _omega(w)))


def spin_of(m: MetaElement, tol: float = 1e-6) -> SpinElement:
    a, b, _, _ = m.g.blocks_complex
    v = complex(np.linalg.det(a + 1j * b))
    for s in (1, -1):
        if abs(wrap(math.atan2((s * v).imag, (s * v).real) - m.base_arg / 2)) < tol:
            return SpinElement(m.g, s)
    raise SignUndetermined("neither sign matches half of base_arg")
