"""Symplectic group elements, the Siegel domain, and the automorphy factor.

The symplectic form is J = (0, I; -I, 0); g = (a, b; c, d) satisfies
g^T J g = J and acts on the Siegel domain by w -> (c + d w)(a + b w)^{-1}.
The automorphy factor is Delta(g)(w) = det(a + b w)^2.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NearSingular, NotSymmetric, NotSymplectic, UsageError
from .exact import RatMatrix, det_exact, parse_matrix
from .polypath import (EPS_ZERO, PathSegment, arg_increment, infinity_correction, wrap)


def symplectic_form(n: int) -> RatMatrix:
    I, Z = RatMatrix.identity(n), RatMatrix.zeros(n)
    return RatMatrix.block([[Z, I], [-I, Z]])


@dataclass(frozen=True)
class SpElement:
    n: int
    a: RatMatrix
    b: RatMatrix
    c: RatMatrix
    d: RatMatrix

    @cached_property
    def matrix(self) -> RatMatrix:
        return RatMatrix.block([[self.a, self.b], [self.c, self.d]])

    @classmethod
    def from_matrix(cls, M: RatMatrix, check: bool = True) -> "SpElement":
        if M.nrows != M.ncols or M.nrows % 2:
            raise NotSymplectic(f"expected a square matrix of even size, got {M.shape}")
        n = M.nrows // 2
        g = cls(n, M.sub(0, n, 0, n), M.sub(0, n, n, 2 * n), M.sub(n, 2 * n, 0, n), M.sub(n, 2 * n, n, 2 * n))
        if check:
            _check_symplectic(M)
        return g

    def __matmul__(self, other: "SpElement") -> "SpElement":
        return SpElement.from_matrix(self.matrix @ other.matrix, check=False)

    def inv(self) -> "SpElement":
        return SpElement(self.n, self.d.T, -self.b.T, -self.c.T, self.a.T)

    def __eq__(self, other) -> bool:
        return isinstance(other, SpElement) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"SpElement({self.matrix})"

    @property
    def in_u0(self) -> bool:
        return det_exact(self.b) != 0

    @property
    def is_lower(self) -> bool:
        return self.b.is_zero()

    @property
    def is_upper(self) -> bool:
        return self.c.is_zero()

    @property
    def is_integral(self) -> bool:
        return self.matrix.is_integral()

    @cached_property
    def blocks_complex(self) -> tuple[np.ndarray, ...]:
        return tuple(m.to_numpy(complex) for m in (self.a, self.b, self.c, self.d))

    def act(self, w: "SiegelPoint") -> "SiegelPoint":
        return sp_act(self, w)


def _check_symplectic(M: RatMatrix):
    n = M.nrows // 2
    R = M.T @ symplectic_form(n) @ M
    J = symplectic_form(n)
    for i in range(2 * n):
        for j in range(2 * n):
            if R[i, j] != J[i, j]:
                raise NotSymplectic(f"(g^T J g)[{i},{j}] = {R[i, j]}, expected {J[i, j]}")


def sp_check(M) -> SpElement:
    if isinstance(M, str):
        M = parse_matrix(M)
    return SpElement.from_matrix(M)


def identity(n: int) -> SpElement:
    I, Z = RatMatrix.identity(n), RatMatrix.zeros(n)
    return SpElement(n, I, Z, Z, I)


def J(n: int) -> SpElement:
    """The inversion (0, I; -I, 0)."""
    I, Z = RatMatrix.identity(n), RatMatrix.zeros(n)
    return SpElement(n, Z, I, -I, Z)


def n_plus(phi: RatMatrix) -> SpElement:
    """Upper unipotent (I, phi; 0, I)."""
    _need_symmetric(phi)
    n = phi.nrows
    I, Z = RatMatrix.identity(n), RatMatrix.zeros(n)
    return SpElement(n, I, phi, Z, I)


def n_minus(phi: RatMatrix) -> SpElement:
    """Lower unipotent (I, 0; phi, I)."""
    _need_symmetric(phi)
    n = phi.nrows
    I, Z = RatMatrix.identity(n), RatMatrix.zeros(n)
    return SpElement(n, I, Z, phi, I)


def torus(a: RatMatrix) -> SpElement:
    """Levi element (a^{-1}, 0; 0, a^T)."""
    n = a.nrows
    Z = RatMatrix.zeros(n)
    return SpElement(n, a.inv(), Z, Z, a.T)


def _need_symmetric(phi: RatMatrix):
    if not phi.is_symmetric():
        raise NotSymmetric("expected a symmetric matrix")


# ---------------------------------------------------------------- Siegel points

@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """A complex symmetric matrix with positive-definite imaginary part.

    ``re`` and ``im`` keep exact rational parts when the point was given exactly.
    """

    omega: np.ndarray
    re: RatMatrix | None = None
    im: RatMatrix | None = None
    n: int = field(init=False)

    def __post_init__(self):
        w = np.array(self.omega, dtype=complex)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise NotSymmetric("Siegel point must be a square matrix")
        if np.max(np.abs(w - w.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(w))):
            raise NotSymmetric("Siegel point is not symmetric")
        w = 0.5 * (w + w.T)
        try:
            np.linalg.cholesky(w.imag)
        except np.linalg.LinAlgError:
            raise NotSymmetric("imaginary part is not positive definite") from None
        w.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "n", w.shape[0])

    @classmethod
    def exact(cls, re: RatMatrix, im: RatMatrix) -> "SiegelPoint":
        if not re.is_symmetric() or not im.is_symmetric():
            raise NotSymmetric("real and imaginary parts must be symmetric")
        return cls(re.to_numpy() + 1j * im.to_numpy(), re, im)

    @property
    def is_exact(self) -> bool:
        return self.re is not None and self.im is not None

    def __repr__(self) -> str:
        if self.is_exact:
            return f"SiegelPoint(re={self.re}; im={self.im})"
        return f"SiegelPoint({self.omega.tolist()})"


def base_point(n: int) -> SiegelPoint:
    """The base point i I."""
    return SiegelPoint.exact(RatMatrix.zeros(n), RatMatrix.identity(n))


_SIEGEL = re.compile(r"^\s*re\s*=(.*);\s*im\s*=(.*)$", re.S)


def parse_siegel(text: str) -> SiegelPoint:
    """Parse ``"re=<matrix>;im=<matrix>"``."""
    m = _SIEGEL.match(text)
    if not m:
        raise UsageError(f"bad Siegel point text {text!r}")
    re_, im_ = parse_matrix(m.group(1)), parse_matrix(m.group(2))
    if re_.shape != im_.shape:
        raise UsageError("real and imaginary parts differ in shape")
    try:
        return SiegelPoint.exact(re_, im_)
    except NotSymmetric as e:
        raise UsageError(str(e)) from None


def format_siegel(w: SiegelPoint) -> str | list:
    if w.is_exact:
        return f"re={w.re};im={w.im}"
    return [[[z.real, z.imag] for z in row] for row in w.omega]


def sp_act(g: SpElement, w: SiegelPoint) -> SiegelPoint:
    a, b, c, d = g.blocks_complex
    den = a + b @ w.omega
    if abs(np.linalg.det(den)) < EPS_ZERO:
        raise NearSingular("det(a + b w) vanishes numerically")
    num = c + d @ w.omega
    X = np.linalg.solve(den.T, num.T).T
    return SiegelPoint(0.5 * (X + X.T))


def delta_eval(g: SpElement, w: SiegelPoint) -> complex:
    a, b, _, _ = g.blocks_complex
    return complex(np.linalg.det(a + b @ w.omega)) ** 2


def chi_eval(x) -> complex:
    return complex(np.linalg.det(np.asarray(x, dtype=complex)))


def deg_eval(x) -> complex:
    return chi_eval(x) ** 2


# ---------------------------------------------------------------- branches of det(A + B w)^2

def det_path(A: np.ndarray, B: np.ndarray, w0: np.ndarray, w1: np.ndarray) -> PathSegment:
    """t -> det(A + B w(t)) along the straight segment w(t) = w0 + t (w1 - w0)."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    w0 = np.asarray(w0, dtype=complex)
    dw = np.asarray(w1, dtype=complex) - w0
    A0 = A + B @ w0
    B1 = B @ dw

    def ev(t):
        return np.linalg.det(A0[None] + t[:, None, None] * B1[None])

    return PathSegment(ev, w0, w1)


def square_arg_along(A, B, w0, w1, theta0: float) -> float:
    """Continue a branch of Arg det(A + B w)^2 from w0 (value theta0) to w1."""
    seg = det_path(A, B, w0, w1)
    v0 = complex(seg(np.array([0.0]))[0])
    if abs(v0) < EPS_ZERO:
        raise NearSingular("tracked determinant vanishes at the start point")
    if abs(wrap(theta0 - 2 * math.atan2(v0.imag, v0.real))) > 1e-6:
        raise ValueError(f"branch value {theta0} does not lift Arg of the square at the start")
    if np.allclose(np.asarray(w0), np.asarray(w1), rtol=0, atol=0):
        return theta0
    return theta0 + 2 * arg_increment(seg)


def snap(theta: float, value: complex) -> float:
    """Nearest lift of arg(value) to the approximate branch value theta."""
    return theta - wrap(theta - math.atan2(value.imag, value.real))


def square_arg_from_infinity(A, B, normalization: float, w1) -> float:
    """Branch of Arg det(A + B w)^2 normalized to ``normalization`` as w = iT I, T -> oo.

    B must be invertible; the limit is reached through a certified anchor.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    n = A.shape[0]
    T, corr = infinity_correction(np.linalg.solve(B, A))
    wT = 1j * T * np.eye(n)
    v = complex(np.linalg.det(A + B @ wT)) ** 2
    theta = snap(normalization + 2 * corr, v)
    return square_arg_along(A, B, wT, w1, theta)


def square_arg_from_zero(A, B, w1, eps0: float = 2.0 ** -10) -> float:
    """Branch of Arg det(A + B w)^2 tending to 0 as w = i eps I, eps -> 0 (A invertible, det(A)^2 > 0)."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    n = A.shape[0]
    K = np.linalg.solve(A, B)
    eps = eps0
    while True:
        E = 1j * eps * K
        if np.linalg.norm(E, 2) < 0.5:
            corr = float(np.sum(np.angle(1 + np.linalg.eigvals(E))))
            if abs(corr) < 0.1:
                break
        eps /= 2
    w_eps = 1j * eps * np.eye(n)
    v = complex(np.linalg.det(A + B @ w_eps)) ** 2
    return square_arg_along(A, B, w_eps, w1, snap(2 * corr, v))
