"""Rational polynomials, positive-root counting, and argument continuation.

The continuation engine tracks a continuous branch of the argument of a
non-vanishing complex function along t in [0, 1].  Evaluators take a numpy
array of parameters and return an array of complex values, so each
refinement level costs one vectorized call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateInput, NonVanishingViolated, PrecisionExhausted, BranchMismatch
from .exact import RatMatrix, det_exact, is_positive_definite

EPS_ZERO = 1e-12
STEP_LIMIT = 0.9 * math.pi / 2
DIP_FACTOR = 0.25
MAX_DEPTH = 48
INITIAL_STEPS = 16


class RatPoly:
    """Univariate polynomial over Q, coefficients in ascending degree."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def from_roots(cls, roots: Sequence, lead=1) -> "RatPoly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    @property
    def lead(self) -> Fraction:
        return self.c[-1]

    def __eq__(self, other) -> bool:
        return isinstance(other, RatPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self) -> str:
        return f"RatPoly({[str(x) for x in self.c]})"

    def __add__(self, o: "RatPoly") -> "RatPoly":
        n = max(len(self.c), len(o.c))
        return RatPoly((self.c[i] if i < len(self.c) else 0) + (o.c[i] if i < len(o.c) else 0) for i in range(n))

    def __neg__(self) -> "RatPoly":
        return RatPoly(-x for x in self.c)

    def __sub__(self, o: "RatPoly") -> "RatPoly":
        return self + (-o)

    def __mul__(self, o) -> "RatPoly":
        if not isinstance(o, RatPoly):
            return RatPoly(x * Fraction(o) for x in self.c)
        if not self.c or not o.c:
            return RatPoly()
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, x in enumerate(self.c):
            for j, y in enumerate(o.c):
                out[i + j] += x * y
        return RatPoly(out)

    __rmul__ = __mul__

    def divmod(self, o: "RatPoly") -> tuple["RatPoly", "RatPoly"]:
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        q = [Fraction(0)] * max(len(r) - len(o.c) + 1, 0)
        while len(r) >= len(o.c) and any(r):
            k = len(r) - len(o.c)
            f = r[-1] / o.lead
            q[k] = f
            for i, y in enumerate(o.c):
                r[k + i] -= f * y
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return RatPoly(q), RatPoly(r)

    def __floordiv__(self, o):
        return self.divmod(o)[0]

    def __mod__(self, o):
        return self.divmod(o)[1]

    def derivative(self) -> "RatPoly":
        return RatPoly(i * x for i, x in enumerate(self.c) if i)

    def monic(self) -> "RatPoly":
        return self * (1 / self.lead) if self.c else self

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomp(P: RatPoly) -> list[tuple[RatPoly, int]]:
    """Yun's algorithm; factors are monic, their product times a constant is P."""
    if P.is_zero():
        raise DegenerateInput("square-free decomposition of the zero polynomial")
    out = []
    if P.degree == 0:
        return out
    dP = P.derivative()
    a = poly_gcd(P, dP)
    b = P // a
    c = dP // a
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b = b // a
        c = d // a
        d = c - b.derivative()
        if a.degree > 0:
            out.append((a, i))
        i += 1
    return out


def sturm_chain(p: RatPoly) -> list[RatPoly]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2] % chain[-1]))
    return chain[:-1]


def _variations(signs: list[int]) -> int:
    s = [x for x in signs if x != 0]
    return sum(1 for u, v in zip(s, s[1:]) if u != v)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def count_positive_roots_mult(P: RatPoly) -> int:
    """Roots in (0, oo) counted with multiplicity."""
    if P.is_zero():
        raise DegenerateInput("zero polynomial has infinitely many roots")
    total = 0
    for f, m in squarefree_decomp(P):
        if f(Fraction(0)) == 0:
            f = f // RatPoly([0, 1])
        if f.degree <= 0:
            continue
        chain = sturm_chain(f)
        at0 = _variations([_sign(g(Fraction(0))) for g in chain])
        at_inf = _variations([_sign(g.lead) if not g.is_zero() else 0 for g in chain])
        total += m * (at0 - at_inf)
    return total


def interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> RatPoly:
    """Exact Lagrange interpolation."""
    out = RatPoly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = RatPoly([yi])
        for j, xj in enumerate(xs):
            if j != i:
                term = term * RatPoly([-xj / (xi - xj), 1 / (xi - xj)])
        out = out + term
    return out


def det_line(x: RatMatrix, H: RatMatrix) -> RatPoly:
    """The polynomial t -> det(x + t H), by exact interpolation at n + 1 points."""
    n = x.nrows
    ts = [Fraction(k) for k in range(n + 1)]
    return interpolate(ts, [det_exact(x + H * t) for t in ts])


def line_index(x: RatMatrix, H: RatMatrix | None = None) -> int:
    """Number of positive roots of det(x + tH), with multiplicity."""
    H = RatMatrix.identity(x.nrows) if H is None else H
    if not x.is_symmetric() or not H.is_symmetric():
        raise DegenerateInput("index needs symmetric matrices")
    if det_exact(x) == 0:
        raise DegenerateInput("index of a degenerate matrix")
    if not is_positive_definite(H):
        raise DegenerateInput("H must be positive definite")
    return count_positive_roots_mult(det_line(x, H))


# ---------------------------------------------------------------- continuation

@dataclass(frozen=True)
class PathSegment:
    """A complex-valued function of t in [0, 1], evaluated on numpy arrays."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    start: object = None
    end: object = None

    def __call__(self, t) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(t, dtype=float)), dtype=complex)


def wrap(theta: float) -> float:
    """Representative of theta modulo 2 pi in (-pi, pi]."""
    r = math.remainder(theta, 2 * math.pi)
    return math.pi if r == -math.pi else r


def _check_nonzero(v: np.ndarray, eps_zero: float):
    m = np.abs(v)
    if not np.all(np.isfinite(m)) or np.any(m < eps_zero):
        raise NonVanishingViolated(f"tracked value fell below {eps_zero:g} (min |value| = {np.nanmin(m):.3g})")


def arg_increment(seg, *, initial: int = INITIAL_STEPS, max_depth: int = MAX_DEPTH,
                  eps_zero: float = EPS_ZERO, dip_factor: float = DIP_FACTOR) -> float:
    """Change of a continuous argument of seg(t) from t = 0 to t = 1."""
    ts = np.linspace(0.0, 1.0, initial + 1)
    vs = np.asarray(seg(ts), dtype=complex)
    _check_nonzero(vs, eps_zero)
    ta, tb, va, vb = ts[:-1], ts[1:], vs[:-1], vs[1:]
    total = 0.0
    depth = 0
    while ta.size:
        tm = 0.5 * (ta + tb)
        vm = np.asarray(seg(tm), dtype=complex)
        _check_nonzero(vm, eps_zero)
        a1 = np.angle(vm / va)
        a2 = np.angle(vb / vm)
        a = np.angle(vb / va)
        ok = (
            (np.abs(a1) < STEP_LIMIT)
            & (np.abs(a2) < STEP_LIMIT)
            & (np.abs(a1 + a2 - a) < 1e-9)
            & (np.abs(vm) > dip_factor * np.minimum(np.abs(va), np.abs(vb)))
        )
        total += float(np.sum(a1[ok] + a2[ok]))
        bad = ~ok
        if not bad.any():
            break
        depth += 1
        if depth > max_depth:
            raise PrecisionExhausted(f"argument tracking needed more than {max_depth} bisections")
        ta, tm_, tb = ta[bad], tm[bad], tb[bad]
        va, vm_, vb = va[bad], vm[bad], vb[bad]
        ta, tb = np.concatenate([ta, tm_]), np.concatenate([tm_, tb])
        va, vb = np.concatenate([va, vm_]), np.concatenate([vm_, vb])
    return total


def arg_continue(seg, start: float, *, tol: float = 1e-6, **kw) -> float:
    """Continue the branch value ``start`` (a lift of arg seg(0)) to t = 1."""
    v0 = complex(np.asarray(seg(np.array([0.0])))[0])
    if abs(v0) < kw.get("eps_zero", EPS_ZERO):
        raise NonVanishingViolated("tracked value vanishes at the start of the path")
    if abs(wrap(start - math.atan2(v0.imag, v0.real))) > tol:
        raise BranchMismatch(f"start value {start} does not lift arg {math.atan2(v0.imag, v0.real)}")
    return start + arg_increment(seg, **kw)


def infinity_correction(M: np.ndarray, T0: float = 2.0 ** 10) -> tuple[float, float]:
    """Find T with det(I + M/(iT)) certified near 1; return (T, its continuous arg).

    The argument is the sum of args of 1 + mu over eigenvalues mu of M/(iT),
    which equals the branch reached from the identity when the spectral norm
    is below 1/2.
    """
    M = np.asarray(M, dtype=complex)
    T = T0
    while True:
        E = M / (1j * T)
        if np.linalg.norm(E, 2) < 0.5:
            corr = float(np.sum(np.angle(1 + np.linalg.eigvals(E))))
            if abs(corr) < 0.1:
                return T, corr
        T *= 2
        if T > 2.0 ** 200:
            raise PrecisionExhausted("no certified anchor at infinity")


def chi_line_arg(x: RatMatrix, H: RatMatrix | None = None, t_end: float = 0.0) -> float:
    """Continued Arg det(x + itH) from its t -> oo normalization n pi/2 down to t_end."""
    n = x.nrows
    H = RatMatrix.identity(n) if H is None else H
    xf, Hf = x.to_numpy(), H.to_numpy()
    T, corr = infinity_correction(np.linalg.solve(Hf, xf))
    start = n * math.pi / 2 + corr

    def ev(s):
        t = T + (t_end - T) * s
        return np.linalg.det(xf[None] + 1j * t[:, None, None] * Hf[None])

    seg = PathSegment(ev)
    return arg_continue(seg, _principal_fix(start, ev(np.array([0.0]))[0]))


def _principal_fix(theta: float, value: complex) -> float:
    """Snap an analytically known branch value onto the exact lift of arg(value)."""
    return theta - wrap(theta - math.atan2(value.imag, value.real))


def chi_window_args(x: RatMatrix, H: RatMatrix, ts: Sequence[float]) -> list[float]:
    """Continued Arg det(iH + t x) at increasing ts >= 0, normalized by n pi/2 at t = 0."""
    n = x.nrows
    xf, Hf = x.to_numpy(), H.to_numpy()
    theta = n * math.pi / 2
    prev = 0.0
    out = []
    for t in ts:
        a, b = prev, float(t)

        def ev(s, a=a, b=b):
            tt = a + (b - a) * s
            return np.linalg.det(1j * Hf[None] + tt[:, None, None] * xf[None])

        if b != a:
            theta = arg_continue(PathSegment(ev), theta)
        out.append(theta)
        prev = b
    return out
