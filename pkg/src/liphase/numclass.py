"""Numerical classes in the exterior algebra, the Euler pairing, and the spin action.

Generators e_1, ..., e_{2n} stand for dx_1, dy_1, ..., dx_n, dy_n; a class is
a map from sorted even subsets to coefficients.  The orientation is
e_1 ^ ... ^ e_{2n}, so chi(1, pt) = 1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import RealityViolated, SampleRankDeficient
from .exact import IntLattice, RatMatrix, det_exact, rref, sublattice_index
from .lagrangian import (LiftedLagrangian, graph_of, lift_skyscraper, skyscraper_lattice,
                         symplectic_complete, ud_act)
from .metaplectic import TWO_PI, MetaElement, SpinElement, _round_int, principal_lift, spin_of
from .sampling import rng_for, rand_symmetric
from .siegel import SiegelPoint, sp_act


# ---------------------------------------------------------------- Gaussian rationals

class GaussRat:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _lift(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x, 0)
        return NotImplemented

    def __add__(self, o):
        o = self._lift(o)
        return NotImplemented if o is NotImplemented else GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, o):
        o = self._lift(o)
        return NotImplemented if o is NotImplemented else GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        return GaussRat((self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, o):
        return GaussRat._lift(o) / self

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        return isinstance(o, GaussRat) and self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"


def _is_zero(x) -> bool:
    return x == 0


def _pow_sign(k: int) -> int:
    return -1 if k % 2 else 1


# ---------------------------------------------------------------- classes

def _merge_sign(S: Sequence[int], T: Sequence[int]) -> int:
    inv = sum(1 for s in S for t in T if s > t)
    return _pow_sign(inv)


class CohClass:
    """Even element of the exterior algebra on 2n generators."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict | None = None):
        self.n = n
        clean = {}
        for S, v in (coeffs or {}).items():
            S = tuple(S)
            if len(S) % 2 or list(S) != sorted(set(S)) or (S and not 1 <= S[0] <= S[-1] <= 2 * n):
                raise ValueError(f"bad subset {S}")
            if not _is_zero(v):
                clean[S] = v
        self.coeffs = clean

    @classmethod
    def unit(cls, n: int) -> "CohClass":
        return cls(n, {(): Fraction(1)})

    @classmethod
    def point(cls, n: int) -> "CohClass":
        return cls(n, {tuple(range(1, 2 * n + 1)): Fraction(1)})

    def __getitem__(self, S) -> object:
        return self.coeffs.get(tuple(S), 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, CohClass) and self.n == other.n and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"CohClass({self.n}, {self.coeffs})"

    def __add__(self, o: "CohClass") -> "CohClass":
        out = dict(self.coeffs)
        for S, v in o.coeffs.items():
            out[S] = out.get(S, 0) + v
        return CohClass(self.n, out)

    def __neg__(self) -> "CohClass":
        return CohClass(self.n, {S: -v for S, v in self.coeffs.items()})

    def __sub__(self, o: "CohClass") -> "CohClass":
        return self + (-o)

    def scale(self, s) -> "CohClass":
        return CohClass(self.n, {S: s * v for S, v in self.coeffs.items()})

    def wedge(self, o: "CohClass") -> "CohClass":
        out: dict = {}
        for S, u in self.coeffs.items():
            for T, v in o.coeffs.items():
                if set(S) & set(T):
                    continue
                U = tuple(sorted(S + T))
                out[U] = out.get(U, 0) + _merge_sign(S, T) * u * v
        return CohClass(self.n, out)

    def dual(self) -> "CohClass":
        """x^v: multiply the degree-2k part by (-1)^k."""
        return CohClass(self.n, {S: _pow_sign(len(S) // 2) * v for S, v in self.coeffs.items()})

    def part(self, k: int) -> "CohClass":
        """Degree-2k component."""
        return CohClass(self.n, {S: v for S, v in self.coeffs.items() if len(S) == 2 * k})

    @property
    def rank(self):
        return self.coeffs.get((), 0)

    def integral(self):
        return self.coeffs.get(tuple(range(1, 2 * self.n + 1)), 0)

    def to_complex(self) -> "CohClass":
        return CohClass(self.n, {S: complex(v) for S, v in self.coeffs.items()})

    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction, GaussRat)) for v in self.coeffs.values())

    def to_json(self) -> dict:
        terms = []
        for S in sorted(self.coeffs, key=lambda s: (len(s), s)):
            v = self.coeffs[S]
            if isinstance(v, GaussRat):
                re, im = str(v.re), str(v.im)
            elif isinstance(v, (int, Fraction)):
                re, im = str(Fraction(v)), "0"
            else:
                re, im = repr(complex(v).real), repr(complex(v).imag)
            terms.append({"subset": list(S), "re": re, "im": im})
        return {"n": self.n, "terms": terms}

    @classmethod
    def from_json(cls, obj: dict) -> "CohClass":
        coeffs = {}
        for t in obj["terms"]:
            re, im = Fraction(t["re"]), Fraction(t.get("im", "0"))
            coeffs[tuple(t["subset"])] = re if im == 0 else GaussRat(re, im)
        return cls(int(obj["n"]), coeffs)


def even_subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for k in range(0, 2 * n + 1, 2):
        out.extend(combinations(range(1, 2 * n + 1), k))
    return out


def _entry(M, i, j):
    if isinstance(M, RatMatrix):
        return M[i, j]
    return M[i][j]


def ns_to_form(phi) -> CohClass:
    """sum_ij phi_ij dx_i ^ dy_j for a symmetric matrix (exact, Gaussian or complex entries)."""
    n = phi.nrows if isinstance(phi, RatMatrix) else len(phi)
    out: dict = {}
    for i in range(n):
        for j in range(n):
            v = _entry(phi, i, j)
            p, q = 2 * i + 1, 2 * j + 2
            key, sgn = ((p, q), 1) if p < q else ((q, p), -1)
            out[key] = out.get(key, 0) + sgn * v
    return CohClass(n, out)


def exp_form(F: CohClass) -> CohClass:
    out = CohClass.unit(F.n)
    term = CohClass.unit(F.n)
    for k in range(1, F.n + 1):
        term = term.wedge(F)
        term = CohClass(F.n, {S: v / k for S, v in term.coeffs.items()})
        out = out + term
    return out


def omega_entries(w: SiegelPoint):
    """Exact Gaussian entries when available, else complex floats."""
    if w.is_exact:
        return [[GaussRat(w.re[i, j], w.im[i, j]) for j in range(w.n)] for i in range(w.n)]
    return w.omega.tolist()


def ell(phi, scale=1) -> CohClass:
    """scale * exp(ns_to_form(phi)); phi is a RatMatrix, a SiegelPoint or a complex array."""
    if isinstance(phi, SiegelPoint):
        phi = omega_entries(phi)
    elif isinstance(phi, np.ndarray):
        phi = phi.tolist()
    E = exp_form(ns_to_form(phi))
    return E if scale == 1 else E.scale(scale)


def chi_pair(x: CohClass, y: CohClass):
    """Euler pairing: top coefficient of x^v ^ y."""
    if x.n != y.n:
        raise ValueError("classes on different dimensions")
    full = tuple(range(1, 2 * x.n + 1))
    total = 0
    for S, u in x.coeffs.items():
        T = tuple(i for i in full if i not in S)
        v = y.coeffs.get(T)
        if v is None:
            continue
        total = total + _pow_sign(len(S) // 2) * _merge_sign(S, T) * u * v
    return total


def graph_rank(phi: RatMatrix) -> int:
    """Index of the projection of the saturated graph lattice onto the first factor."""
    L = graph_of(phi)
    n = phi.nrows
    proj = IntLattice.from_matrix(L.X)
    full = IntLattice.from_columns(n, [[int(i == j) for i in range(n)] for j in range(n)])
    return sublattice_index(proj, full)


def ch_semihomog(phi: RatMatrix) -> CohClass:
    return ell(phi).scale(Fraction(graph_rank(phi)))


# ---------------------------------------------------------------- the span of ell(NS)

def span_dimension(n: int) -> int:
    return math.comb(2 * n, n) - (math.comb(2 * n, n - 2) if n >= 2 else 0)


@dataclass(frozen=True)
class NSSpan:
    """Basis (reduced echelon rows) of the span of ell(phi) over symmetric phi."""

    n: int
    subsets: tuple[tuple[int, ...], ...]
    rows: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    def vector(self, x: CohClass) -> list:
        return [x[S] for S in self.subsets]

    def coords(self, x: CohClass) -> list:
        v = self.vector(x)
        c = [v[p] for p in self.pivots]
        for k, S in enumerate(self.subsets):
            if sum((ci * r[k] for ci, r in zip(c, self.rows)), 0) != v[k]:
                raise ValueError("class is not in the span of ell(NS)")
        return c

    def from_coords(self, c: Sequence) -> CohClass:
        coeffs = {}
        for k, S in enumerate(self.subsets):
            s = sum((ci * r[k] for ci, r in zip(c, self.rows) if r[k]), 0)
            if not _is_zero(s):
                coeffs[S] = s
        return CohClass(self.n, coeffs)

    def basis(self) -> list[CohClass]:
        return [self.from_coords([int(i == j) for j in range(self.dim)]) for i in range(self.dim)]


@lru_cache(maxsize=None)
def ns_span(n: int) -> NSSpan:
    subsets = tuple(even_subsets(n))
    target = span_dimension(n)
    rng = rng_for(0, "ns-span", n)
    vecs = []
    rank = 0
    while rank < target:
        phi = rand_symmetric(rng, n, 3, 2)
        vecs.append([ell(phi)[S] for S in subsets])
        R, piv = rref(RatMatrix(vecs))
        if len(piv) > rank:
            rank = len(piv)
        else:
            vecs.pop()
    R, piv = rref(RatMatrix(vecs))
    return NSSpan(n, subsets, tuple(R.rows[: len(piv)]), tuple(piv))


# ---------------------------------------------------------------- spin action

@dataclass(frozen=True)
class RhoHat:
    """Exact matrix of rho-hat on coordinates of the span of ell(NS)."""

    spin: SpinElement
    matrix: RatMatrix

    def apply(self, x: CohClass) -> CohClass:
        sp = ns_span(self.spin.g.n)
        c = sp.coords(x)
        return sp.from_coords([sum((m * ci for m, ci in zip(row, c)), 0) for row in self.matrix.rows])


def _sample_phis(n: int):
    rng = rng_for(0, "rho-samples", n)
    while True:
        yield rand_symmetric(rng, n, 3, 3)


@lru_cache(maxsize=512)
def _rho_matrix(spin: SpinElement) -> RatMatrix:
    g = spin.g
    n = g.n
    sp = ns_span(n)
    src, tgt = [], []
    tried = 0
    for phi in _sample_phis(n):
        tried += 1
        if tried > 50 * sp.dim:
            raise SampleRankDeficient("could not find enough independent samples")
        den = g.a + g.b @ phi
        f = det_exact(den)
        if f == 0:
            continue  # action undefined at this sample
        c = sp.coords(ell(phi))
        trial = RatMatrix(src + [c])
        if trial.rank() <= len(src):
            continue
        gphi = (g.c + g.d @ phi) @ den.inv()
        src.append(c)
        tgt.append([spin.sign * f * x for x in sp.coords(ell(gphi))])
        if len(src) == sp.dim:
            break
    # R S = T with S, T having the sample coordinates as columns
    S = RatMatrix(src).T
    Tm = RatMatrix(tgt).T
    return (S.T.solve(Tm.T)).T


def rho_hat(s: SpinElement) -> RhoHat:
    return RhoHat(s, _rho_matrix(s))


# ---------------------------------------------------------------- classes of lifts

def transport_from_skyscraper(L) -> MetaElement:
    """A lift of an integral h with h L_0 = L."""
    return principal_lift(symplectic_complete(L).inv())


def class_of(Lt: LiftedLagrangian) -> CohClass:
    """Numerical class of the object attached to a lifted Lagrangian.

    Transport the skyscraper by an integral element onto the lattice, then
    compare deck components; each deck step negates the class.
    """
    n = Lt.n
    if Lt.L == skyscraper_lattice(n):
        k = _round_int(Lt.base_arg / TWO_PI, "skyscraper deck offset")
        return CohClass.point(n).scale(_pow_sign(k))
    m = transport_from_skyscraper(Lt.L)
    ref = ud_act(m, lift_skyscraper(n))
    k = _round_int((Lt.base_arg - ref.base_arg) / TWO_PI, "deck offset")
    return rho_hat(spin_of(m)).apply(CohClass.point(n)).scale(_pow_sign(k))


@dataclass(frozen=True)
class PhasePoint:
    omega: SiegelPoint
    z: complex = 0j

    def acted(self, m: MetaElement) -> "PhasePoint":
        """(g, f) . (w, z) = (g(w), z - f(w))."""
        return PhasePoint(sp_act(m.g, self.omega), self.z - m.f_at(self.omega))


def mirror_integral(Lt: LiftedLagrangian, w: SiegelPoint, tol: float = 1e-6) -> complex:
    """Oriented determinant of w-twisted projection restricted to Pi(L) = span [Y; X]."""
    X, Y = Lt.L.blocks_complex
    d = complex(np.linalg.det(Y - w.omega @ X))
    theta = Lt.arg_at(w)
    s = cmath.exp(0.5j * theta) * math.sqrt(abs(d) ** 2)
    r = d / s
    if abs(r.imag) > tol * abs(r):
        raise RealityViolated(f"d/s = {r} is not real")
    return d if r.real > 0 else -d


def charge(sigma: PhasePoint, Lt: LiftedLagrangian) -> complex:
    return -cmath.exp(1j * math.pi * sigma.z) * complex(chi_pair(ell(sigma.omega), class_of(Lt)))


# ---------------------------------------------------------------- reconstruction

def _solve_generic(A: list[list], b: list) -> list:
    """Gaussian elimination over any exact field (Fraction or GaussRat entries)."""
    m = len(A)
    M = [list(r) + [bi] for r, bi in zip(A, b)]
    k = len(A[0])
    row = 0
    piv = []
    for c in range(k):
        p = next((i for i in range(row, m) if not _is_zero(M[i][c])), None)
        if p is None:
            continue
        M[row], M[p] = M[p], M[row]
        pv = M[row][c]
        M[row] = [x / pv for x in M[row]]
        for i in range(m):
            if i != row and not _is_zero(M[i][c]):
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[row])]
        piv.append(c)
        row += 1
    if len(piv) < k:
        raise SampleRankDeficient("pairing system is rank deficient")
    return [M[i][k] for i in range(k)]


def class_from_pairings(n: int, pairing: Callable[[SiegelPoint], object],
                        omegas: Sequence[SiegelPoint]) -> CohClass:
    """The class x in span ell(NS) with chi(ell(w), x) = pairing(w) at the sample points."""
    sp = ns_span(n)
    basis = sp.basis()
    A, b = [], []
    for w in omegas:
        lw = ell(w)
        A.append([chi_pair(lw, e) for e in basis])
        b.append(pairing(w))
    c = _solve_generic(A, b)
    out = []
    for x in c:
        if isinstance(x, GaussRat):
            if x.im != 0:
                raise RealityViolated("reconstructed class has non-real coordinates")
            x = x.re
        out.append(x)
    return sp.from_coords(out)


def mirror_integral_exact(Lt: LiftedLagrangian, w: SiegelPoint) -> GaussRat:
    """Exact oriented mirror determinant at an exact rational point."""
    n = Lt.n
    om = omega_entries(w)
    X, Y = Lt.L.X, Lt.L.Y
    K = [[GaussRat(Y[i, j]) - sum((om[i][k] * X[k, j] for k in range(n)), GaussRat()) for j in range(n)]
         for i in range(n)]
    d = _det_generic(K)
    approx = mirror_integral(Lt, w)
    return d if (complex(d) * approx.conjugate()).real > 0 else -d


def _det_generic(M: list[list]):
    n = len(M)
    M = [list(r) for r in M]
    det = GaussRat(1)
    for c in range(n):
        p = next((i for i in range(c, n) if not _is_zero(M[i][c])), None)
        if p is None:
            return GaussRat(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det = det * M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return det


def recover_phase_point(n: int, charges: Sequence[complex]) -> tuple[np.ndarray, complex]:
    """Read (w, exp(pi i z)) back from the charges of the ell(NS) basis classes.

    The charge functional is x -> -exp(pi i z) chi(ell(w), x); the Euler pairing
    is nondegenerate on the span, so it pins down exp(pi i z) ell(w).
    """
    sp = ns_span(n)
    basis = sp.basis()
    G = np.array([[complex(chi_pair(u, v)) for v in basis] for u in basis])
    c = np.linalg.solve(G.T, -np.asarray(charges, dtype=complex))
    v = CohClass(n, {})
    for ci, u in zip(c, basis):
        v = v + u.to_complex().scale(ci)
    e = complex(v.rank)
    w = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            p, q = 2 * i + 1, 2 * j + 2
            w[i, j] = v[(p, q)] / e if p < q else -v[(q, p)] / e
    return w, e
