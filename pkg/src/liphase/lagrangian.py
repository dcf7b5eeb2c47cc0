"""Lagrangian lattices, their lifts to the integer covering, and the index pairing.

A Lagrangian lattice is a primitive rank-n sublattice of Z^{2n} spanned by the
columns of [X; Y] with X^T Y symmetric.  Its determinant function is
delta(L)(w) = det(w X - Y)^2 on the canonical basis.  A lift records a branch
of Arg delta(L) at the base point i I; adding 2 pi is the deck shift [1].
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from .errors import BranchMismatch, NotIsotropic, NotTransversal, RankDeficient, UsageError
from .exact import IntLattice, RatMatrix, det_exact, hnf, parse_matrix, saturate
from .metaplectic import BRANCH_TOL, TWO_PI, MetaElement, _round_int, principal_lift
from .polypath import wrap
from .siegel import SiegelPoint, SpElement, sp_act, square_arg_along, square_arg_from_infinity, symplectic_form


@dataclass(frozen=True)
class LagrangianLattice:
    n: int
    basis: tuple[tuple[int, ...], ...]  # 2n rows, n columns, canonical HNF

    @cached_property
    def matrix(self) -> RatMatrix:
        return RatMatrix(self.basis)

    @property
    def X(self) -> RatMatrix:
        return self.matrix.sub(0, self.n, 0, self.n)

    @property
    def Y(self) -> RatMatrix:
        return self.matrix.sub(self.n, 2 * self.n, 0, self.n)

    @cached_property
    def reduced(self) -> RatMatrix:
        """LLL-reduced basis (as columns); the canonical basis can have huge entries."""
        rows = [[ZZ(int(self.basis[i][j])) for i in range(2 * self.n)] for j in range(self.n)]
        red = DomainMatrix(rows, (self.n, 2 * self.n), ZZ).lll().to_list()
        return RatMatrix([[int(red[j][i]) for j in range(self.n)] for i in range(2 * self.n)])

    @cached_property
    def blocks_complex(self) -> tuple[np.ndarray, np.ndarray]:
        """X and Y of the reduced basis; delta only depends on the lattice."""
        R = self.reduced
        return (R.sub(0, self.n, 0, self.n).to_numpy(complex),
                R.sub(self.n, 2 * self.n, 0, self.n).to_numpy(complex))

    def delta(self, w) -> complex:
        X, Y = self.blocks_complex
        om = w.omega if isinstance(w, SiegelPoint) else np.asarray(w)
        return complex(np.linalg.det(om @ X - Y)) ** 2

    def __repr__(self) -> str:
        return f"LagrangianLattice(x={self.X};y={self.Y})"


def _from_rational_columns(n: int, M: RatMatrix) -> LagrangianLattice:
    cols = []
    for j in range(M.ncols):
        col = M.column(j)
        den = 1
        for x in col:
            den = den * x.denominator // math.gcd(den, x.denominator)
        cols.append([int(x * den) for x in col])
    L = saturate(IntLattice.from_columns(2 * n, cols))
    if L.rank != n:
        raise RankDeficient(f"span has rank {L.rank}, expected {n}")
    return LagrangianLattice(n, L.basis)


def make_lagrangian(x: RatMatrix, y: RatMatrix) -> LagrangianLattice:
    """Primitive lattice spanned by the columns of [x; y]."""
    n = x.nrows
    if y.nrows != n or x.ncols != y.ncols:
        raise RankDeficient("x and y must have matching shapes with n rows")
    M = RatMatrix.block([[x], [y]])
    if M.rank() != n:
        raise RankDeficient(f"[x; y] has rank {M.rank()}, expected {n}")
    if not (x.T @ y).is_symmetric():
        raise NotIsotropic("x^T y is not symmetric")
    return _from_rational_columns(n, M)


def skyscraper_lattice(n: int) -> LagrangianLattice:
    return make_lagrangian(RatMatrix.zeros(n), RatMatrix.identity(n))


def graph_of(phi: RatMatrix) -> LagrangianLattice:
    return make_lagrangian(RatMatrix.identity(phi.nrows), phi)


def as_graph(L: LagrangianLattice) -> RatMatrix | None:
    X = L.X
    if det_exact(X) == 0:
        return None
    return L.Y @ X.inv()


def is_transversal(L1: LagrangianLattice, L2: LagrangianLattice) -> bool:
    return RatMatrix(tuple(r1 + r2 for r1, r2 in zip(L1.basis, L2.basis))).rank() == 2 * L1.n


def act_lattice(g: SpElement, L: LagrangianLattice) -> LagrangianLattice:
    return _from_rational_columns(L.n, g.matrix @ L.matrix)


_LAG = re.compile(r"^\s*x\s*=(.*);\s*y\s*=(.*)$", re.S)


def parse_lagrangian(text: str) -> LagrangianLattice:
    """Parse ``"x=<matrix>;y=<matrix>"``."""
    m = _LAG.match(text)
    if not m:
        raise UsageError(f"bad Lagrangian text {text!r}")
    x, y = parse_matrix(m.group(1)), parse_matrix(m.group(2))
    return make_lagrangian(x, y)


# ---------------------------------------------------------------- lifts

@dataclass(frozen=True)
class LiftedLagrangian:
    L: LagrangianLattice
    base_arg: float

    def __post_init__(self):
        v = self.L.delta(1j * np.eye(self.L.n))
        off = wrap(self.base_arg - math.atan2(v.imag, v.real))
        if abs(off) > BRANCH_TOL:
            raise BranchMismatch(f"base_arg {self.base_arg} misses Arg delta(L)(iI) by {off:.3g}")
        object.__setattr__(self, "base_arg", float(self.base_arg - off))

    @property
    def n(self) -> int:
        return self.L.n

    def arg_at(self, w) -> float:
        """Continued branch of Arg delta(L) at w."""
        X, Y = self.L.blocks_complex
        om = w.omega if isinstance(w, SiegelPoint) else np.asarray(w, dtype=complex)
        return square_arg_along(-Y.T, X.T, 1j * np.eye(self.n), om, self.base_arg)

    def shifted(self, k: int) -> "LiftedLagrangian":
        """Deck shift: the lift of F[k]."""
        return LiftedLagrangian(self.L, self.base_arg + TWO_PI * k)

    def same(self, other: "LiftedLagrangian", tol: float = 1e-6) -> bool:
        return self.L == other.L and abs(self.base_arg - other.base_arg) < tol


def lift_skyscraper(n: int) -> LiftedLagrangian:
    return LiftedLagrangian(skyscraper_lattice(n), 0.0)


def lift_graph(phi: RatMatrix) -> LiftedLagrangian:
    """Lift of the graph of phi with Arg deg(w - phi) -> -n pi as w = iT I, T -> oo."""
    n = phi.nrows
    L = graph_of(phi)
    theta = square_arg_from_infinity(-phi.to_numpy(complex), np.eye(n), -n * math.pi, 1j * np.eye(n))
    return LiftedLagrangian(L, theta)


def ud_act(m: MetaElement, Lt: LiftedLagrangian) -> LiftedLagrangian:
    """(g, f_g) . (L, f_L) = (gL, f_L(g^{-1} w) + f_g(g^{-1} w)), in branch terms."""
    n = Lt.n
    ginv = m.g.inv()
    w1 = sp_act(ginv, SiegelPoint(1j * np.eye(n)))
    theta = Lt.arg_at(w1) - m.arg_at(w1)
    # the constructor asserts delta(gL)(iI) = delta(L)(w1) / Delta(g)(w1) up to a positive factor
    return LiftedLagrangian(act_lattice(m.g, Lt.L), theta)


# ---------------------------------------------------------------- completion and index

def symplectic_complete(L: LagrangianLattice) -> SpElement:
    """Integral symplectic g with g L = L_0 = 0 + Z^n.

    Builds M = [C | B] with B the canonical basis of L and C integral, isotropic
    and dual to B (C^T J B = I), reduced against B; then g = M^{-1}.
    """
    n = L.n
    Jm = symplectic_form(n)
    B = L.reduced
    P = Jm @ B  # primitive 2n x n
    H, U = hnf(P.T)  # P^T U = H = [Hl | 0]
    Hl = RatMatrix(tuple(r[:n] for r in H))
    if abs(det_exact(Hl)) != 1:
        raise RankDeficient("lattice is not primitive")
    top = RatMatrix(U).T.sub(0, n, 0, 2 * n)
    C0 = (Hl.T.inv() @ top).T  # C0^T P = I
    A = C0.T @ Jm @ C0
    S = RatMatrix([[-A[i, j] if i > j else 0 for j in range(n)] for i in range(n)])
    C = C0 + B @ S
    # size reduction: C = B P + (JB)(B^T B)^{-1} with P symmetric; subtract B round(P)
    P = (B.T @ B).inv() @ B.T @ C
    C = C - B @ RatMatrix([[round(P[i, j]) for j in range(n)] for i in range(n)])
    M = RatMatrix(tuple(rc + rb for rc, rb in zip(C.rows, B.rows)))
    g = SpElement.from_matrix(M.inv())
    assert g.is_integral
    assert act_lattice(g, L) == skyscraper_lattice(n)
    return g


def deck_offset(Lt: LiftedLagrangian) -> int | None:
    """k with Lt = (reference lift)[k], for skyscraper or graph lattices; else None."""
    n = Lt.n
    if Lt.L == skyscraper_lattice(n):
        return _round_int(Lt.base_arg / TWO_PI, "skyscraper deck offset")
    phi = as_graph(Lt.L)
    if phi is None:
        return None
    return _round_int((Lt.base_arg - lift_graph(phi).base_arg) / TWO_PI, "graph deck offset")


def index_pair(Lt1: LiftedLagrangian, Lt2: LiftedLagrangian) -> int:
    """Integer i(F1, F2) by transporting L2 to the skyscraper lattice."""
    if not is_transversal(Lt1.L, Lt2.L):
        raise NotTransversal("index pairing needs transversal lattices")
    m = principal_lift(symplectic_complete(Lt2.L))
    T1, T2 = ud_act(m, Lt1), ud_act(m, Lt2)
    return deck_offset(T1) - deck_offset(T2)


def reference_lift(L: LagrangianLattice) -> LiftedLagrangian:
    """Graph or skyscraper lift when L is one; otherwise the skyscraper lift moved by a completion."""
    if L == skyscraper_lattice(L.n):
        return lift_skyscraper(L.n)
    phi = as_graph(L)
    if phi is not None:
        return lift_graph(phi)
    return ud_act(principal_lift(symplectic_complete(L).inv()), lift_skyscraper(L.n))
