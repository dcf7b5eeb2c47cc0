from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form
from hypothesis import assume, given, strategies as st

from conftest import rat_matrices, symmetric_matrices
from liphase.errors import NotContained, NotSymmetric, UsageError
from liphase.exact import (IntLattice, RatMatrix, det_exact, format_matrix, hnf, integer_kernel, nullspace,
                           parse_matrix, rref, saturate, signature_sym, sublattice_index)


def leibniz_det(M: RatMatrix) -> Fraction:
    n = M.nrows
    total = Fraction(0)
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        term = Fraction(-1) ** inv
        for i in range(n):
            term *= M[i, p[i]]
        total += term
    return total


def to_sympy(M: RatMatrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in M.rows])


@given(rat_matrices())
def test_det_matches_leibniz(M):
    assert det_exact(M) == leibniz_det(M)


def test_det_large_entries():
    M = RatMatrix([[10 ** 30 + 1, 3, Fraction(1, 7)], [2, 10 ** 29, 5], [Fraction(-9, 11), 4, 10 ** 31]])
    assert det_exact(M) == leibniz_det(M)


@given(rat_matrices(m=3))
def test_rank_matches_sympy(M):
    assert M.rank() == to_sympy(M).rank()


@given(rat_matrices())
def test_inverse(M):
    assume(det_exact(M) != 0)
    assert M @ M.inv() == RatMatrix.identity(M.nrows)


@given(rat_matrices(n=3, m=4))
def test_nullspace_and_rref(M):
    for v in nullspace(M):
        assert all(x == 0 for x in (M @ RatMatrix([[c] for c in v])).column(0))
    R, piv = rref(M)
    assert len(piv) == M.rank() == 4 - len(nullspace(M))


@given(rat_matrices(n=3, m=4, elems=st.integers(-5, 5)))
def test_hnf_shape(M):
    H, U = hnf(M)
    H, U = RatMatrix(H), RatMatrix(U)
    assert M @ U == H
    assert abs(det_exact(U)) == 1
    last = -1
    for j in range(H.ncols):
        col = H.column(j)
        nz = [i for i, x in enumerate(col) if x != 0]
        if not nz:
            assert all(x == 0 for c in range(j, H.ncols) for x in H.column(c))
            break
        i = nz[0]
        assert i > last and col[i] > 0
        assert all(0 <= H[i, c] < col[i] for c in range(j))
        last = i


@given(rat_matrices(n=2, m=4, elems=st.integers(-6, 6)))
def test_integer_kernel(M):
    K = integer_kernel(M.to_int_rows())
    assert len(K) == 4 - M.rank()
    for v in K:
        assert all(sum(r[j] * v[j] for j in range(4)) == 0 for r in M.to_int_rows())


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
def test_sublattice_index_is_smith_product(cols):
    sub = IntLattice.from_columns(3, cols)
    assume(sub.rank == 3)
    full = IntLattice.from_columns(3, [[int(i == j) for i in range(3)] for j in range(3)])
    snf = smith_normal_form(sympy.Matrix(cols).T, domain=sympy.ZZ)
    assert sublattice_index(sub, full) == abs(sympy.prod(snf[i, i] for i in range(3)))


def test_saturate():
    L = IntLattice.from_columns(3, [[2, 4, 0], [0, 0, 3]])
    S = saturate(L)
    assert S.contains([1, 2, 0]) and S.contains([0, 0, 1])
    assert not L.contains([1, 2, 0])
    assert sublattice_index(L, S) == 6
    with pytest.raises(NotContained):
        sublattice_index(L, IntLattice.from_columns(3, [[1, 0, 0], [0, 1, 0]]))


@given(symmetric_matrices())
def test_signature_matches_charpoly(S):
    lam = sympy.Symbol("lam")
    p = sympy.Poly(to_sympy(S).charpoly(lam).as_expr(), lam)
    neg_count = sympy.Poly(p.as_expr().subs(lam, -lam), lam).count_roots(0, None) - p.count_roots(0, 0)
    pos_count = p.count_roots(0, None) - p.count_roots(0, 0)
    zero = S.nrows - S.rank()
    assert signature_sym(S) == (pos_count, neg_count, zero)


def test_signature_rejects_nonsymmetric():
    with pytest.raises(NotSymmetric):
        signature_sym(RatMatrix([[1, 2], [3, 4]]))


def test_parse_and_format():
    M = parse_matrix("1,-2/4;3/1, 0")
    assert M == RatMatrix([[1, Fraction(-1, 2)], [3, 0]])
    assert parse_matrix(format_matrix(M)) == M
    for bad in ("", "1,2;3", "1.5", "1/0", "a"):
        with pytest.raises(UsageError):
            parse_matrix(bad)
