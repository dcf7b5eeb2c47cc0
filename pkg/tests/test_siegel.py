from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liphase.errors import NotSymmetric, NotSymplectic, UsageError
from liphase.exact import RatMatrix
from liphase.sampling import rand_siegel, rand_siegel_exact, rand_sp, rng_for
from liphase.siegel import (J, SiegelPoint, SpElement, base_point, delta_eval, format_siegel, identity, n_minus,
                            n_plus, parse_siegel, sp_act, symplectic_form, torus)

seeds = st.integers(0, 10 ** 6)


@given(seeds, st.sampled_from([1, 2, 3]), st.booleans())
def test_random_elements_are_symplectic(seed, n, integral):
    g = rand_sp(rng_for(seed, "sp"), n, 4, integral)
    Jm = symplectic_form(n)
    assert g.matrix.T @ Jm @ g.matrix == Jm
    assert g @ g.inv() == identity(n)


@given(seeds, st.sampled_from([1, 2, 3]))
def test_action_is_a_group_action(seed, n):
    rng = rng_for(seed, "act")
    g1, g2 = rand_sp(rng, n, 3, False), rand_sp(rng, n, 3, False)
    w = rand_siegel(rng, n)
    lhs = sp_act(g1, sp_act(g2, w)).omega
    rhs = sp_act(g1 @ g2, w).omega
    assert np.allclose(lhs, rhs, atol=1e-8 * max(1.0, np.abs(rhs).max()))
    assert np.all(np.linalg.eigvalsh(sp_act(g1, w).omega.imag) > 0)


@given(seeds, st.sampled_from([1, 2, 3]))
def test_delta_cocycle(seed, n):
    # Delta(gh)(w) = Delta(g)(h w) Delta(h)(w)
    rng = rng_for(seed, "delta")
    g, h = rand_sp(rng, n, 3, False), rand_sp(rng, n, 3, False)
    w = rand_siegel(rng, n)
    lhs = delta_eval(g @ h, w)
    rhs = delta_eval(g, sp_act(h, w)) * delta_eval(h, w)
    assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_generators():
    phi = RatMatrix([[1, 2], [2, -1]])
    w = base_point(2)
    assert np.allclose(sp_act(n_minus(phi), w).omega, phi.to_numpy() + 1j * np.eye(2))
    assert np.allclose(sp_act(n_plus(phi), w).omega, 1j * np.linalg.inv(np.eye(2) + 1j * phi.to_numpy()))
    assert np.allclose(sp_act(J(1), SiegelPoint(np.array([[2j]]))).omega, [[-1 / 2j]])
    assert np.allclose(sp_act(torus(RatMatrix([[2]])), SiegelPoint(np.array([[1j]]))).omega, [[4j]])
    assert n_minus(phi).is_lower and n_plus(phi).is_upper and J(2).in_u0
    assert J(1) @ J(1) == torus(RatMatrix([[-1]]))
    with pytest.raises(NotSymmetric):
        n_plus(RatMatrix([[0, 1], [2, 0]]))
    with pytest.raises(NotSymplectic):
        SpElement.from_matrix(RatMatrix([[1, 1], [0, 2]]))


def test_siegel_point_validation():
    with pytest.raises(NotSymmetric):
        SiegelPoint(np.array([[1 - 1j]]))
    with pytest.raises(NotSymmetric):
        SiegelPoint(np.array([[1j, 1], [0, 1j]]))


def test_siegel_text_round_trip():
    w = rand_siegel_exact(rng_for(3), 2)
    assert parse_siegel(format_siegel(w)).omega.tolist() == w.omega.tolist()
    w = parse_siegel("re=1/2,0;0,0;im=2,1;1,1")
    assert w.is_exact and w.omega[0, 1] == 1j
    with pytest.raises(UsageError):
        parse_siegel("re=0;im=-1")
    with pytest.raises(UsageError):
        parse_siegel("im=1")
