from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from liphase.errors import NotIsotropic, NotTransversal, RankDeficient, UsageError
from liphase.exact import RatMatrix, det_exact
from liphase.lagrangian import (act_lattice, as_graph, deck_offset, graph_of, index_pair, is_transversal,
                                lift_graph, lift_skyscraper, make_lagrangian, parse_lagrangian, reference_lift,
                                skyscraper_lattice, symplectic_complete, ud_act)
from liphase.metaplectic import canonical_lift, central, lambda_graph, principal_lift
from liphase.polypath import line_index
from liphase.sampling import rand_invertible, rand_sp, rand_symmetric, rand_u0, rng_for
from liphase.selftest import random_transported_lift
from liphase.siegel import J, n_plus

seeds = st.integers(0, 10 ** 6)
dims = st.sampled_from([1, 2, 3])


def test_lattices_are_saturated():
    L = make_lagrangian(RatMatrix([[2]]), RatMatrix([[0]]))
    assert L == graph_of(RatMatrix([[0]]))
    L = make_lagrangian(RatMatrix([[2, 0], [0, 1]]), RatMatrix([[1, 0], [0, 0]]))
    assert as_graph(L) == RatMatrix([[Fraction(1, 2), 0], [0, 0]])
    with pytest.raises(NotIsotropic):
        make_lagrangian(RatMatrix([[1, 0], [0, 1]]), RatMatrix([[0, 1], [0, 0]]))
    with pytest.raises(RankDeficient):
        make_lagrangian(RatMatrix([[1, 1], [1, 1]]), RatMatrix([[0, 0], [0, 0]]))


def test_parse_lagrangian():
    L = parse_lagrangian("x=1,0;0,1;y=2,1;1,0")
    assert as_graph(L) == RatMatrix([[2, 1], [1, 0]])
    with pytest.raises(UsageError):
        parse_lagrangian("x=1")


def test_lift_spot_values():
    assert lift_graph(RatMatrix([[0]])).base_arg == pytest.approx(-3.141592653589793)
    assert lift_graph(RatMatrix.zeros(2)).base_arg == pytest.approx(-2 * 3.141592653589793)
    # g+ with phi = 1 moves the skyscraper lift onto the lift of the graph of 1
    moved = ud_act(canonical_lift(n_plus(RatMatrix([[1]]))), lift_skyscraper(1))
    assert moved.same(lift_graph(RatMatrix([[1]])))


@given(seeds, dims)
def test_graph_transport_formula(seed, n):
    rng = rng_for(seed, "graph")
    g = rand_u0(rng, n)
    phi = rand_symmetric(rng, n, 2, 2)
    den = g.a + g.b @ phi
    assume(det_exact(den) != 0)
    target = (g.c + g.d @ phi) @ den.inv()
    got = ud_act(canonical_lift(g), lift_graph(phi))
    assert got.same(lift_graph(target).shifted(lambda_graph(g, phi)))


@given(seeds, dims)
def test_action_compatible_with_products(seed, n):
    rng = rng_for(seed, "compat")
    m1 = principal_lift(rand_sp(rng, n, 3, True)).shifted(rng.randint(-2, 2))
    m2 = principal_lift(rand_sp(rng, n, 3, False))
    Lt = random_transported_lift(rng, n, 2)
    assert ud_act(m1 @ m2, Lt).same(ud_act(m1, ud_act(m2, Lt)), 1e-5)
    assert ud_act(central(n, 2), Lt).same(Lt.shifted(2))


@given(seeds, dims)
def test_graph_index_pairing(seed, n):
    rng = rng_for(seed, "pair")
    p1, p2 = rand_symmetric(rng, n, 3, 2), rand_symmetric(rng, n, 3, 2)
    assume(det_exact(p2 - p1) != 0)
    l1, l2 = lift_graph(p1), lift_graph(p2)
    assert index_pair(l1, l2) == line_index(p2 - p1)
    assert index_pair(l1, l2) + index_pair(l2, l1) == n
    assert index_pair(l1.shifted(2), l2.shifted(-1)) == index_pair(l1, l2) + 3
    sky = lift_skyscraper(n)
    assert index_pair(l1, sky) == 0 and index_pair(sky, l1) == n


@given(seeds, dims)
def test_index_pairing_invariant(seed, n):
    rng = rng_for(seed, "inv")
    L1, L2 = random_transported_lift(rng, n, 2), random_transported_lift(rng, n, 2)
    assume(is_transversal(L1.L, L2.L))
    m = principal_lift(rand_sp(rng, n, 2, True)).shifted(rng.randint(-1, 1))
    assert index_pair(ud_act(m, L1), ud_act(m, L2)) == index_pair(L1, L2)


def test_nontransversal_pairing():
    with pytest.raises(NotTransversal):
        index_pair(lift_skyscraper(2), lift_skyscraper(2))


def test_completion_spot_value():
    assert symplectic_complete(graph_of(RatMatrix([[0]]))) == J(1).inv()


@given(seeds, dims)
def test_completion(seed, n):
    rng = rng_for(seed, "complete")
    if seed % 2:
        L = act_lattice(rand_sp(rng, n, 4, True), skyscraper_lattice(n))
    else:
        x = rand_invertible(rng, n, 2, 2)
        L = make_lagrangian(x, rand_symmetric(rng, n, 3, 3) @ x)
    g = symplectic_complete(L)
    assert g.is_integral
    assert act_lattice(g, L) == skyscraper_lattice(n)
    assert max(abs(v) for r in g.matrix.rows for v in r) <= 10 ** 4


@given(seeds, dims)
def test_deck_offsets(seed, n):
    rng = rng_for(seed, "deck")
    k = rng.randint(-3, 3)
    phi = rand_symmetric(rng, n, 2, 2)
    assert deck_offset(lift_graph(phi).shifted(k)) == k
    assert deck_offset(lift_skyscraper(n).shifted(k)) == k
    L = act_lattice(rand_sp(rng, n, 3, True), skyscraper_lattice(n))
    Lt = reference_lift(L)
    assert Lt.L == L
    if as_graph(L) is None and L != skyscraper_lattice(n):
        assert deck_offset(Lt) is None
