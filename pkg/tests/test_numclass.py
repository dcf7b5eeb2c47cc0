from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from liphase.exact import RatMatrix, det_exact
from liphase.lagrangian import lift_graph, lift_skyscraper, ud_act
from liphase.metaplectic import SpinElement, principal_lift, spin_of
from liphase.numclass import (CohClass, GaussRat, PhasePoint, ch_semihomog, charge, chi_pair, class_from_pairings,
                              class_of, ell, mirror_integral, mirror_integral_exact, ns_span, ns_to_form,
                              recover_phase_point, rho_hat, span_dimension)
from liphase.sampling import rand_siegel, rand_siegel_exact, rand_sp, rand_symmetric, rng_for
from liphase.selftest import rand_ns_class, random_transported_lift
from liphase.siegel import J, base_point, n_minus

seeds = st.integers(0, 10 ** 6)
dims = st.sampled_from([1, 2, 3])
H2 = ns_to_form(RatMatrix.identity(2))


def test_gaussian_rationals():
    a, b = GaussRat(Fraction(1, 2), 3), GaussRat(-2, Fraction(1, 3))
    for got, want in ((a + b, complex(a) + complex(b)), (a * b, complex(a) * complex(b)),
                      (a / b, complex(a) / complex(b)), (1 - a, 1 - complex(a))):
        assert abs(complex(got) - want) < 1e-12
    assert a * (1 / a) == GaussRat(1)


def test_pairing_spot_values():
    assert chi_pair(H2, H2) == -2
    assert chi_pair(CohClass.unit(2), H2.wedge(H2)) == 2
    assert chi_pair(CohClass.unit(3), CohClass.point(3)) == 1
    assert chi_pair(CohClass.point(2), CohClass.unit(2)) == 1


@given(seeds, dims)
def test_exp_is_multiplicative(seed, n):
    rng = rng_for(seed, "exp")
    p, q = rand_symmetric(rng, n, 3, 2), rand_symmetric(rng, n, 3, 2)
    assert ell(p).wedge(ell(q)) == ell(p + q)


@given(seeds, dims)
def test_pairing_of_line_bundles_is_determinant(seed, n):
    rng = rng_for(seed, "det")
    p, q = rand_symmetric(rng, n, 3, 2), rand_symmetric(rng, n, 3, 2)
    assert chi_pair(ell(p), ell(q)) == det_exact(q - p)


@pytest.mark.parametrize("n,dim", [(1, 2), (2, 5), (3, 14)])
def test_span_dimension(n, dim):
    assert span_dimension(n) == dim == ns_span(n).dim


def test_class_json_round_trip():
    x = ell(RatMatrix([[Fraction(1, 2), 1], [1, -3]])).scale(3) + CohClass(2, {(1, 2): GaussRat(1, 2)})
    assert CohClass.from_json(x.to_json()) == x


def test_fourier():
    F = rho_hat(SpinElement(J(1), 1))
    assert F.apply(CohClass.unit(1)) == -CohClass.point(1)
    assert F.apply(CohClass.point(1)) == CohClass.unit(1)


@given(seeds, st.sampled_from([1, 2]))
def test_lower_parabolic_is_multiplication(seed, n):
    rng = rng_for(seed, "lower")
    phi = rand_symmetric(rng, n, 3, 2)
    x = rand_ns_class(rng, n)
    assert rho_hat(SpinElement(n_minus(phi), 1)).apply(x) == ell(phi).wedge(x)


@given(seeds, st.sampled_from([1, 2]))
def test_rho_is_a_representation_preserving_chi(seed, n):
    rng = rng_for(seed, "rho")
    s1 = SpinElement(rand_sp(rng, n, 3, True), rng.choice([1, -1]))
    s2 = SpinElement(rand_sp(rng, n, 3, True), rng.choice([1, -1]))
    assert rho_hat(s1 @ s2).matrix == rho_hat(s1).matrix @ rho_hat(s2).matrix
    x, y = rand_ns_class(rng, n), rand_ns_class(rng, n)
    assert chi_pair(rho_hat(s1).apply(x), rho_hat(s1).apply(y)) == chi_pair(x, y)


@given(seeds, dims)
def test_classes_of_graphs_and_points(seed, n):
    rng = rng_for(seed, "cls")
    phi = rand_symmetric(rng, n, 2, 2)
    assert class_of(lift_graph(phi)) == ch_semihomog(phi)
    assert class_of(lift_graph(phi).shifted(3)) == -ch_semihomog(phi)
    assert class_of(lift_skyscraper(n).shifted(-2)) == CohClass.point(n)


@given(seeds, st.sampled_from([1, 2]))
def test_class_is_equivariant(seed, n):
    rng = rng_for(seed, "equi")
    Lt = random_transported_lift(rng, n, 2)
    m = principal_lift(rand_sp(rng, n, 3, True)).shifted(rng.randint(-2, 2))
    assert class_of(ud_act(m, Lt)) == rho_hat(spin_of(m)).apply(class_of(Lt))


@given(seeds, dims)
def test_mirror_identity(seed, n):
    rng = rng_for(seed, "mirror")
    Lt = random_transported_lift(rng, n)
    cl = class_of(Lt)
    w = rand_siegel(rng, n)
    ch = complex(chi_pair(ell(w), cl))
    assert abs(mirror_integral(Lt, w) - ch) <= 1e-9 * abs(ch)
    we = rand_siegel_exact(rng, n)
    assert mirror_integral_exact(Lt, we) == chi_pair(ell(we), cl)


def test_class_determined_by_mirror_integrals():
    for n in (1, 2, 3):
        rng = rng_for(4, "det", n)
        Lt = random_transported_lift(rng, n)
        omegas = [rand_siegel_exact(rng, n) for _ in range(ns_span(n).dim + 1)]
        assert class_from_pairings(n, lambda w: mirror_integral_exact(Lt, w), omegas) == class_of(Lt)


def test_charge_spot_values():
    s = PhasePoint(base_point(2))
    assert charge(s, lift_graph(-RatMatrix.identity(2))) == pytest.approx(-2j)
    assert charge(s, lift_graph(RatMatrix.zeros(2))) == pytest.approx(1)


@given(seeds, dims)
def test_phase_point_recovered_from_charges(seed, n):
    rng = rng_for(seed, "fiber")
    w = rand_siegel(rng, n)
    z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    charges = [-cmath.exp(1j * math.pi * z) * complex(chi_pair(ell(w), b)) for b in ns_span(n).basis()]
    w2, e = recover_phase_point(n, charges)
    assert np.allclose(w2, w.omega, atol=1e-9)
    assert abs(e - cmath.exp(1j * math.pi * z)) < 1e-9
