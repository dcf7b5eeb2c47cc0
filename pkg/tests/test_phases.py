from __future__ import annotations

import json
import math
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, strategies as st

from liphase.errors import NotTransversal, UnsupportedLift
from liphase.exact import RatMatrix
from liphase.lagrangian import is_transversal, lift_graph, lift_skyscraper
from liphase.metaplectic import canonical_lift, principal_lift
from liphase.numclass import PhasePoint
from liphase.phases import (elliptic_standard_phase, equivariance_check, graph_phase_closed_form, inequality_check,
                            phase, phase_compat, phase_report, surface_bridgeland_phase)
from liphase.sampling import rand_siegel, rand_sp, rand_symmetric, rand_u0, rng_for
from liphase.selftest import random_transported_lift
from liphase.siegel import base_point

seeds = st.integers(0, 10 ** 6)
dims = st.sampled_from([1, 2, 3])


def _sigma(rng, n):
    return PhasePoint(rand_siegel(rng, n), complex(rng.uniform(-2, 2), rng.uniform(-1, 1)))


def test_spot_values():
    I2 = RatMatrix.identity(2)
    s = PhasePoint(base_point(2))
    assert phase(s, lift_graph(-I2)) == -1.5
    assert phase(s, lift_graph(RatMatrix.zeros(2))) == -1.0
    assert phase(PhasePoint(base_point(1)), lift_graph(RatMatrix([[0]]))) == -0.5
    assert surface_bridgeland_phase(base_point(2), lift_graph(-I2)) == pytest.approx(-0.5)
    assert surface_bridgeland_phase(base_point(2), lift_graph(RatMatrix.zeros(2))) == 0.0


def test_skyscraper_phase_is_real_part_of_z():
    for n in (1, 2, 3):
        s = PhasePoint(rand_siegel(rng_for(n), n), 0.3 - 0.2j)
        assert phase(s, lift_skyscraper(n)) == pytest.approx(0.3)
        assert phase(s, lift_skyscraper(n).shifted(-2)) == pytest.approx(-1.7)


@given(seeds, dims)
def test_closed_form_graph_phase(seed, n):
    rng = rng_for(seed, "closed")
    phi = rand_symmetric(rng, n, 3, 3)
    s = _sigma(rng, n)
    assert abs(phase(s, lift_graph(phi)) - graph_phase_closed_form(s, phi)) < 1e-6


@given(seeds, dims)
def test_compatibility(seed, n):
    rng = rng_for(seed, "compat")
    Lt = random_transported_lift(rng, n, 2)
    assert phase_compat(_sigma(rng, n), Lt) < 1e-6


@given(seeds, dims)
def test_equivariance(seed, n):
    rng = rng_for(seed, "equi")
    Lt = random_transported_lift(rng, n, 2)
    s = _sigma(rng, n)
    m = principal_lift(rand_sp(rng, n, 3, True)).shifted(rng.randint(-2, 2))
    assert equivariance_check(m, s, Lt) < 1e-6
    assert equivariance_check(canonical_lift(rand_u0(rng, n, 2)), s, Lt) < 1e-6


@given(seeds, dims)
def test_inequality(seed, n):
    rng = rng_for(seed, "ineq")
    L1, L2 = random_transported_lift(rng, n, 2), random_transported_lift(rng, n, 2)
    assume(is_transversal(L1.L, L2.L))
    s = _sigma(rng, n)
    assert inequality_check(s, L1, L2)
    assert inequality_check(s, L2, L1)


def test_inequality_needs_transversality():
    with pytest.raises(NotTransversal):
        inequality_check(PhasePoint(base_point(1)), lift_skyscraper(1), lift_skyscraper(1))


@given(seeds)
def test_surface_comparison(seed):
    rng = rng_for(seed, "surface")
    w = rand_siegel(rng, 2)
    Lt = lift_graph(rand_symmetric(rng, 2, 3, 3)).shifted(rng.randint(-2, 2))
    assert abs(surface_bridgeland_phase(w, Lt) - (phase(PhasePoint(w), Lt) + 1)) < 1e-6
    sky = lift_skyscraper(2).shifted(rng.randint(-2, 2))
    assert abs(surface_bridgeland_phase(w, sky) - (phase(PhasePoint(w), sky) + 1)) < 1e-12


def test_surface_needs_n_2():
    with pytest.raises(UnsupportedLift):
        surface_bridgeland_phase(base_point(1), lift_skyscraper(1))


def test_elliptic_standard_stability():
    s = PhasePoint(base_point(1))
    for r in range(-10, 11):
        for d in range(-10, 11):
            if r and gcd(r, d) == 1:
                ph = phase(s, lift_graph(RatMatrix([[Fraction(d, r)]]))) + 1
                assert abs(ph - elliptic_standard_phase(r, d)) < 1e-9
    assert phase(s, lift_skyscraper(1)) + 1 == elliptic_standard_phase(0, 1)


def test_report_json():
    rep = phase_report(PhasePoint(base_point(2), 0.25), lift_graph(-RatMatrix.identity(2)))
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["phase"] == pytest.approx(-1.25)
    assert obj["deck"] == 0
    assert obj["residuals"]["compat"] < 1e-9
    assert math.hypot(obj["charge_re"], obj["charge_im"]) == pytest.approx(2)
