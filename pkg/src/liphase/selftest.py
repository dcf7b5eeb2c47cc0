"""Seeded property suites, one per acceptance criterion.

Each suite returns a SuiteResult; a failure message carries the command line
that replays the suite.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable

import numpy as np

from .errors import LiphaseError, RealityViolated
from .exact import RatMatrix, det_exact, signature_sym
from .lagrangian import (LiftedLagrangian, act_lattice, index_pair, is_transversal, lift_graph,
                         lift_skyscraper, make_lagrangian, skyscraper_lattice, symplectic_complete, ud_act)
from .metaplectic import SpinElement, lambda_exact, lambda_general, N_of, principal_lift, q_of
from .numclass import (CohClass, GaussRat, PhasePoint, ch_semihomog, chi_pair, class_from_pairings, class_of, ell,
                       mirror_integral, mirror_integral_exact, ns_span, ns_to_form, rho_hat)
from .phases import (elliptic_standard_phase, equivariance_check, graph_phase_closed_form, inequality_check, phase,
                     phase_compat, surface_bridgeland_phase)
from .polypath import chi_line_arg, chi_window_args, line_index
from .sampling import (rand_generator, rand_invertible, rand_nondegenerate_symmetric, rand_positive_definite, rand_rat,
                       rand_siegel, rand_siegel_exact, rand_sp, rand_symmetric, rng_for)
from .siegel import J, SiegelPoint, base_point, n_plus, snap, square_arg_along, torus

TOL = 1e-6


@dataclass
class SuiteResult:
    name: str
    seed: int
    samples: int | None
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.name, "seed": self.seed, "checks": self.checks, "failures": len(self.failures),
                "messages": self.failures[:20], "seconds": round(self.seconds, 3)}


class _Recorder:
    def __init__(self, res: SuiteResult):
        self.res = res

    def check(self, cond: bool, msg: str):
        self.res.checks += 1
        if not cond:
            r = self.res
            extra = f" --samples {r.samples}" if r.samples is not None else ""
            self.res.failures.append(f"{msg} [replay: liphase selftest --suite {r.name} --seed {r.seed}{extra}]")

    def guard(self, fn: Callable[[], None], label: str):
        try:
            fn()
        except (LiphaseError, AssertionError, ArithmeticError) as e:
            self.check(False, f"{label}: {type(e).__name__}: {e}")


def _dims():
    while True:
        yield from (1, 2, 3)


# ---------------------------------------------------------------- helpers

def random_transported_lift(rng, n: int, length: int = 3) -> LiftedLagrangian:
    """An integral group element (with a random lift) applied to a graph or skyscraper lift."""
    m = principal_lift(rand_sp(rng, n, length, True)).shifted(rng.randint(-2, 2))
    base = lift_graph(rand_symmetric(rng, n, 2, 2)) if rng.random() < 0.6 else lift_skyscraper(n)
    return ud_act(m, base)


def rand_ns_class(rng, n: int) -> CohClass:
    sp = ns_span(n)
    return sp.from_coords([rand_rat(rng, 3, 2) for _ in range(sp.dim)])


# ---------------------------------------------------------------- suites

def suite_index(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("index", seed, samples)
    R = _Recorder(res)
    per_n = samples or 100
    for n in (1, 2, 3):
        rng = rng_for(seed, "index", n)
        for k in range(per_n):
            x = rand_nondegenerate_symmetric(rng, n, 3, 3)

            def run():
                i = line_index(x)
                R.check(i == signature_sym(x)[1], f"n={n} x={x}: index {i} vs negative inertia")
                R.check(line_index(-x) == n - i, f"n={n} x={x}: i(-x) != n - i(x)")
                H = rand_positive_definite(rng, n, 2, 2)
                R.check(line_index(x, H) == i, f"n={n} x={x}: index depends on H={H}")
                arg = chi_line_arg(x)
                R.check(abs(arg - i * math.pi) < TOL, f"n={n} x={x}: Arg chi = {arg}, expected {i} pi")
                th = square_arg_along(x.to_numpy(complex), np.eye(n), 1j * 2.0 ** 12 * np.eye(n), np.zeros((n, n)),
                                      _deg_anchor(x))
                R.check(abs(th - 2 * i * math.pi) < TOL, f"n={n} x={x}: Arg deg = {th}, expected {2 * i} pi")
                ts = sorted(rng.uniform(0, 3) for _ in range(4))
                args = chi_window_args(x, H, ts)
                for (t1, a1), (t2, a2) in zip(zip(ts, args), zip(ts[1:], args[1:])):
                    R.check(a1 - (n - i) * math.pi / 2 < a2 < a1 + i * math.pi / 2,
                            f"n={n} x={x} H={H}: window fails for t1={t1} t2={t2}")

            R.guard(run, f"index n={n} sample {k}")
    return res


def _deg_anchor(x: RatMatrix) -> float:
    n = x.nrows
    T = 2.0 ** 12
    E = x.to_numpy(complex) / (1j * T)
    corr = float(np.sum(np.angle(1 + np.linalg.eigvals(E))))
    v = complex(np.linalg.det(x.to_numpy(complex) + 1j * T * np.eye(n))) ** 2
    return snap(n * math.pi + 2 * corr, v)


def _liftable(g) -> bool:
    return g.in_u0 or g.is_lower or g.is_upper


def _cocycle_sample(rng, n: int):
    """Mostly generic products; sometimes a single triangular generator."""
    if rng.random() < 0.2:
        return rand_generator(rng, n, False)
    return rand_sp(rng, n, 3, False)


def suite_cocycle(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("cocycle", seed, samples)
    R = _Recorder(res)
    pairs = samples or 200
    dims = _dims()
    for k in range(pairs):
        n = next(dims)
        rng = rng_for(seed, "cocycle", k)

        def run():
            while True:
                g1, g2, g3 = (_cocycle_sample(rng, n) for _ in range(3))
                if all(_liftable(g) for g in (g1, g2, g3, g1 @ g2, g2 @ g3, g1 @ g2 @ g3)):
                    break
            lg = lambda_general(g1, g2)
            if all(g.in_u0 for g in (g1, g2, g1 @ g2)):
                le = lambda_exact(g1, g2)
                R.check(lg == le, f"n={n}: lambda_general {lg} != lambda_exact {le} for g1={g1} g2={g2}")
            lhs = lg + lambda_general(g1 @ g2, g3)
            rhs = lambda_general(g2, g3) + lambda_general(g1, g2 @ g3)
            R.check(lhs == rhs, f"n={n}: 2-cocycle identity {lhs} != {rhs}")
            t = torus(RatMatrix.diag([rand_rat(rng, 3, 2) or Fraction(1) for _ in range(n)]))
            R.check(lambda_general(t, g1) == 0, f"n={n}: lambda(t, g) != 0 for t={t}")
            R.check(lambda_general(g1, t) == 0, f"n={n}: lambda(g, t) != 0 for t={t}")
            gi = g1.inv()
            if gi.in_u0 and g2.in_u0 and (gi @ g2).in_u0:
                via_exact = lambda_exact(gi, g2) + lambda_exact(g1, gi @ g2)
                R.check(lambda_general(g1, gi) == via_exact, f"n={n}: lambda(g, g^-1) mismatch")

        R.guard(run, f"cocycle pair {k}")
    triples = samples // 2 if samples else 100
    dims = _dims()
    for k in range(triples):
        n = next(dims)
        rng = rng_for(seed, "nplus", k)

        def run2():
            while True:
                p1 = rand_nondegenerate_symmetric(rng, n, 3, 2)
                p2 = rand_nondegenerate_symmetric(rng, n, 3, 2)
                if det_exact(p1 + p2) != 0:
                    break
            want = line_index(p1 + p2) - line_index(p1) - line_index(p2)
            g1, g2 = n_plus(p1), n_plus(p2)
            R.check(lambda_exact(g1, g2) == want, f"n={n}: N+ identity (exact) fails for {p1}, {p2}")
            R.check(lambda_general(g1, g2) == want, f"n={n}: N+ identity (continued) fails for {p1}, {p2}")

        R.guard(run2, f"N+ triple {k}")
    return res


def suite_nq(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("nq", seed, samples)
    R = _Recorder(res)
    count = samples or 200
    dims = _dims()
    for k in range(count):
        n = next(dims)
        rng = rng_for(seed, "nq", k)

        def run():
            g1, g2 = rand_sp(rng, n, 3, False), rand_sp(rng, n, 3, False)
            N = N_of(g1, g2)
            R.check(N >= 1, f"n={n}: N = {N}")
            R.check(q_of(g1) == q_of(g1.inv()), f"n={n}: q(g) != q(g^-1) for g={g1}")

        R.guard(run, f"nq sample {k}")
    t = torus(RatMatrix([[2]]))
    R.check(q_of(t) == 4, f"q(diag(1/2,2)) = {q_of(t)}")
    R.check(N_of(t, t.inv()) == 4, "N(t, t^-1) != 4")
    return res


def suite_pairing(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("pairing", seed, samples)
    R = _Recorder(res)
    for n in (1, 2, 3):
        H = ns_to_form(RatMatrix.identity(n))
        powers = [CohClass.unit(n)]
        for _ in range(n):
            powers.append(powers[-1].wedge(H))
        for i in range(n + 1):
            val = chi_pair(powers[i], powers[n - i])
            R.check(val == (-1) ** i * math.factorial(n), f"n={n}: chi(H^{i}, H^{n - i}) = {val}")
    count = samples or 50
    dims = _dims()
    for k in range(count):
        n = next(dims)
        rng = rng_for(seed, "pairing", k)

        def run():
            tau = GaussRat(rand_rat(rng, 3, 4), Fraction(rng.randint(1, 12), rng.randint(1, 4)))
            w = SiegelPoint.exact(RatMatrix.scalar(n, tau.re), RatMatrix.scalar(n, tau.im))
            while True:
                r, d = rng.randint(1, 7), rng.randint(-7, 7)
                if gcd(r, d) == 1:
                    break
            phi = RatMatrix.scalar(n, Fraction(d, r))
            want = GaussRat(1)
            for _ in range(n):
                want = want * (GaussRat(d) - r * tau)
            direct = chi_pair(ell(w), ch_semihomog(phi))
            R.check(direct == want, f"n={n} tau={tau} r={r} d={d}: {direct} != (d - r tau)^n")
            transported = chi_pair(ell(w), class_of(lift_graph(phi)))
            R.check(transported == want, f"n={n} tau={tau} r={r} d={d}: transported class disagrees")
            expect_ch = CohClass(n, {})
            Hk = CohClass.unit(n)
            H = ns_to_form(RatMatrix.identity(n))
            for i in range(n + 1):
                expect_ch = expect_ch + Hk.scale(Fraction(r ** (n - i) * d ** i, math.factorial(i)))
                Hk = Hk.wedge(H)
            R.check(ch_semihomog(phi) == expect_ch, f"n={n} r={r} d={d}: ch(V_rd) mismatch")

        R.guard(run, f"pairing sample {k}")
    return res


def _rand_integral_spin(rng, n: int) -> SpinElement:
    return SpinElement(rand_sp(rng, n, 3, True), rng.choice([1, -1]))


def suite_rho(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("rho", seed, samples)
    R = _Recorder(res)
    count = samples or 100
    for k in range(count):
        n = 1 + k % 2
        rng = rng_for(seed, "rho", k)

        def run():
            s1, s2 = _rand_integral_spin(rng, n), _rand_integral_spin(rng, n)
            r1, r2, r12 = rho_hat(s1), rho_hat(s2), rho_hat(s1 @ s2)
            R.check(r12.matrix == r1.matrix @ r2.matrix, f"n={n}: rho not multiplicative for {s1}, {s2}")
            x, y = rand_ns_class(rng, n), rand_ns_class(rng, n)
            R.check(chi_pair(r1.apply(x), r1.apply(y)) == chi_pair(x, y), f"n={n}: chi not invariant under {s1}")

        R.guard(run, f"rho sample {k}")
    F = rho_hat(SpinElement(J(1), 1))
    R.check(F.apply(CohClass.unit(1)) == -CohClass.point(1), "Fourier: 1 -> -pt fails")
    R.check(F.apply(CohClass.point(1)) == CohClass.unit(1), "Fourier: pt -> 1 fails")
    for n in (1, 2):
        minus = rho_hat(SpinElement(J(n) @ J(n) @ J(n) @ J(n), -1))
        R.check(minus.matrix == -RatMatrix.identity(ns_span(n).dim), f"n={n}: central -1 is not -identity")
    return res


def suite_mirror(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("mirror", seed, samples)
    R = _Recorder(res)
    count = samples or 100
    dims = _dims()
    for k in range(count):
        n = next(dims)
        rng = rng_for(seed, "mirror", k)

        def run():
            Lt = random_transported_lift(rng, n)
            cl = class_of(Lt)
            for j in range(10):
                w = rand_siegel(rng, n)
                try:
                    mi = mirror_integral(Lt, w)
                except RealityViolated as e:
                    R.check(False, f"n={n}: reality assertion fired: {e}")
                    continue
                ch = complex(chi_pair(ell(w), cl))
                R.check(abs(mi - ch) <= 1e-9 * abs(ch), f"n={n}: mirror {mi} vs chi {ch} for {Lt}")
            if k % 10 == 0:
                omegas = [rand_siegel_exact(rng, n) for _ in range(ns_span(n).dim + 2)]
                rec = class_from_pairings(n, lambda w: mirror_integral_exact(Lt, w), omegas)
                R.check(rec == cl, f"n={n}: class reconstructed from mirror integrals differs")

        R.guard(run, f"mirror sample {k}")
    return res


def suite_phase(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("phase", seed, samples)
    R = _Recorder(res)
    scale = (samples / 500) if samples else 1.0
    n_eq, n_compat, n_closed, n_ineq = (max(1, int(c * scale)) for c in (200, 500, 200, 500))
    dims = _dims()
    pool: dict[int, list] = {1: [], 2: [], 3: []}
    prng = rng_for(seed, "phase-pool")
    for k in range(max(3, n_compat // 5)):
        n = next(dims)
        pool[n].append(random_transported_lift(prng, n))

    def pick(rng, n):
        return pool[n][rng.randrange(len(pool[n]))]

    def rand_sigma(rng, n):
        return PhasePoint(rand_siegel(rng, n), complex(rng.uniform(-2, 2), rng.uniform(-1, 1)))

    dims = _dims()
    for k in range(n_eq):
        n = next(dims)
        rng = rng_for(seed, "phase-eq", k)

        def run():
            m = principal_lift(rand_sp(rng, n, 3, True)).shifted(rng.randint(-2, 2))
            r = equivariance_check(m, rand_sigma(rng, n), pick(rng, n))
            R.check(r < TOL, f"n={n}: equivariance residual {r}")

        R.guard(run, f"equivariance sample {k}")
    dims = _dims()
    for k in range(n_compat):
        n = next(dims)
        rng = rng_for(seed, "phase-compat", k)

        def run():
            Lt = pick(rng, n)
            sigma = rand_sigma(rng, n)
            r = phase_compat(sigma, Lt)
            R.check(r < TOL, f"n={n}: compatibility residual {r}")
            if k % 10 == 0:
                d = rng.randint(-2, 2)
                ph, ph2 = phase(sigma, Lt), phase(sigma, Lt.shifted(d))
                R.check(abs(ph2 - ph - d) < 1e-9, f"n={n}: shift rule fails")
                R.check(class_of(Lt.shifted(d)) == class_of(Lt).scale((-1) ** d), f"n={n}: shifted class")

        R.guard(run, f"compat sample {k}")
    dims = _dims()
    for k in range(n_closed):
        n = next(dims)
        rng = rng_for(seed, "phase-closed", k)

        def run():
            phi = rand_symmetric(rng, n, 3, 3)
            sigma = rand_sigma(rng, n)
            a, b = phase(sigma, lift_graph(phi)), graph_phase_closed_form(sigma, phi)
            R.check(abs(a - b) < TOL, f"n={n}: closed-form graph phase {b} vs continuation {a}")
            R.check(phase(sigma, lift_skyscraper(n)) == sigma.z.real, f"n={n}: skyscraper phase")

        R.guard(run, f"closed-form sample {k}")
    dims = _dims()
    for k in range(n_ineq):
        n = next(dims)
        rng = rng_for(seed, "phase-ineq", k)

        def run():
            while True:
                L1, L2 = pick(rng, n), pick(rng, n)
                if rng.random() < 0.2:
                    L2 = lift_skyscraper(n).shifted(rng.randint(-1, 1))
                if is_transversal(L1.L, L2.L):
                    break
            sigma = rand_sigma(rng, n)
            R.check(inequality_check(sigma, L1, L2), f"n={n}: phase inequality violated")

        R.guard(run, f"inequality sample {k}")
    return res


def suite_surface(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("surface", seed, samples)
    R = _Recorder(res)
    I2 = RatMatrix.identity(2)
    w0 = base_point(2)
    s0 = PhasePoint(w0)
    R.check(phase(s0, lift_graph(-I2)) == -1.5, "phase(V_-I) at iI != -3/2")
    R.check(abs(surface_bridgeland_phase(w0, lift_graph(-I2)) + 0.5) < 1e-12, "Bridgeland phase of V_-I != -1/2")
    R.check(surface_bridgeland_phase(w0, lift_graph(RatMatrix.zeros(2))) == 0.0, "Bridgeland phase of O != 0")
    R.check(surface_bridgeland_phase(w0, lift_skyscraper(2)) == 1.0, "Bridgeland phase of O_x != 1")
    count = samples or 200
    for k in range(count):
        rng = rng_for(seed, "surface", k)

        def run():
            w = rand_siegel(rng, 2)
            if rng.random() < 0.8:
                Lt = lift_graph(rand_symmetric(rng, 2, 3, 3)).shifted(rng.randint(-2, 2))
            else:
                Lt = lift_skyscraper(2).shifted(rng.randint(-2, 2))
            a, b = surface_bridgeland_phase(w, Lt), phase(PhasePoint(w), Lt) + 1
            R.check(abs(a - b) < TOL, f"surface: Bridgeland phase {a} vs phase + 1 = {b}")

        R.guard(run, f"surface sample {k}")
    return res


def suite_elliptic(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("elliptic", seed, samples)
    R = _Recorder(res)
    s = PhasePoint(base_point(1))
    R.check(phase(s, lift_skyscraper(1)) + 1 == 1.0, "phase(O_x) + 1 != 1")
    for r in range(-10, 11):
        for d in range(-10, 11):
            if r == 0 or gcd(r, d) != 1:
                continue

            def run():
                ph = phase(s, lift_graph(RatMatrix([[Fraction(d, r)]]))) + 1
                want = elliptic_standard_phase(r, d)
                R.check(abs(ph - want) < 1e-9, f"(r,d)=({r},{d}): {ph} vs {want}")

            R.guard(run, f"elliptic ({r},{d})")
    return res


def suite_completion(seed: int, samples: int | None = None) -> SuiteResult:
    res = SuiteResult("completion", seed, samples)
    R = _Recorder(res)
    count = samples or 200
    for n in (1, 2, 3):
        for k in range(count):
            rng = rng_for(seed, "completion", n, k)

            def run():
                if k % 2:
                    L = act_lattice(rand_sp(rng, n, 4, True), skyscraper_lattice(n))
                else:
                    y = rand_symmetric(rng, n, 3, 3)
                    x = rand_invertible(rng, n, 2, 2) if rng.random() < 0.5 else RatMatrix.identity(n)
                    L = make_lagrangian(x, y @ x)
                g = symplectic_complete(L)
                R.check(g.is_integral and act_lattice(g, L) == skyscraper_lattice(n), f"n={n}: completion of {L}")

            R.guard(run, f"completion n={n} sample {k}")
    dims = _dims()
    for k in range(count):
        n = next(dims)
        rng = rng_for(seed, "reversal", k)

        def run2():
            while True:
                p1, p2 = rand_symmetric(rng, n, 3, 2), rand_symmetric(rng, n, 3, 2)
                if det_exact(p2 - p1) != 0:
                    break
            l1, l2 = lift_graph(p1), lift_graph(p2)
            i12, i21 = index_pair(l1, l2), index_pair(l2, l1)
            R.check(i12 + i21 == n, f"n={n}: reversal {i12} + {i21} != n")
            R.check(i12 == line_index(p2 - p1), f"n={n}: graph pairing {i12} != i(phi2 - phi1)")
            R.check(index_pair(l1, lift_skyscraper(n)) == 0, f"n={n}: bundle vs skyscraper index != 0")

        R.guard(run2, f"reversal sample {k}")
    return res


SUITES: dict[str, Callable[[int, int | None], SuiteResult]] = {
    "index": suite_index,
    "cocycle": suite_cocycle,
    "nq": suite_nq,
    "pairing": suite_pairing,
    "rho": suite_rho,
    "mirror": suite_mirror,
    "phase": suite_phase,
    "surface": suite_surface,
    "elliptic": suite_elliptic,
    "completion": suite_completion,
}


def run_suite(name: str, seed: int = 42, samples: int | None = None) -> SuiteResult:
    t = time.perf_counter()
    res = SUITES[name](seed, samples)
    res.seconds = time.perf_counter() - t
    return res
