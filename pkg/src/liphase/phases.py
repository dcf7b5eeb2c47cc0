"""The phase function on lifted Lagrangians and its checks."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotTransversal, UnsupportedLift
from .lagrangian import LiftedLagrangian, deck_offset, index_pair, is_transversal, skyscraper_lattice, ud_act
from .metaplectic import TWO_PI, MetaElement
from .numclass import PhasePoint, charge, chi_pair, class_of, ell
from .polypath import wrap
from .siegel import SiegelPoint


def phase(sigma: PhasePoint, Lt: LiftedLagrangian) -> float:
    return sigma.z.real + Lt.arg_at(sigma.omega) / TWO_PI


def phase_compat(sigma: PhasePoint, Lt: LiftedLagrangian) -> float:
    """Angular distance between exp(pi i z) chi(ell(w), [F]) and pi * phase."""
    val = cmath.exp(1j * math.pi * sigma.z) * complex(chi_pair(ell(sigma.omega), class_of(Lt)))
    return abs(wrap(cmath.phase(val) - math.pi * phase(sigma, Lt)))


def inequality_check(sigma: PhasePoint, Lt1: LiftedLagrangian, Lt2: LiftedLagrangian, slack: float = 1e-9) -> bool:
    if not is_transversal(Lt1.L, Lt2.L):
        raise NotTransversal("inequality needs transversal lattices")
    return phase(sigma, Lt1) <= phase(sigma, Lt2) + index_pair(Lt1, Lt2) + slack


def equivariance_check(m: MetaElement, sigma: PhasePoint, Lt: LiftedLagrangian) -> float:
    return abs(phase(sigma.acted(m), ud_act(m, Lt)) - phase(sigma, Lt))


def graph_phase_closed_form(sigma: PhasePoint, phi) -> float:
    """Re z + (1/pi) sum_j arg(mu_j + i) - n, mu_j the eigenvalues of a^{-1/2}(b - phi)a^{-1/2}.

    Here w = b + i a; each arg lies in (0, pi) and the sum is continuous on
    the Siegel domain, tending to n pi/2 at i infinity.
    """
    w = sigma.omega.omega
    n = w.shape[0]
    a = w.imag
    evals, evecs = np.linalg.eigh(a)
    r = evecs @ np.diag(evals ** -0.5) @ evecs.T
    mu = np.linalg.eigvalsh(r @ (w.real - phi.to_numpy()) @ r)
    return sigma.z.real + float(np.sum(np.angle(mu + 1j))) / math.pi - n


def surface_bridgeland_phase(w: SiegelPoint, Lt: LiftedLagrangian) -> float:
    """Phase in the tilted-heart stability on an abelian surface, for bundles and points."""
    if w.n != 2:
        raise UnsupportedLift("the surface comparison needs n = 2")
    k = deck_offset(Lt)
    if k is None:
        raise UnsupportedLift("only graph and skyscraper lattices are supported")
    if Lt.L == skyscraper_lattice(2):
        return 1.0 + k
    Z = charge(PhasePoint(w), Lt.shifted(-k))
    if Z.imag > 0:
        # torsion part of the tilt: the bundle itself lies in the heart
        return math.atan2(Z.imag, Z.real) / math.pi + k
    # free part: the shift by one lies in the heart, so the charge is in -H or R_{>0}
    if Z.imag == 0:
        if Z.real < 0:
            raise ValueError("a bundle in the free part cannot have negative real charge")
        return 0.0 + k
    return math.atan2(Z.imag, Z.real) / math.pi + k


def elliptic_standard_phase(r: int, d: int) -> float:
    """Arg(i - d/r)/pi in (0, 1) for r != 0; the skyscraper (r = 0) has phase 1."""
    if r == 0:
        return 1.0
    return math.atan2(1.0, -d / r) / math.pi


@dataclass(frozen=True)
class PhaseReport:
    sigma: PhasePoint
    lift: LiftedLagrangian
    phase: float
    charge: complex
    compat_residual: float

    def to_json(self) -> dict:
        from .siegel import format_siegel
        from .exact import format_matrix
        return {
            "sigma": {"omega": format_siegel(self.sigma.omega), "z": [self.sigma.z.real, self.sigma.z.imag]},
            "lattice": format_matrix(self.lift.L.matrix),
            "deck": deck_offset(self.lift),
            "phase": self.phase,
            "charge_re": self.charge.real,
            "charge_im": self.charge.imag,
            "residuals": {"compat": self.compat_residual},
        }


def phase_report(sigma: PhasePoint, Lt: LiftedLagrangian) -> PhaseReport:
    return PhaseReport(sigma, Lt, phase(sigma, Lt), charge(sigma, Lt), phase_compat(sigma, Lt))
