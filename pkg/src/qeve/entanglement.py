"""
Bell-inequality tests and the purification feasibility condition.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq, minimize

from .probe import IntensityGamma, ber, epr_joint, eve_joint
from .states import (
    SINGLET,
    chsh_value,
    correlation_matrix,
    direction,
    horodecki_m,
)

Q_BELL = 0.5 - np.sqrt(2) / 4


@dataclass(frozen=True)
class BellSetting:
    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-9:
                raise ValueError(f"{name} must be a unit 3-vector")
            object.__setattr__(self, name, v)

    @classmethod
    def from_angles(cls, a, a_prime, b, b_prime):
        """Setting from four angles on the x-z great circle."""
        return cls(direction(a), direction(a_prime), direction(b), direction(b_prime))

    def value(self, rho):
        return chsh_value(rho, self.a, self.a_prime, self.b, self.b_prime)


# Alice on the two BB84 axes, Bob's frame turned by 45 degrees
TILTED_SETTING = BellSetting.from_angles(0.0, np.pi / 2, np.pi / 4, -np.pi / 4)
# the same geometry for the Alice-Eve pair
DIAGONAL_SETTING = TILTED_SETTING


@dataclass(frozen=True)
class BellReport:
    s_ab: float
    horodecki_m: float
    q: float
    s_ae: Optional[float] = None


def s_ab_intensity(gamma):
    """sqrt(2)(1 + cos gamma)."""
    return np.sqrt(2) * (1 + np.cos(gamma))


def s_ae_intensity(gamma):
    """2 sqrt(2) sin gamma, the claimed Alice-Eve value for the tilted setting."""
    return 2 * np.sqrt(2) * np.sin(gamma)


def q_bell():
    """Error rate at which sqrt(2)(1 + cos gamma) drops to 2."""
    gamma = brentq(lambda g: s_ab_intensity(g) - 2, 0.0, np.pi / 2, xtol=1e-15)
    return ber(IntensityGamma(gamma))


def _best_b_pair(t, a, a_prime):
    """For fixed Alice directions the optimal Bob pair is analytic."""
    u = t.T @ (a + a_prime)
    v = t.T @ (a - a_prime)
    return np.linalg.norm(u) + np.linalg.norm(v), u, v


def _sphere(th, ph):
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def _unit_or(v, fallback):
    n = np.linalg.norm(v)
    return v / n if n > 1e-12 else fallback


def best_chsh(rho, n_grid=32):
    """
    Numerically maximize |S| over all measurement directions.

    Bob's pair is optimal in closed form given Alice's pair, so the search
    runs over Alice's two directions: a great-circle grid first, then a
    full-sphere quasi-Newton refinement from the best few grid points.
    Returns (S, BellSetting) with S >= 0.
    """
    t = correlation_matrix(rho)
    chis = np.arange(n_grid) * 2 * np.pi / n_grid
    scored = []
    for ca in chis:
        for cb in chis:
            s, _, _ = _best_b_pair(t, direction(ca), direction(cb))
            scored.append((-s, ca, cb))
    scored.sort()

    def neg(x):
        return -_best_b_pair(t, _sphere(x[0], x[1]), _sphere(x[2], x[3]))[0]

    starts = [(ca, 0.0, cb, 0.0) for _, ca, cb in scored[:4]]
    # off-circle starts so correlations along y are reachable
    starts += [(np.pi / 2, np.pi / 2, 0.0, 0.0), (np.pi / 2, 0.0, np.pi / 2, np.pi / 2),
               (1.0, 0.7, 2.0, 2.5)]
    best = None
    for x0 in starts:
        res = minimize(neg, np.asarray(x0, float), method="BFGS", options={"gtol": 1e-12})
        if best is None or res.fun < best.fun:
            best = res
    a, a_prime = _sphere(best.x[0], best.x[1]), _sphere(best.x[2], best.x[3])
    s, u, v = _best_b_pair(t, a, a_prime)
    # S = u.b + v.b' is maximized by b along u and b' along v
    b = _unit_or(u, np.array([0.0, 0.0, 1.0]))
    b_prime = _unit_or(v, np.array([1.0, 0.0, 0.0]))
    return float(s), BellSetting(a, a_prime, b, b_prime)


def singlet_fraction(rho):
    """<psi-| rho |psi->."""
    return float(np.real(SINGLET.conj() @ np.asarray(rho, dtype=complex) @ SINGLET))


def qpa_feasible(rho):
    """
    Purification can distill singlets iff the singlet fraction exceeds 1/2.

    Values within 1e-12 of 1/2 count as the boundary (not feasible), so
    rounding in the state construction cannot flip the verdict.
    """
    return singlet_fraction(rho) > 0.5 + 1e-12


def bell_report(gamma, symmetrized=False):
    p = IntensityGamma(gamma)
    rho = epr_joint(p, symmetrized)
    return BellReport(
        s_ab=abs(TILTED_SETTING.value(rho)),
        horodecki_m=horodecki_m(rho),
        q=ber(p),
        s_ae=abs(DIAGONAL_SETTING.value(eve_joint(p, symmetrized))),
    )


class Crossing(NamedTuple):
    gamma: float
    q: float


def horodecki_threshold(symmetrized=True):
    """
    Intensity at which the joint state's M(rho) drops to 1.

    Returns None when M stays above 1 inside the family and only touches it
    at gamma = pi/2, as happens without symmetrization.
    """

    def excess(g):
        return horodecki_m(epr_joint(IntensityGamma(g), symmetrized)) - 1

    lo, hi = 0.0, np.pi / 2
    if excess(hi) > -1e-12:
        return None
    g = brentq(excess, lo, hi, xtol=1e-14)
    return Crossing(g, ber(IntensityGamma(g)))
