"""
Imperfect quantum cloning: the two-qubit pretty-good copier and the
universal cloner with a qubit machine register.

Tensor order is original (x) copy (x) machine; the universal cloner's
machine states are |M_up> = |0>, |M_down> = |1>, and it starts in |M_up>.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .entanglement import TILTED_SETTING, best_chsh
from .information import _h, accessible_info_bloch, info_eve_general
from .probe import ProbeParams, SymmetryAxis, apply_probe, probe_isometry, ber
from .states import (
    SINGLET,
    bloch_of,
    complete_unitary,
    fidelity_pure,
    ket,
    projector,
    reduce,
    spin_operator,
)

KINDS = ("pgqcm", "pgqcm_symmetrized", "uqcm")
PGQCM_ALPHA = np.pi / 12


@dataclass(frozen=True)
class ClonerSpec:
    """
    Which cloner to use. ``beta`` defaults to ``alpha``; setting it apart
    gives an asymmetric two-qubit copier (used for the relaxed optimum).
    """

    kind: str
    alpha: float = PGQCM_ALPHA
    beta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown cloner kind {self.kind!r}; expected one of {KINDS}")
        if not np.isfinite(self.alpha) or (self.beta is not None and not np.isfinite(self.beta)):
            raise ValueError("cloner angles must be finite")

    @property
    def params(self):
        return ProbeParams(self.alpha, self.alpha if self.beta is None else self.beta)

    @property
    def symmetrized(self):
        return self.kind == "pgqcm_symmetrized"

    def label(self):
        if self.kind == "uqcm":
            return "uqcm"
        return f"{self.kind}({self.alpha:.6g})"


def pgqcm(alpha=PGQCM_ALPHA, symmetrized=False):
    return ClonerSpec("pgqcm_symmetrized" if symmetrized else "pgqcm", alpha)


def uqcm():
    return ClonerSpec("uqcm")


@dataclass(frozen=True)
class CloneOutput:
    rho_original: np.ndarray
    rho_copy: np.ndarray
    rho_machine: Optional[np.ndarray] = None


@lru_cache(maxsize=1)
def uqcm_unitary():
    """
    8x8 unitary of the universal cloner on original (x) copy (x) machine.

    |up,0,M_up>   -> sqrt(2/3)|up,up,M_up> + sqrt(1/6)(|up,down> + |down,up>)|M_down>
    |down,0,M_up> -> sqrt(2/3)|down,down,M_down> + sqrt(1/6)(|up,down> + |down,up>)|M_up>
    """

    def basis(o, c, m):
        v = np.zeros(8)
        v[4 * o + 2 * c + m] = 1
        return v

    s23, s16 = np.sqrt(2 / 3), np.sqrt(1 / 6)
    out_up = s23 * basis(0, 0, 0) + s16 * (basis(0, 1, 1) + basis(1, 0, 1))
    out_down = s23 * basis(1, 1, 1) + s16 * (basis(0, 1, 0) + basis(1, 0, 0))
    for v in (out_up, out_down):
        assert abs(v @ v - 1) < 1e-12
    u = complete_unitary({0: out_up, 4: out_down}, 8).real
    u.setflags(write=False)
    return u


def uqcm_isometry():
    """8x2 map |x> -> U|x, 0, M_up>."""
    return uqcm_unitary()[:, [0, 4]]


def clone(spec, theta):
    """Clone psi(theta); returns the reduced states of every output system."""
    if spec.kind == "uqcm":
        psi = uqcm_isometry() @ ket(theta)
        dims = (2, 2, 2)
        return CloneOutput(
            rho_original=reduce(psi, (0,), dims),
            rho_copy=reduce(psi, (1,), dims),
            rho_machine=reduce(psi, (2,), dims),
        )
    axes = tuple(SymmetryAxis) if spec.symmetrized else (SymmetryAxis.UP,)
    outs = [apply_probe(theta, spec.params, ax) for ax in axes]
    return CloneOutput(
        rho_original=sum(o.rho_bob for o in outs) / len(outs),
        rho_copy=sum(o.rho_eve for o in outs) / len(outs),
    )


def _thetas(n):
    return 2 * np.pi * np.arange(n) / n


def mean_fidelity(spec, n_points=1024, which="original"):
    """
    Fidelity averaged uniformly over the input great circle.

    Uses the n-point periodic trapezoid rule, which is exact for the
    low-order trigonometric integrands produced by these machines.
    """
    attr = "rho_original" if which == "original" else "rho_copy"
    return float(
        np.mean([fidelity_pure(t, getattr(clone(spec, t), attr)) for t in _thetas(n_points)])
    )


def pgqcm_fidelity(alpha, beta=None, which="original"):
    """Mean fidelity of the two-qubit copier, from the output Bloch vectors on a grid."""
    spec = ClonerSpec("pgqcm", alpha, beta)
    return mean_fidelity(spec, n_points=16, which=which)


class ClonerOptimum(NamedTuple):
    alpha: float
    f_bar: float
    relaxed_alpha: float
    relaxed_beta: float
    relaxed_f_bar: float


def optimize_cloner(n_scan=256, xtol=1e-10):
    """
    Best equal-output two-qubit copier, and the relaxed check.

    First maximizes the mean fidelity over alpha with beta = alpha; then
    maximizes the average of the two outputs' fidelities over independent
    (alpha, beta) and reports that optimum for comparison.
    """
    alphas = np.linspace(-np.pi / 4, np.pi / 4, n_scan)
    vals = [pgqcm_fidelity(a) for a in alphas]
    k = int(np.argmax(vals))
    step = alphas[1] - alphas[0]
    res = minimize_scalar(
        lambda a: -pgqcm_fidelity(a),
        bounds=(alphas[k] - step, alphas[k] + step),
        method="bounded",
        options={"xatol": xtol},
    )

    def neg_sum(x):
        return -0.5 * (
            pgqcm_fidelity(x[0], x[1], "original") + pgqcm_fidelity(x[0], x[1], "copy")
        )

    grid = np.linspace(-np.pi / 4, np.pi / 4, 33)
    start = min(((a, b) for a in grid for b in grid), key=neg_sum)
    relaxed = minimize(
        neg_sum, np.array(start), method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
    )
    return ClonerOptimum(
        alpha=float(res.x),
        f_bar=float(-res.fun),
        relaxed_alpha=float(relaxed.x[0]),
        relaxed_beta=float(relaxed.x[1]),
        relaxed_f_bar=float(-relaxed.fun),
    )


def bloch_locus(spec, n_points=64):
    """Bloch vectors of the copy for inputs evenly spaced on the great circle."""
    if n_points < 2:
        raise ValueError("need at least two points on the locus")
    return np.array([bloch_of(clone(spec, t).rho_copy) for t in _thetas(n_points)])


def _isometry_for(spec, axis=SymmetryAxis.UP):
    if spec.kind == "uqcm":
        return uqcm_isometry(), (2, 2, 2)
    return probe_isometry(spec.params, axis), (2, 2)


def broadcast_states(spec):
    """
    Alice's half of a singlet stays home, Bob's half is cloned.

    Returns (rho_alice_bob1, rho_alice_bob2, rho_bob1_bob2) where Bob1
    holds the original and Bob2 the copy.
    """
    axes = tuple(SymmetryAxis) if spec.symmetrized else (SymmetryAxis.UP,)
    acc = [0, 0, 0]
    for ax in axes:
        v, out_dims = _isometry_for(spec, ax)
        psi = np.kron(np.eye(2), v) @ SINGLET
        dims = (2,) + out_dims
        for i, keep in enumerate(((0, 1), (0, 2), (1, 2))):
            acc[i] = acc[i] + reduce(psi, keep, dims)
    return tuple(r / len(axes) for r in acc)


class BroadcastBell(NamedTuple):
    s_b1: float
    s_b2: float


def broadcast_bell(spec, setting=TILTED_SETTING, search=False):
    """
    CHSH values of Alice with each of the two Bobs fed by the cloner.

    With ``search`` each pair gets its own optimal directions.
    """
    rho1, rho2, _ = broadcast_states(spec)
    if search:
        return BroadcastBell(best_chsh(rho1)[0], best_chsh(rho2)[0])
    return BroadcastBell(abs(setting.value(rho1)), abs(setting.value(rho2)))


def copy_pair_covariance(spec, theta):
    """
    cov(s1, s2) of the two Bobs' +/-1 outcomes, both measuring along the
    input's own axis, for input psi(theta). Zero would mean independence.
    """
    if spec.kind == "uqcm":
        v, dims = uqcm_isometry(), (2, 2, 2)
        rho = reduce(v @ ket(theta), (0, 1), dims)
    else:
        axes = tuple(SymmetryAxis) if spec.symmetrized else (SymmetryAxis.UP,)
        rho = sum(
            projector(probe_isometry(spec.params, ax) @ ket(theta)) for ax in axes
        ) / len(axes)
    n = np.array([np.sin(theta), 0.0, np.cos(theta)])
    op = spin_operator(n)
    eye = np.eye(2)
    e12 = np.trace(rho @ np.kron(op, op)).real
    e1 = np.trace(rho @ np.kron(op, eye)).real
    e2 = np.trace(rho @ np.kron(eye, op)).real
    return float(e12 - e1 * e2)


def cloner_tap(spec):
    """
    (BER, Eve information) when Eve uses the cloner on the line and keeps
    the copy, measuring after the basis announcement.

    For the universal cloner Eve also holds the machine register; her
    measurement there is the two-outcome Helstrom projection on
    copy (x) machine, so the figure is a lower bound on her information.
    """
    if spec.kind != "uqcm":
        q = ber(spec.params) if spec.symmetrized else _unsym_ber(spec)
        return q, info_eve_general(spec.params, symmetrized=spec.symmetrized)
    v = uqcm_isometry()
    infos = []
    for chi in (0.0, np.pi / 2):
        states = [reduce(v @ ket(t), (1, 2), (2, 2, 2)) for t in (chi, chi + np.pi)]
        w, vecs = np.linalg.eigh(states[0] - states[1])
        proj = vecs[:, w > 0] @ vecs[:, w > 0].conj().T
        p = np.array([np.trace(proj @ r).real for r in states])
        infos.append(float(_h(p.mean()) - _h(p).mean()))
    q = 1 - mean_fidelity(spec, n_points=16)
    return q, float(np.mean(infos))


def _unsym_ber(spec):
    # BB84 error averaged over the four states of both bases
    return 1 - float(
        np.mean([fidelity_pure(t, clone(spec, t).rho_original) for t in _thetas(4)])
    )


def copy_info(spec):
    """Information carried by the copy alone, averaged over both bases."""
    vals = []
    for chi in (0.0, np.pi / 2):
        r0 = bloch_of(clone(spec, chi).rho_copy)
        r1 = bloch_of(clone(spec, chi + np.pi).rho_copy)
        vals.append(accessible_info_bloch(r0, r1))
    return float(np.mean(vals))
