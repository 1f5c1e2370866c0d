"""
Eavesdropping with a single-qubit probe.

Eve's interaction is a two-parameter unitary on (Bob's qubit) x (probe),
with the probe prepared in |0>. Bob's qubit is the first tensor factor.
Symmetrized strategies pick the symmetry-breaking axis uniformly among
four orthogonal directions on the x-z great circle.
"""

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

from .states import (
    SINGLET,
    complete_unitary,
    partial_trace,
    projector,
    ket,
    reduce,
    ry,
)


@dataclass(frozen=True)
class ProbeParams:
    """Angles (alpha, beta) of the probe coupling, in radians."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("probe angles must be finite")

    @property
    def a(self):
        ca, sa = np.cos(self.alpha), np.sin(self.alpha)
        cb, sb = np.cos(self.beta), np.sin(self.beta)
        return np.array([ca * cb, ca * sb, sa * cb, -sa * sb])

    @property
    def b(self):
        return self.a[::-1].copy()

    @classmethod
    def from_gamma(cls, gamma):
        return IntensityGamma(gamma).params

    def swapped(self):
        return ProbeParams(self.beta, self.alpha)


IDENTITY = ProbeParams(0.0, np.pi / 4)
VON_NEUMANN = ProbeParams(0.0, 0.0)


@dataclass(frozen=True)
class IntensityGamma:
    """
    Measurement of intensity gamma: alpha = 0, cos^2(beta) = (1 + sin gamma)/2.

    gamma = 0 leaves Bob's qubit alone; gamma = pi/2 is a full CNOT readout.
    """

    gamma: float

    def __post_init__(self):
        if not (0 <= self.gamma <= np.pi / 2 + 1e-15):
            raise ValueError(f"gamma must lie in [0, pi/2], got {self.gamma}")

    @property
    def params(self):
        return ProbeParams(0.0, np.pi / 4 - self.gamma / 2)


def as_params(p):
    if isinstance(p, IntensityGamma):
        return p.params
    if isinstance(p, ProbeParams):
        return p
    raise TypeError(f"expected ProbeParams or IntensityGamma, got {type(p).__name__}")


class SymmetryAxis(IntEnum):
    """Symmetry-breaking axis; the value counts quarter turns about y."""

    UP = 0
    RIGHT = 1
    DOWN = 2
    LEFT = 3

    @property
    def angle(self):
        return self.value * np.pi / 2


@dataclass(frozen=True)
class ChannelOutput:
    joint: np.ndarray  # Bob (x) Eve
    rho_bob: np.ndarray
    rho_eve: np.ndarray


def probe_unitary(p):
    """
    4x4 real unitary with U|up,0> = sum a_j |..>, U|down,0> = sum b_j |..>.

    Basis order |up up>, |up down>, |down up>, |down down>; the columns for
    probe input |1> are a deterministic Gram-Schmidt completion.
    """
    p = as_params(p)
    return _probe_unitary(p.alpha, p.beta)


@lru_cache(maxsize=4096)
def _probe_unitary(alpha, beta):
    p = ProbeParams(alpha, beta)
    u = complete_unitary({0: p.a, 2: p.b}, 4).real
    u.setflags(write=False)
    return u


def axis_unitary(p, axis=SymmetryAxis.UP):
    """Probe unitary re-oriented to ``axis``: (R x R) U (R^dag x 1)."""
    r = ry(SymmetryAxis(axis).angle).real
    rr = np.kron(r, r)
    return rr @ probe_unitary(p) @ np.kron(r.T, np.eye(2))


def probe_isometry(p, axis=SymmetryAxis.UP):
    """The 4x2 map |x> -> U_axis |x, 0> actually used by the channel."""
    return axis_unitary(p, axis)[:, [0, 2]]


def apply_probe(theta, p, axis=SymmetryAxis.UP):
    """Send psi(theta) through Eve's probe; return joint and reduced states."""
    out = probe_isometry(p, axis) @ ket(theta)
    joint = projector(out)
    return ChannelOutput(
        joint=joint,
        rho_bob=partial_trace(joint, 0),
        rho_eve=partial_trace(joint, 1),
    )


def axis_average(fn, axes=tuple(SymmetryAxis)):
    """Equal-weight average of ``fn(axis)`` over ``axes``."""
    return sum(fn(ax) for ax in axes) / len(axes)


def symmetrized_bob(theta, p, axes=tuple(SymmetryAxis)):
    return axis_average(lambda ax: apply_probe(theta, p, ax).rho_bob, axes)


def symmetrized_eve(theta, p, axes=tuple(SymmetryAxis)):
    return axis_average(lambda ax: apply_probe(theta, p, ax).rho_eve, axes)


def shrink_factor(p):
    """eta = cos(2 alpha) (1 + sin(2 beta)) / 2."""
    p = as_params(p)
    return float(np.cos(2 * p.alpha) * (1 + np.sin(2 * p.beta)) / 2)


def ber(p):
    """Bit error rate of the symmetrized strategy, (1 - eta)/2."""
    return (1 - shrink_factor(p)) / 2


def epr_joint(p, symmetrized=False):
    """
    Alice (x) Bob state when Bob's half of a singlet passes Eve's probe.
    """
    return axis_average(lambda ax: _joint_ab(p, ax), _axes(symmetrized))


def eve_joint(p, symmetrized=False):
    """Alice (x) Eve state for the singlet source, Bob traced out."""
    return axis_average(lambda ax: _joint_ae(p, ax), _axes(symmetrized))


def _axes(symmetrized):
    return tuple(SymmetryAxis) if symmetrized else (SymmetryAxis.UP,)


def _tripartite(p, axis):
    # Alice (x) Bob (x) probe
    v = np.kron(np.eye(2), probe_isometry(p, axis))
    return v @ SINGLET


def _joint_ab(p, axis):
    return reduce(_tripartite(p, axis), (0, 1), (2, 2, 2))


def _joint_ae(p, axis):
    return reduce(_tripartite(p, axis), (0, 2), (2, 2, 2))


def intercept_resend(p_fraction):
    """
    BER and Eve's information for intercept/resend on a fraction of qubits.

    Eve measures in a uniformly random BB84 basis and resends the state
    she found. The numbers are obtained by enumerating the outcome table.
    """
    p_fraction = float(p_fraction)
    if not 0 <= p_fraction <= 1:
        raise ValueError(f"intercept fraction must lie in [0, 1], got {p_fraction}")
    err = 0.0
    info = 0.0
    for basis in (0, 1):  # Alice's basis, also Bob's after sifting
        for eve_basis in (0, 1):
            table = np.zeros((2, 2))  # p(bit, Eve outcome)
            for bit in (0, 1):
                theta = basis * np.pi / 2 + bit * np.pi
                for outcome in (0, 1):
                    resent = eve_basis * np.pi / 2 + outcome * np.pi
                    p_out = abs(np.vdot(ket(resent), ket(theta))) ** 2
                    p_bob_wrong = abs(np.vdot(ket(theta + np.pi), ket(resent))) ** 2
                    table[bit, outcome] = 0.5 * p_out
                    err += 0.25 * 0.5 * p_out * p_bob_wrong
            info += 0.25 * _mutual_information(table)
    return p_fraction * err, p_fraction * info


def _mutual_information(joint):
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 1e-15
    return float(np.sum(joint[mask] * np.log2(joint[mask] / (px @ py)[mask])))
