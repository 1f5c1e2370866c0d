"""
Mutual information for Bob and Eve, and the optimal single-qubit probe.

All information quantities are in bits. Eve's information on a basis is
the accessible information of her two conditional probe states, maximized
over projective measurements; she is assumed to know her own symmetry
axis and to measure after the bases are announced.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .probe import (
    ProbeParams,
    SymmetryAxis,
    as_params,
    ber,
    probe_isometry,
    shrink_factor,
)
from .states import bloch_of, check_density, ket, ry, von_neumann_entropy

BASES = (0.0, np.pi / 2)  # Bloch angle of bit 0 in the up/down and left/right bases


def binary_entropy(x):
    """h(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any(~np.isfinite(x)):
        raise ValueError("binary_entropy argument must lie in [0, 1]")
    out = _h(x)
    return float(out) if out.ndim == 0 else out


def _h(x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(x > 0, -x * np.log2(np.where(x > 0, x, 1)), 0.0)
        u = np.where(x < 1, -(1 - x) * np.log2(np.where(x < 1, 1 - x, 1)), 0.0)
    return t + u


def info_ab(q):
    """Alice-Bob information 1 - h(q) for a binary symmetric channel."""
    out = 1 - np.asarray(binary_entropy(q))
    return float(out) if out.ndim == 0 else out


def posterior_up(gamma):
    """P(input up | probe found up) for a measurement of intensity gamma."""
    return (1 + np.sin(gamma)) / 2


def info_eve_intensity(gamma):
    """Eve's information for a measurement of intensity gamma, averaged over bases."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any((gamma < 0) | (gamma > np.pi / 2 + 1e-12)):
        raise ValueError("gamma must lie in [0, pi/2]")
    out = 0.5 * (1 - _h(posterior_up(gamma)))
    return float(out) if out.ndim == 0 else out


def gamma_for_ber(q):
    """Intensity gamma whose error rate (1 - cos gamma)/4 equals ``q``."""
    q = np.asarray(q, dtype=float)
    if np.any((q < 0) | (q > 0.25)):
        raise ValueError("a measurement of intensity gamma reaches BER in [0, 0.25] only")
    out = np.arccos(1 - 4 * q)
    return float(out) if out.ndim == 0 else out


def intensity_crossing():
    """
    BER where Bob's and Eve's information are equal under the intensity-gamma
    attack; returns (q, common information).
    """
    q = brentq(lambda x: info_ab(x) - info_eve_intensity(gamma_for_ber(x)), 0.05, 0.25, xtol=1e-15)
    return float(q), info_ab(q)


@dataclass(frozen=True)
class BinaryEnsemble:
    """Two qubit states encoding one bit, sent with probabilities (prior, 1 - prior)."""

    rho0: np.ndarray
    rho1: np.ndarray
    prior: float = 0.5

    def __post_init__(self):
        check_density(self.rho0, 2, tol=1e-9)
        check_density(self.rho1, 2, tol=1e-9)
        if not 0 < self.prior < 1:
            raise ValueError(f"prior must lie in (0, 1), got {self.prior}")


def _mi_directions(r0, r1, prior, n):
    """Mutual information of the bit with a +/- measurement along each row of ``n``."""
    p0 = (1 + n @ r0) / 2
    p1 = (1 + n @ r1) / 2
    py = prior * p0 + (1 - prior) * p1
    return _h(py) - prior * _h(p0) - (1 - prior) * _h(p1)


def accessible_info_bloch(r0, r1, prior=0.5, n_scan=256, xtol=1e-10):
    """
    Accessible information of a qubit ensemble given by Bloch vectors.

    Only projective measurements are considered. The optimal direction lies
    in the plane spanned by the two Bloch vectors; that great circle is
    scanned, the best point refined, and the Helstrom direction (eigenbasis
    of the weighted state difference) is tried as an extra candidate.
    """
    r0 = np.asarray(r0, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    diff = r0 - r1
    if np.linalg.norm(diff) < 1e-14:
        return 0.0
    e1 = diff / np.linalg.norm(diff)
    rest = r0 - (r0 @ e1) * e1
    if np.linalg.norm(rest) < 1e-12:
        rest = r1 - (r1 @ e1) * e1
    if np.linalg.norm(rest) < 1e-12:
        # collinear: any perpendicular completes the plane
        rest = np.cross(e1, [1.0, 0.0, 0.0])
        if np.linalg.norm(rest) < 1e-6:
            rest = np.cross(e1, [0.0, 1.0, 0.0])
    e2 = rest / np.linalg.norm(rest)

    def along(phi):
        phi = np.atleast_1d(phi)
        n = np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2)
        return _mi_directions(r0, r1, prior, n)

    phis = np.arange(n_scan) * np.pi / n_scan
    vals = along(phis)
    k = int(np.argmax(vals))
    step = np.pi / n_scan
    res = minimize_scalar(
        lambda x: -along(x)[0],
        bounds=(phis[k] - step, phis[k] + step),
        method="bounded",
        options={"xatol": xtol},
    )
    best = max(vals[k], -res.fun)

    helstrom = prior * r0 - (1 - prior) * r1
    if np.linalg.norm(helstrom) > 1e-14:
        n = helstrom / np.linalg.norm(helstrom)
        best = max(best, _mi_directions(r0, r1, prior, n[None, :])[0])
    return float(max(best, 0.0))


def accessible_info(e):
    """Accessible information (bits) of a :class:`BinaryEnsemble`."""
    return accessible_info_bloch(bloch_of(e.rho0), bloch_of(e.rho1), e.prior)


def holevo_bound(e):
    avg = e.prior * e.rho0 + (1 - e.prior) * e.rho1
    return (
        von_neumann_entropy(avg)
        - e.prior * von_neumann_entropy(e.rho0)
        - (1 - e.prior) * von_neumann_entropy(e.rho1)
    )


def eve_bloch(theta, p, axis):
    """Bloch vector of Eve's probe after psi(theta) passes the probe at ``axis``."""
    out = (probe_isometry(p, axis) @ ket(theta)).reshape(2, 2)  # [bob, eve]
    rho_eve = out.T @ out.conj()
    return bloch_of(rho_eve)


def eve_ensembles(p, axes=tuple(SymmetryAxis)):
    """Eve's conditional Bloch vectors for each (axis, basis) cell."""
    p = as_params(p)
    return [
        (ax, basis, eve_bloch(chi, p, ax), eve_bloch(chi + np.pi, p, ax))
        for ax in axes
        for basis, chi in enumerate(BASES)
    ]


_INV_PHI = (np.sqrt(5) - 1) / 2


def _plane_basis(r0, r1):
    """Orthonormal pair spanning the plane of each row pair of Bloch vectors."""
    diff = r0 - r1
    dn = np.linalg.norm(diff, axis=-1, keepdims=True)
    e1 = np.where(dn > 1e-14, diff / np.where(dn > 1e-14, dn, 1), [0.0, 0.0, 1.0])
    rest = r0 - np.sum(r0 * e1, axis=-1, keepdims=True) * e1
    alt = r1 - np.sum(r1 * e1, axis=-1, keepdims=True) * e1
    rest = np.where(np.linalg.norm(rest, axis=-1, keepdims=True) > 1e-12, rest, alt)
    for fallback in ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]):
        small = np.linalg.norm(rest, axis=-1, keepdims=True) < 1e-6
        rest = np.where(small, np.cross(e1, fallback), rest)
    e2 = rest / np.linalg.norm(rest, axis=-1, keepdims=True)
    return e1, e2, dn[..., 0]


def accessible_info_batch(r0, r1, prior=0.5, n_scan=256, xtol=1e-10):
    """
    Vectorized :func:`accessible_info_bloch` over leading axes of ``r0``, ``r1``.

    Refinement is a golden-section search run in lockstep for every row.
    """
    r0 = np.asarray(r0, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    e1, e2, dn = _plane_basis(r0, r1)
    proj0 = np.stack([np.sum(r0 * e1, -1), np.sum(r0 * e2, -1)], -1)
    proj1 = np.stack([np.sum(r1 * e1, -1), np.sum(r1 * e2, -1)], -1)

    def along(phi):
        c, s = np.cos(phi), np.sin(phi)
        p0 = (1 + c * proj0[..., :1] + s * proj0[..., 1:]) / 2
        p1 = (1 + c * proj1[..., :1] + s * proj1[..., 1:]) / 2
        py = prior * p0 + (1 - prior) * p1
        return _h(py) - prior * _h(p0) - (1 - prior) * _h(p1)

    step = np.pi / n_scan
    phis = np.arange(n_scan) * step
    vals = along(phis)
    k = np.argmax(vals, axis=-1)
    best = np.take_along_axis(vals, k[..., None], -1)[..., 0]

    lo = phis[k] - step
    hi = phis[k] + step
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc = along(c[..., None])[..., 0]
    fd = along(d[..., None])[..., 0]
    n_iter = int(np.ceil(np.log(xtol / (2 * step)) / np.log(_INV_PHI)))
    for _ in range(n_iter):
        left = fc > fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        d_new = np.where(left, c, lo + _INV_PHI * (hi - lo))
        c_new = np.where(left, hi - _INV_PHI * (hi - lo), d)
        c, d = c_new, d_new
        fresh = along(np.where(left, c, d)[..., None])[..., 0]
        fc, fd = np.where(left, fresh, fd), np.where(left, fc, fresh)
    best = np.maximum(best, np.maximum(fc, fd))

    helstrom = prior * r0 - (1 - prior) * r1
    hn = np.linalg.norm(helstrom, axis=-1, keepdims=True)
    n = helstrom / np.where(hn > 1e-14, hn, 1)
    p0 = (1 + np.sum(n * r0, -1)) / 2
    p1 = (1 + np.sum(n * r1, -1)) / 2
    hel = _h(prior * p0 + (1 - prior) * p1) - prior * _h(p0) - (1 - prior) * _h(p1)
    best = np.maximum(best, np.where(hn[..., 0] > 1e-14, hel, 0.0))
    return np.where(dn > 1e-14, np.maximum(best, 0.0), 0.0)


def _probe_columns(alpha, beta):
    """Isometry |x> -> U|x,0> for arrays of angles; shape (..., 4, 2)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    a = np.stack([ca * cb, ca * sb, sa * cb, -sa * sb], -1)
    return np.stack([a, a[..., ::-1]], -1)


def eve_cells_batch(alpha, beta, axes=tuple(SymmetryAxis)):
    """
    Eve's conditional Bloch vectors for arrays of probe angles.

    Returns r0, r1 with shape (..., len(axes) * 2, 3), ordered by axis then
    basis, matching :func:`eve_ensembles`.
    """
    v = _probe_columns(np.asarray(alpha, float), np.asarray(beta, float))
    r0s, r1s = [], []
    for ax in axes:
        r = ry(SymmetryAxis(ax).angle).real
        vk = np.kron(r, r) @ v @ r.T
        for chi in BASES:
            out = []
            for theta in (chi, chi + np.pi):
                psi = (vk @ ket(theta).real).reshape(*vk.shape[:-2], 2, 2)
                rho = np.einsum("...be,...bf->...ef", psi, psi)
                out.append(
                    np.stack(
                        [2 * rho[..., 0, 1], np.zeros_like(rho[..., 0, 0]),
                         rho[..., 0, 0] - rho[..., 1, 1]],
                        -1,
                    )
                )
            r0s.append(out[0])
            r1s.append(out[1])
    return np.stack(r0s, -2), np.stack(r1s, -2)


def info_eve_batch(alpha, beta, symmetrized=True):
    """Vectorized :func:`info_eve_general` over arrays of probe angles."""
    axes = tuple(SymmetryAxis) if symmetrized else (SymmetryAxis.UP,)
    r0, r1 = eve_cells_batch(alpha, beta, axes)
    return accessible_info_batch(r0, r1).mean(-1)


def info_eve_general(p, symmetrized=True, n_scan=256):
    """
    Eve's information for the (alpha, beta) probe.

    Eve waits for the basis announcement and knows which axis she used, so
    her information is the mean over (axis, basis) of the accessible
    information of her two conditional states.
    """
    axes = tuple(SymmetryAxis) if symmetrized else (SymmetryAxis.UP,)
    cells = eve_ensembles(p, axes)
    return float(
        np.mean([accessible_info_bloch(r0, r1, n_scan=n_scan) for _, _, r0, r1 in cells])
    )


class OptimalProbe(NamedTuple):
    params: ProbeParams
    i_ae: float


def _constraint_beta(alpha, eta, branch):
    """Beta on the level set cos(2a)(1 + sin(2b))/2 = eta; NaN where infeasible."""
    alpha = np.asarray(alpha, dtype=float)
    c = np.cos(2 * alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(c > 0, 2 * eta / c - 1, np.nan)
    s = np.where(np.abs(s) <= 1 + 1e-12, np.clip(s, -1, 1), np.nan)
    half = np.arcsin(s) / 2
    return half if branch == 0 else np.pi / 2 - half


def optimize_info(q_target, n_scan=512, xtol=1e-10):
    """
    Maximize Eve's information over probes with symmetrized BER ``q_target``.

    The level set cos(2a)(1 + sin(2b))/2 = 1 - 2q is parametrized by alpha,
    with beta solved on either branch; a scan is followed by bounded
    refinement around the best point. Ties go to the smaller |alpha|.
    """
    q_target = float(q_target)
    if not 0 <= q_target <= 0.5:
        raise ValueError(f"BER target must lie in [0, 0.5], got {q_target}")
    eta = 1 - 2 * q_target
    a_max = 0.5 * np.arccos(eta)

    def objective(alpha, branch):
        beta = _constraint_beta(alpha, eta, branch)
        ok = np.isfinite(beta)
        out = np.full(np.shape(alpha), -np.inf)
        if np.any(ok):
            out[ok] = info_eve_batch(np.asarray(alpha)[ok], beta[ok])
        return out

    if eta < 1e-12:
        # cos(2 alpha) = 0 makes beta free; the level set is a line in beta
        betas = np.linspace(-np.pi / 2, np.pi / 2, n_scan + 1)
        vals = info_eve_batch(np.full_like(betas, np.pi / 4), betas)
        k = int(np.argmax(vals))
        return OptimalProbe(ProbeParams(np.pi / 4, float(betas[k])), float(vals[k]))
    if a_max < 1e-12:
        p = ProbeParams(0.0, float(_constraint_beta(0.0, eta, 0)))
        return OptimalProbe(p, info_eve_general(p))

    # alpha = 0 is the intensity-gamma member; keep it on the grid
    alphas = np.union1d(np.linspace(-a_max, a_max, n_scan), [0.0])
    vals = np.stack([objective(alphas, branch) for branch in (0, 1)])
    top = vals.max()
    ties = np.argwhere(vals >= top - 1e-13)
    branch, k = min(ties, key=lambda t: (abs(alphas[t[1]]), t[0]))
    a0, v0 = alphas[k], vals[branch, k]

    lo = alphas[max(k - 1, 0)]
    hi = alphas[min(k + 1, len(alphas) - 1)]
    res = minimize_scalar(
        lambda a: -objective(np.array([a]), branch)[0],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": xtol},
    )
    if -res.fun > v0:
        v0, a0 = -res.fun, float(res.x)
    beta = float(_constraint_beta(a0, eta, branch))
    return OptimalProbe(ProbeParams(float(a0), beta), float(v0))


@dataclass(frozen=True)
class StrategyReport:
    eta: float
    q: float
    fidelity: float
    i_ab: float
    i_ae: float
    strategy: str


def strategy_report(p, label=None):
    """Derived scalars of a symmetrized probe strategy."""
    p = as_params(p)
    q = ber(p)
    return StrategyReport(
        eta=shrink_factor(p),
        q=q,
        fidelity=1 - q,
        i_ab=info_ab(q),
        i_ae=info_eve_general(p),
        strategy=label or f"probe(alpha={p.alpha:.6g}, beta={p.beta:.6g})",
    )
