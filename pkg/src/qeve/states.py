"""
Small dense quantum-state algebra for one and two qubits.

States are plain complex numpy arrays: a qubit density is 2x2, a
two-qubit density is 4x4 with the first factor as the more significant
index (``|ij> -> 2*i + j``). Bloch vectors and measurement directions are
real arrays of shape (3,).
"""

import numpy as np

TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)
I2 = np.eye(2, dtype=complex)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)
SINGLET = (np.kron(UP, DOWN) - np.kron(DOWN, UP)) / np.sqrt(2)


def ket(theta):
    """State vector cos(theta/2)|up> + sin(theta/2)|down>."""
    theta = _finite(theta, "theta")
    return np.array([np.cos(theta / 2), np.sin(theta / 2)], dtype=complex)


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def pure_state_density(theta):
    """
    Density matrix of the great-circle state at Bloch angle ``theta``.

    Returns 1/2 [[1 + cos t, sin t], [sin t, 1 - cos t]].
    """
    theta = _finite(theta, "theta")
    c, s = np.cos(theta), np.sin(theta)
    return 0.5 * np.array([[1 + c, s], [s, 1 - c]], dtype=complex)


def bloch_of(rho):
    """Bloch vector (tr(rho sx), tr(rho sy), tr(rho sz))."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in PAULI])


def density_of(m):
    """Inverse of :func:`bloch_of`; rejects vectors outside the unit ball."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3,):
        raise ValueError(f"Bloch vector must have shape (3,), got {m.shape}")
    if np.linalg.norm(m) > 1 + 1e-9:
        raise ValueError(f"Bloch vector norm {np.linalg.norm(m):.6g} exceeds 1")
    return 0.5 * (I2 + m[0] * SIGMA_X + m[1] * SIGMA_Y + m[2] * SIGMA_Z)


def direction(chi):
    """Unit measurement direction at angle ``chi`` in the x-z plane."""
    chi = _finite(chi, "chi")
    return np.array([np.sin(chi), 0.0, np.cos(chi)])


def spin_operator(n):
    n = unit_direction(n)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def unit_direction(n):
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1) > 1e-9:
        raise ValueError(f"measurement direction must be a unit 3-vector, got {n}")
    return n


def is_density(rho, tol=TOL):
    """True if ``rho`` is Hermitian, unit trace and PSD within ``tol``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -tol)


def check_density(rho, dim=None, tol=TOL):
    rho = np.asarray(rho, dtype=complex)
    if dim is not None and rho.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} density matrix, got shape {rho.shape}")
    if not is_density(rho, tol):
        raise ValueError("matrix is not a valid density matrix")
    return rho


def partial_trace(rho, keep, dims=(2, 2)):
    """
    Reduce a bipartite density matrix to one factor.

    ``keep`` is 0 (first factor) or 1 (second factor).
    """
    if keep not in (0, 1):
        raise ValueError(f"keep must be 0 or 1, got {keep!r}")
    d0, d1 = dims
    r = np.asarray(rho, dtype=complex).reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)


def reduce(psi, keep, dims):
    """Reduced density matrix of a pure multipartite state on subsystems ``keep``."""
    psi = np.asarray(psi, dtype=complex).reshape(dims)
    keep = list(keep)
    rest = [k for k in range(len(dims)) if k not in keep]
    t = np.transpose(psi, keep + rest)
    dk = int(np.prod([dims[k] for k in keep]))
    t = t.reshape(dk, -1)
    return t @ t.conj().T


def fidelity_pure(theta, rho):
    """<psi(theta)| rho |psi(theta)>."""
    psi = ket(theta)
    return float(np.real(psi.conj() @ np.asarray(rho, dtype=complex) @ psi))


def correlation_matrix(rho):
    """T_ij = tr(rho sigma_i (x) sigma_j) for a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    return np.array(
        [[np.trace(rho @ np.kron(si, sj)).real for sj in PAULI] for si in PAULI]
    )


def correlator(rho, u, v):
    return float(unit_direction(u) @ correlation_matrix(rho) @ unit_direction(v))


def chsh_value(rho, a, a_prime, b, b_prime):
    """S = E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    t = correlation_matrix(rho)
    a, a_prime, b, b_prime = (unit_direction(x) for x in (a, a_prime, b, b_prime))
    return float(a @ t @ (b + b_prime) + a_prime @ t @ (b - b_prime))


def horodecki_m(rho):
    """
    Sum of the two largest eigenvalues of T^T T.

    The state can violate some CHSH inequality iff this exceeds 1, and the
    largest attainable |S| is 2*sqrt(M).
    """
    t = correlation_matrix(rho)
    w = np.linalg.eigvalsh(t.T @ t)
    return float(w[-1] + w[-2])


def von_neumann_entropy(rho):
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def ry(phi):
    """Rotation by ``phi`` about the Bloch y axis; maps psi(t) to psi(t + phi)."""
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def complete_unitary(columns, dim):
    """
    Extend orthonormal ``columns`` (dict index -> vector) to a unitary.

    Each free column is the standard basis vector with the largest residual
    after projecting out the columns placed so far (lowest index on ties),
    orthogonalized twice for stability. The completion is deterministic.
    """
    u = np.zeros((dim, dim), dtype=complex)
    basis = [np.asarray(columns[k], dtype=complex) for k in sorted(columns)]
    for k in sorted(columns):
        u[:, k] = columns[k]
    eye = np.eye(dim, dtype=complex)
    for k in (k for k in range(dim) if k not in columns):
        q = np.array(basis).T if basis else np.zeros((dim, 0))
        resid = eye - q @ (q.conj().T @ eye)
        resid = resid - q @ (q.conj().T @ resid)
        j = int(np.argmax(np.round(np.linalg.norm(resid, axis=0), 12)))
        w = resid[:, j] / np.linalg.norm(resid[:, j])
        basis.append(w)
        u[:, k] = w
    return u


def _finite(x, name):
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x}")
    return x
