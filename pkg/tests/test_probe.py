import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qeve.probe import (
    IDENTITY,
    VON_NEUMANN,
    IntensityGamma,
    ProbeParams,
    SymmetryAxis,
    apply_probe,
    axis_unitary,
    ber,
    epr_joint,
    eve_joint,
    intercept_resend,
    probe_isometry,
    probe_unitary,
    shrink_factor,
    symmetrized_bob,
    symmetrized_eve,
)
from qeve.states import (
    SINGLET,
    bloch_of,
    horodecki_m,
    is_density,
    ket,
    partial_trace,
    projector,
    pure_state_density,
    reduce,
    ry,
)

from conftest import angles, gammas

params = st.builds(ProbeParams, angles, angles)


@given(params)
def test_coefficients_orthonormal(p):
    assert p.a @ p.a == pytest.approx(1, abs=1e-12)
    assert p.a @ p.b == pytest.approx(0, abs=1e-12)


@given(params)
def test_probe_unitary_is_unitary(p):
    u = probe_unitary(p)
    assert np.abs(u.T @ u - np.eye(4)).max() < 1e-12
    np.testing.assert_allclose(u[:, 0], p.a, atol=1e-15)
    np.testing.assert_allclose(u[:, 2], p.b, atol=1e-15)


def test_von_neumann_coupling():
    u = probe_unitary(VON_NEUMANN)
    np.testing.assert_allclose(u[:, 0], [1, 0, 0, 0])
    np.testing.assert_allclose(u[:, 2], [0, 0, 0, 1])


@given(gammas)
def test_intensity_action(gamma):
    p = IntensityGamma(gamma).params
    assert np.cos(p.beta) ** 2 == pytest.approx((1 + np.sin(gamma)) / 2, abs=1e-12)
    v = probe_isometry(p)
    up = np.kron([1, 0], ket(np.pi / 2 - gamma))
    down = np.kron([0, 1], ket(np.pi / 2 + gamma))
    np.testing.assert_allclose(v[:, 0], up, atol=1e-12)
    np.testing.assert_allclose(v[:, 1], down, atol=1e-12)


def test_intensity_range_checked():
    with pytest.raises(ValueError):
        IntensityGamma(-0.1)
    with pytest.raises(ValueError):
        IntensityGamma(2.0)


@given(params, angles)
def test_channel_output_consistent(p, theta):
    out = apply_probe(theta, p)
    np.testing.assert_allclose(partial_trace(out.joint, 0), out.rho_bob, atol=1e-12)
    np.testing.assert_allclose(partial_trace(out.joint, 1), out.rho_eve, atol=1e-12)
    assert np.linalg.matrix_rank(out.joint, tol=1e-9) == 1
    assert is_density(out.rho_bob) and is_density(out.rho_eve)


@given(params, angles)
def test_alpha_beta_interchange(p, theta):
    np.testing.assert_allclose(
        apply_probe(theta, p).rho_eve, apply_probe(theta, p.swapped()).rho_bob, atol=1e-12
    )


@given(params, angles)
def test_general_bob_x_component(p, theta):
    a, b = p.alpha, p.beta
    m = bloch_of(apply_probe(theta, p).rho_bob)
    expected = np.sin(2 * a) * np.cos(2 * b) + np.sin(theta) * np.cos(2 * a) * np.sin(2 * b)
    assert m[0] == pytest.approx(expected, abs=1e-12)


@given(angles)
def test_gamma_zero_is_identity(theta):
    np.testing.assert_allclose(
        apply_probe(theta, IntensityGamma(0.0)).rho_bob, pure_state_density(theta), atol=1e-12
    )


def test_full_intensity_reads_up_down():
    rho_eve = apply_probe(0.0, IntensityGamma(np.pi / 2)).rho_eve
    np.testing.assert_allclose(rho_eve, np.diag([1, 0]), atol=1e-15)


@given(gammas, st.sampled_from([0.0, np.pi]))
def test_no_disturbance_in_up_down_basis(gamma, theta):
    np.testing.assert_allclose(
        apply_probe(theta, IntensityGamma(gamma)).rho_bob, pure_state_density(theta), atol=1e-12
    )


@given(params, angles)
def test_symmetrized_bob_shrinks(p, theta):
    m = bloch_of(symmetrized_bob(theta, p))
    eta = shrink_factor(p)
    np.testing.assert_allclose(m, eta * np.array([np.sin(theta), 0, np.cos(theta)]), atol=1e-12)
    assert ber(p) == pytest.approx((1 - eta) / 2, abs=1e-12)


@given(gammas, angles)
def test_two_axis_average_suffices_for_intensity(gamma, theta):
    p = IntensityGamma(gamma)
    two = symmetrized_bob(theta, p, axes=(SymmetryAxis.UP, SymmetryAxis.RIGHT))
    np.testing.assert_allclose(two, symmetrized_bob(theta, p), atol=1e-12)
    eta = (1 + np.cos(gamma)) / 2
    assert shrink_factor(p) == pytest.approx(eta, abs=1e-12)
    assert ber(p) == pytest.approx((1 - np.cos(gamma)) / 4, abs=1e-12)


def test_shrink_and_ber_examples():
    assert shrink_factor(IDENTITY) == pytest.approx(1)
    assert shrink_factor(VON_NEUMANN) == pytest.approx(0.5)
    assert shrink_factor(IntensityGamma(np.pi / 2)) == pytest.approx(0.5)
    assert ber(IntensityGamma(0)) == pytest.approx(0, abs=1e-15)
    assert ber(IntensityGamma(np.pi / 2)) == pytest.approx(0.25)
    assert ber(VON_NEUMANN) == pytest.approx(0.25)


def test_axes_are_quarter_turns():
    assert [ax.angle for ax in SymmetryAxis] == pytest.approx([0, np.pi / 2, np.pi, 3 * np.pi / 2])


@settings(max_examples=30)
@given(params, angles)
def test_completion_is_irrelevant(p, theta):
    # any other completion of the two fixed columns gives the same channel
    u = probe_unitary(p)
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(np.column_stack([u[:, [0, 2]], rng.normal(size=(4, 2))]))
    alt = u.copy()
    alt[:, [1, 3]] = q[:, 2:]
    assert np.abs(alt.T @ alt - np.eye(4)).max() < 1e-12
    psi_in = np.kron(ket(theta), [1, 0])
    np.testing.assert_allclose(projector(alt @ psi_in), projector(u @ psi_in), atol=1e-12)


def test_identity_strategy_keeps_singlet():
    for sym in (False, True):
        rho = epr_joint(IDENTITY, sym)
        np.testing.assert_allclose(rho, projector(SINGLET), atol=1e-12)
        assert horodecki_m(rho) == pytest.approx(2)


@given(params, st.booleans())
def test_epr_joint_is_state(p, sym):
    assert is_density(epr_joint(p, sym))
    assert is_density(eve_joint(p, sym))


@given(gammas)
def test_unsymmetrized_singlet_overlap(gamma):
    # brute force: (|up,down>|e1> - |down,up>|e0>)/sqrt2 with <e0|e1> = cos(gamma)
    e_up, e_down = ket(np.pi / 2 - gamma), ket(np.pi / 2 + gamma)
    psi = (np.kron(np.kron([1, 0], [0, 1]), e_down) - np.kron(np.kron([0, 1], [1, 0]), e_up)) / np.sqrt(2)
    rho = reduce(psi, (0, 1), (2, 2, 2))
    np.testing.assert_allclose(epr_joint(IntensityGamma(gamma)), rho, atol=1e-12)
    f = np.real(SINGLET @ rho @ SINGLET)
    assert f == pytest.approx((1 + np.cos(gamma)) / 2, abs=1e-12)


def test_eve_joint_at_gamma_zero_uncorrelated():
    rho = eve_joint(IntensityGamma(0.0))
    np.testing.assert_allclose(partial_trace(rho, 0), np.eye(2) / 2, atol=1e-12)
    assert horodecki_m(rho) <= 1 + 1e-12


@pytest.mark.parametrize("p,expected", [(0, (0, 0)), (1, (0.25, 0.5)), (0.5, (0.125, 0.25))])
def test_intercept_resend(p, expected):
    assert intercept_resend(p) == pytest.approx(expected, abs=1e-12)


def test_intercept_resend_rejects_bad_fraction():
    with pytest.raises(ValueError):
        intercept_resend(1.5)


@given(params, angles, st.sampled_from(list(SymmetryAxis)))
def test_axis_conjugation_rotates_channel(p, theta, axis):
    # the conjugated channel acting on a rotated input is the rotated original output
    r = ry(axis.angle)
    out = axis_unitary(p, axis) @ np.kron(r @ ket(theta), [1, 0])
    ref = np.kron(r, r) @ (probe_unitary(p) @ np.kron(ket(theta), [1, 0]))
    np.testing.assert_allclose(out, ref, atol=1e-12)


@given(params, angles)
def test_symmetrized_eve_is_state(p, theta):
    assert is_density(symmetrized_eve(theta, p))
