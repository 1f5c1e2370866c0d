import numpy as np
import pytest
from hypothesis import given, settings

from qeve.entanglement import (
    Q_BELL,
    TILTED_SETTING,
    BellSetting,
    bell_report,
    best_chsh,
    horodecki_threshold,
    q_bell,
    qpa_feasible,
    s_ab_intensity,
    s_ae_intensity,
    singlet_fraction,
)
from qeve.information import gamma_for_ber
from qeve.probe import IntensityGamma, ber, epr_joint, eve_joint
from qeve.states import SINGLET, horodecki_m, projector

from conftest import gammas, random_density, seeds


def test_closed_form_examples():
    assert s_ab_intensity(0) == pytest.approx(2 * np.sqrt(2))
    assert s_ab_intensity(np.pi / 2) == pytest.approx(np.sqrt(2))
    assert s_ae_intensity(0) == 0
    assert s_ae_intensity(np.pi / 3) == pytest.approx(np.sqrt(6))
    assert s_ae_intensity(np.pi / 2) == pytest.approx(2 * np.sqrt(2))


def test_q_bell():
    assert Q_BELL == pytest.approx(0.5 - np.sqrt(2) / 4)
    assert q_bell() == pytest.approx(0.146447, abs=1e-6)


@pytest.mark.parametrize("gamma", np.linspace(0, np.pi / 2, 50))
def test_s_ab_matches_closed_form(gamma):
    rho = epr_joint(IntensityGamma(gamma))
    assert abs(TILTED_SETTING.value(rho)) == pytest.approx(s_ab_intensity(gamma), abs=1e-9)


@given(gammas)
def test_s_ae_measured_value(gamma):
    # the Alice-Eve state is separable; at the tilted setting it gives sqrt2 sin(gamma)
    rho = eve_joint(IntensityGamma(gamma))
    assert abs(TILTED_SETTING.value(rho)) == pytest.approx(np.sqrt(2) * np.sin(gamma), abs=1e-12)
    assert horodecki_m(rho) <= 1 + 1e-12


def test_singlet_best_chsh():
    s, setting = best_chsh(projector(SINGLET))
    assert s == pytest.approx(2 * np.sqrt(2), abs=1e-9)
    assert abs(setting.value(projector(SINGLET))) == pytest.approx(s, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_best_chsh_attains_horodecki(seed):
    rho = random_density(seed, rank=1 + seed % 4)
    s, setting = best_chsh(rho)
    assert s == pytest.approx(2 * np.sqrt(horodecki_m(rho)), abs=1e-6)
    assert abs(setting.value(rho)) == pytest.approx(s, abs=1e-9)


@pytest.mark.parametrize("gamma", np.linspace(0.05, np.pi / 2 - 0.05, 8))
def test_unsymmetrized_violates_up_to_quarter(gamma):
    assert best_chsh(epr_joint(IntensityGamma(gamma)))[0] > 2


def test_symmetrized_just_above_q_bell_is_local():
    g = gamma_for_ber(Q_BELL + 1e-3)
    assert best_chsh(epr_joint(IntensityGamma(g), symmetrized=True))[0] < 2


def test_horodecki_threshold():
    cross = horodecki_threshold(symmetrized=True)
    assert cross.q == pytest.approx(0.14645, abs=1e-4)
    assert horodecki_threshold(symmetrized=False) is None


@given(gammas)
def test_symmetrized_m_above_one_iff_below_q_bell(gamma):
    q = ber(IntensityGamma(gamma))
    m = horodecki_m(epr_joint(IntensityGamma(gamma), symmetrized=True))
    if abs(q - Q_BELL) > 1e-9:
        assert (m > 1) == (q < Q_BELL)


@given(gammas)
def test_singlet_fraction_one_minus_two_q(gamma):
    p = IntensityGamma(gamma)
    for sym in (False, True):
        assert singlet_fraction(epr_joint(p, sym)) == pytest.approx(1 - 2 * ber(p), abs=1e-9)


def test_singlet_fraction_examples():
    assert singlet_fraction(projector(SINGLET)) == pytest.approx(1)
    assert singlet_fraction(epr_joint(IntensityGamma(np.pi / 2))) == pytest.approx(0.5, abs=1e-12)


def test_qpa_examples():
    assert qpa_feasible(projector(SINGLET))
    rho = epr_joint(IntensityGamma(gamma_for_ber(0.20)), symmetrized=True)
    assert qpa_feasible(rho) and horodecki_m(rho) < 1
    assert not qpa_feasible(epr_joint(IntensityGamma(np.pi / 2)))


def test_qpa_boundary_on_grid():
    for g in np.append(np.linspace(0, np.pi / 2, 41), gamma_for_ber(0.25 - 1e-9)):
        p = IntensityGamma(g)
        assert qpa_feasible(epr_joint(p)) == (ber(p) < 0.25)


def test_bell_setting_validation():
    with pytest.raises(ValueError):
        BellSetting([1, 0, 0], [0, 0, 1], [0, 0, 1], [0, 1, 1])


@given(gammas)
def test_bell_report_invariant(gamma):
    r = bell_report(gamma)
    assert r.s_ab <= 2 * np.sqrt(r.horodecki_m) + 1e-6
    assert r.q == pytest.approx((1 - np.cos(gamma)) / 4, abs=1e-12)
