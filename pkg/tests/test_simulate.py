import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qeve.cloning import pgqcm, uqcm
from qeve.probe import IntensityGamma, ber
from qeve.simulate import (
    EveStrategy,
    SimConfig,
    broadcast_sim,
    report_fields,
    run,
    run_bb84,
    run_ekert,
    to_json,
)


def se(q, n):
    return np.sqrt(q * (1 - q) / n)


def test_no_eve_no_errors():
    for protocol in ("bb84", "ekert"):
        for n in (1, 17, 5000):
            r = run(SimConfig(n, 3, protocol))
            assert r.empirical_q == 0.0
            assert r.sifted_count <= n


def test_sifting_rate_is_half():
    r = run_bb84(SimConfig(100_000, 1))
    assert abs(r.sifted_count - 50_000) <= 4 * np.sqrt(100_000 * 0.25)


def test_symmetrized_intensity_pi3():
    r = run_bb84(SimConfig(100_000, 11, eve=EveStrategy.parse("intensity:1.0471975511965976:sym")))
    assert abs(r.empirical_q - 0.125) <= 3 * se(0.125, r.sifted_count)
    a, b = r.per_basis_q
    pooled = r.empirical_q
    z = abs(a - b) / np.sqrt(pooled * (1 - pooled) * 4 / r.sifted_count)
    assert z < 4


def test_intercept_resend_full():
    r = run_bb84(SimConfig(100_000, 5, eve=EveStrategy.parse("intercept:1")))
    assert abs(r.empirical_q - 0.25) <= 3 * se(0.25, r.sifted_count)
    assert r.eve_guess_rate == pytest.approx(0.75, abs=0.01)
    assert r.empirical_i_ae_lower_bound == pytest.approx(0.5, abs=0.02)


def test_unsymmetrized_basis_asymmetry_bb84():
    gamma = 1.0
    q = ber(IntensityGamma(gamma))
    r = run_bb84(SimConfig(100_000, 2, eve=EveStrategy("intensity", gamma=gamma)))
    assert r.per_basis_q[0] == 0.0
    assert abs(r.per_basis_q[1] - 2 * q) <= 4 * se(2 * q, r.sifted_count / 2)


def test_unsymmetrized_basis_asymmetry_ekert():
    # the Ekert key bases sit at 45 and 90 degrees: errors q and 2q
    gamma = 1.0
    q = ber(IntensityGamma(gamma))
    r = run_ekert(SimConfig(200_000, 2, "ekert", EveStrategy("intensity", gamma=gamma)))
    assert abs(r.per_basis_q[0] - q) < 0.02
    assert abs(r.per_basis_q[1] - 2 * q) < 0.02


def test_ekert_singlet_chsh():
    r = run_ekert(SimConfig(1_000_000, 4, "ekert"))
    assert abs(r.empirical_s - 2 * np.sqrt(2)) <= 3 * r.empirical_s_stderr


@pytest.mark.parametrize("gamma", [0.3, 0.8, 1.3])
def test_ekert_chsh_tracks_closed_form(gamma):
    r = run_ekert(SimConfig(300_000, 9, "ekert", EveStrategy("intensity", gamma=gamma)))
    assert abs(r.empirical_s - np.sqrt(2) * (1 + np.cos(gamma))) <= 4 * r.empirical_s_stderr


def test_protocol_guards():
    with pytest.raises(ValueError):
        run_bb84(SimConfig(10, protocol="ekert"))
    with pytest.raises(ValueError):
        run_ekert(SimConfig(10))
    with pytest.raises(ValueError):
        SimConfig(0)
    with pytest.raises(ValueError):
        SimConfig(10, protocol="b92")


@pytest.mark.parametrize("text", ["", "bogus", "intercept:2", "intensity", "intensity:3",
                                  "general:1", "cloner:perfect", "intensity:0.5:maybe"])
def test_strategy_parse_errors(text):
    with pytest.raises(ValueError):
        EveStrategy.parse(text)


def test_strategy_parse_round_trip():
    for text in ["none", "intercept:0.5", "intensity:0.7:sym", "general:0.1:0.2:unsym",
                 "cloner:uqcm", "cloner:pgqcm_symmetrized:0.2617"]:
        s = EveStrategy.parse(text)
        assert EveStrategy.parse(s.describe()) == s
    assert EveStrategy.parse("intensity:90", degrees=True).gamma == pytest.approx(np.pi / 2)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**63), st.integers(1, 200_000), st.sampled_from(["bb84", "ekert"]))
def test_thread_count_does_not_matter(seed, n, protocol):
    eve = EveStrategy("intensity", gamma=0.6, symmetrized=True)
    a = run(SimConfig(n, seed, protocol, eve, threads=1))
    b = run(SimConfig(n, seed, protocol, eve, threads=3))
    assert a == b


def test_seed_changes_digest():
    a = run(SimConfig(1000, 1))
    b = run(SimConfig(1000, 2))
    assert a.rng_trace_digest != b.rng_trace_digest


@pytest.mark.parametrize("protocol", ["bb84", "ekert"])
@pytest.mark.parametrize("eve", ["intensity:0.9", "general:0.2:0.5:sym", "cloner:uqcm", "intercept:0.6"])
def test_exact_mode_agrees(protocol, eve):
    cfg = dict(n_pulses=10_000, seed=8, protocol=protocol, eve=EveStrategy.parse(eve))
    fast = run(SimConfig(**cfg))
    slow = run(SimConfig(**cfg, exact=True))
    # Bob's marginal uses the same uniforms, so the error counts coincide
    assert fast.empirical_q == slow.empirical_q
    assert abs(fast.eve_guess_rate - slow.eve_guess_rate) <= 5 * se(0.7, fast.sifted_count)


def test_delayed_measurement_helps_eve():
    eve = EveStrategy("general", alpha=0.3, beta=0.2, symmetrized=True)
    late = run(SimConfig(100_000, 1, eve=eve))
    early = run(SimConfig(100_000, 1, eve=eve, delayed=False))
    assert late.empirical_q == early.empirical_q
    assert late.eve_guess_rate > early.eve_guess_rate


def test_rates_in_range():
    for eve in ["intensity:1.2", "cloner:pgqcm", "intercept:0.3"]:
        r = run(SimConfig(20_000, 6, "ekert", EveStrategy.parse(eve)))
        for v in (r.empirical_q, *r.per_basis_q, r.eve_guess_rate):
            assert 0 <= v <= 1
        assert 0 <= r.empirical_i_ae_lower_bound <= 1


def test_uqcm_broadcast():
    res = broadcast_sim(SimConfig(1_000_000, 3, "ekert"), uqcm())
    for bob in (res.bob1, res.bob2):
        assert abs(bob.empirical_s - 4 * np.sqrt(2) / 3) <= 4 * bob.empirical_s_stderr
    assert abs(res.bob_covariance + 1 / 9) <= 4 * res.bob_covariance_stderr
    assert abs(res.bob_covariance) > 4 * res.bob_covariance_stderr


def test_pgqcm_symmetrized_broadcast():
    f = (8 + 3 * np.sqrt(3)) / 16
    res = broadcast_sim(SimConfig(500_000, 4, "ekert"), pgqcm(symmetrized=True))
    for bob in (res.bob1, res.bob2):
        assert abs(bob.empirical_s - 2 * np.sqrt(2) * (2 * f - 1)) <= 4 * bob.empirical_s_stderr


def test_json_is_flat_and_decimal():
    cfg = SimConfig(5000, 1, "ekert", EveStrategy.parse("intensity:0.4"))
    text = to_json(report_fields(cfg, run(cfg)))
    data = json.loads(text)
    assert all(not isinstance(v, (dict, list)) for v in data.values())
    assert "e-" not in text and "e+" not in text
    assert data["config_seed"] == 1 and data["protocol"] == "ekert"
    assert to_json({"x": 1e-7}) == '{\n  "x": 0.0000001\n}\n'


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["intensity_sym", "intercept"])
def test_ber_consistency_over_100_seeds(kind):
    for gamma in np.linspace(np.pi / 10, np.pi / 2, 5):
        if kind == "intercept":
            eve, q = EveStrategy("intercept", fraction=2 * gamma / np.pi), gamma / (2 * np.pi)
        else:
            eve, q = EveStrategy("intensity", gamma=gamma, symmetrized=True), ber(IntensityGamma(gamma))
        hits = sum(
            abs((r := run(SimConfig(10_000, seed, eve=eve))).empirical_q - q) <= 4 * se(q, r.sifted_count)
            for seed in range(100)
        )
        assert hits >= 99
