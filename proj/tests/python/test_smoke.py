import math

import numpy as np
import pytest

import aqpt


def test_make_channel_identity():
    chi, tp = aqpt.make_channel("identity")
    assert tp
    assert chi.shape == (4, 4)
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0] = expected[0, 3] = expected[3, 0] = expected[3, 3] = 1.0
    assert np.allclose(chi, expected)
    assert aqpt.purity(chi, True) == pytest.approx(1.0)
    assert aqpt.average_transmittance(chi, True) == pytest.approx(1.0)


def test_representation_round_trip():
    chi, tp = aqpt.make_channel("depol:0.5")
    elements = aqpt.chi_to_kraus(chi, tp)
    chi_back, _ = aqpt.kraus_to_chi(elements)
    assert np.allclose(chi, chi_back, atol=1e-8)


def test_born_rule_consistency():
    chi, tp = aqpt.make_channel(f"waveplate:45,{math.pi / 2}")
    cfg = [0.0, 0.0, 0.0, 0.0]
    p0 = aqpt.outcome_prob(chi, tp, cfg, 0)
    p1 = aqpt.outcome_prob(chi, tp, cfg, 1)
    assert p0 == pytest.approx(0.5, abs=1e-9)
    assert p0 + p1 == pytest.approx(1.0, abs=1e-9)

    rho = aqpt.prepared_state(cfg)
    m0, m1 = aqpt.measurement_povm(cfg)
    rho_out = aqpt.apply_channel(chi, tp, rho)
    assert np.trace(m0 @ rho_out).real == pytest.approx(p0, abs=1e-10)


def test_bures_distance():
    chi_a, _ = aqpt.make_channel("identity")
    assert aqpt.bures_distance_sq(chi_a, chi_a) == pytest.approx(0.0, abs=1e-9)
    assert aqpt.bures_distance_sq(chi_a, 0.5 * chi_a) == pytest.approx(
        3.0 - 2.0 * math.sqrt(2.0)
    )


def test_haar_unitary_is_isometry():
    u = aqpt.haar_random_unitary(8, 2, seed=1)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-10)


def test_fit_waveplate():
    chi, tp = aqpt.make_channel("waveplate:30,1.2")
    theta, delta, residual = aqpt.fit_waveplate(chi, tp)
    assert theta == pytest.approx(30.0, abs=0.01)
    assert delta == pytest.approx(1.2, abs=0.001)
    assert residual < 1e-8


def test_power_law_fit():
    n = [100.0 * 10 ** (i / 10.0) for i in range(30)]
    y = [2.5 * x**-0.8 for x in n]
    fit = aqpt.power_law_fit(n, y, n[0], n[-1])
    assert fit["alpha"] == pytest.approx(-0.8, abs=1e-9)
    assert fit["C"] == pytest.approx(2.5, rel=1e-9)


def test_run_tomography_smoke():
    result = aqpt.run_tomography(
        channel="identity", max_events=2000, particles=60, seed=7
    )
    trace = result["trace"]
    n = trace["N"]
    assert len(n) > 3
    assert all(b > a for a, b in zip(n, n[1:]))
    assert trace["d2_truth"][-1] < trace["d2_truth"][0]
    assert result["estimate_trace_preserving"]
    assert np.allclose(result["estimate"], result["estimate"].conj().T, atol=1e-9)

    again = aqpt.run_tomography(
        channel="identity", max_events=2000, particles=60, seed=7
    )
    assert np.array_equal(result["estimate"], again["estimate"])


def test_run_tomography_lossy_smoke():
    result = aqpt.run_tomography(
        channel="filter:0.5", mode="lossy", max_events=1500, particles=80, seed=3
    )
    assert not result["estimate_trace_preserving"]
    chi = result["estimate"]
    assert np.trace(chi).real <= 2.0 + 1e-9


def test_validation_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        aqpt.make_channel("depol:1.5")
    with pytest.raises(ValueError):
        aqpt.run_tomography(channel="identity", max_events=3)
