import math

import numpy as np
import pytest

from covertsense.protocol import ProtocolVariant, SensingScenario
from covertsense.receivers import (
    CalibrationError,
    cosine_estimator,
    hr_stats,
    pcr_stats,
    receiver_stats,
    theory_mse,
)

from conftest import oracle_hr_stats, oracle_pcr_stats

DESK = SensingScenario(
    N_S=0.08, N_B=0.3, kappa_T=1.0, kappa_E=0.6, kappa_I=0.9, theta=0.7, G_pc=1.1, N_R=0.8
)


@pytest.mark.parametrize("stats_fn", [pcr_stats, hr_stats])
def test_cosine_response_law(stats_fn):
    base = stats_fn(DESK)
    amp = base.calib_scale
    for theta in np.linspace(0.0, math.pi, 9):
        st = stats_fn(DESK.with_(theta=float(theta)))
        assert st.mean_diff == pytest.approx(amp * math.cos(theta), abs=1e-12)


def test_calibration_amplitude_is_theta_zero_mean():
    st = pcr_stats(DESK.with_(theta=0.0))
    assert st.mean_diff == pytest.approx(st.calib_scale, rel=1e-12)


def test_receiver_stats_dispatch():
    assert receiver_stats(DESK, ProtocolVariant.ENTANGLED).variant is ProtocolVariant.ENTANGLED
    assert (
        receiver_stats(DESK, ProtocolVariant.CLASSICAL_THERMAL).variant
        is ProtocolVariant.CLASSICAL_THERMAL
    )
    with pytest.raises(ValueError):
        receiver_stats(DESK, ProtocolVariant.COHERENT_BASELINE)


def test_zero_probe_degenerate_calibration():
    with pytest.raises(CalibrationError):
        pcr_stats(DESK.with_(N_S=0.0))


def test_cosine_estimator_scaling():
    st = pcr_stats(DESK)
    m = DESK.M
    sample = cosine_estimator(st, m, m * st.calib_scale * math.cos(0.7))
    assert sample.cos_hat == pytest.approx(math.cos(0.7), rel=1e-12)
    assert sample.theta_hat == pytest.approx(0.7, rel=1e-12)


def test_cosine_estimator_clamps_out_of_range():
    st = pcr_stats(DESK)
    sample = cosine_estimator(st, 10, 1e9)
    assert sample.theta_hat == 0.0


def test_theory_mse_scales_inverse_m():
    st = pcr_stats(DESK)
    v1, t1 = theory_mse(st, 1000)
    v2, t2 = theory_mse(st, 4000)
    assert v1 / v2 == pytest.approx(4.0, rel=1e-12)
    assert t1 / t2 == pytest.approx(4.0, rel=1e-12)


def test_theory_mse_singular_at_theta_zero():
    st = pcr_stats(DESK.with_(theta=1e-9))
    with pytest.raises(ValueError):
        theory_mse(st, 100, theta=0.0)


def test_entangled_beats_classical_at_reference_point():
    sc = SensingScenario()
    _, ve = theory_mse(pcr_stats(sc), sc.M)
    _, vc = theory_mse(hr_stats(sc), sc.M)
    assert ve < vc


def test_pcr_matches_fock_oracle():
    mean_f, var_f, deficit = oracle_pcr_stats(DESK, (18, 10, 12))
    st = pcr_stats(DESK)
    assert deficit < 1e-6
    assert abs(st.mean_diff - mean_f) / (1 + abs(mean_f)) < 1e-5
    assert abs(st.var_diff - var_f) / (1 + abs(var_f)) < 1e-5


def test_hr_matches_fock_oracle():
    mean_f, var_f, deficit = oracle_hr_stats(DESK, (26, 26))
    st = hr_stats(DESK)
    assert deficit < 1e-6
    assert abs(st.mean_diff - mean_f) / (1 + abs(mean_f)) < 1e-5
    assert abs(st.var_diff - var_f) / (1 + abs(var_f)) < 1e-5
