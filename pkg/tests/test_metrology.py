import math

import numpy as np
import pytest

from covertsense import gaussian as g
from covertsense.metrology import (
    gaussian_fidelity,
    qfi_of_family,
    qfi_phase,
    receiver_fisher,
)
from covertsense.protocol import ProtocolVariant, SensingScenario, tmsv
from covertsense.receivers import pcr_stats


def coherent(alpha_sq: float, phase: float = 0.0) -> g.GaussianState:
    amp = 2.0 * math.sqrt(alpha_sq)
    mean = np.array([amp * math.cos(phase), amp * math.sin(phase)])
    return g.GaussianState(("a",), mean, np.eye(2))


def test_fidelity_identical_states():
    st = g.thermal(0.7)
    assert gaussian_fidelity(st, st) == pytest.approx(1.0, abs=1e-9)


def test_fidelity_coherent_overlap():
    # |<alpha|beta>| = exp(-|alpha-beta|^2/2)
    a, b = coherent(0.5), coherent(0.5, phase=0.8)
    alpha = math.sqrt(0.5)
    dist2 = 2 * 0.5 * (1 - math.cos(0.8))
    assert gaussian_fidelity(a, b) == pytest.approx(math.exp(-dist2 / 2), rel=1e-9)


def test_fidelity_thermal_closed_form():
    from covertsense.adversary import thermal_fidelity

    a, b = g.thermal(0.4, "a"), g.thermal(1.1, "a")
    assert gaussian_fidelity(a, b) == pytest.approx(thermal_fidelity(0.4, 1.1), rel=1e-9)


def test_fidelity_two_mode_pure_overlap():
    # TMSV at different phases: overlap has closed form via the state overlap
    st1 = tmsv(0.3)
    st2 = g.apply_phase(tmsv(0.3), "S", 0.4)
    fid = gaussian_fidelity(st1, st2)
    # <psi(0)|psi(theta)> = (1 - lam^2) / |1 - lam^2 e^(i theta)| with lam^2 = N/(N+1)
    lam2 = 0.3 / 1.3
    expected = (1 - lam2) / abs(1 - lam2 * np.exp(1j * 0.4))
    assert fid == pytest.approx(expected, rel=1e-8)


def test_fidelity_mode_count_mismatch():
    with pytest.raises(ValueError):
        gaussian_fidelity(g.thermal(0.1), g.vacuum(("a", "b")))


def test_qfi_pure_tmsv_phase():
    # phase on one arm of a lossless TMSV: J = 4 Var(n) = 4 N_S (N_S + 1)
    sc = SensingScenario(
        N_S=0.2, N_B=0.0, kappa_T=1.0, kappa_E=1.0, kappa_I=1.0, W=1e6, T=1e-3
    )
    res = qfi_phase(sc, ProtocolVariant.ENTANGLED)
    assert res.J == pytest.approx(4 * 0.2 * 1.2, rel=1e-6)
    assert res.qcrb_var == pytest.approx(1.0 / (sc.M * res.J), rel=1e-12)


def test_qfi_pure_coherent_phase():
    # coherent probe: J = 4 N_S
    sc = SensingScenario(
        N_S=0.3, N_B=0.0, kappa_T=1.0, kappa_E=1.0, kappa_I=1.0, W=1e6, T=1e-3
    )
    res = qfi_phase(sc, ProtocolVariant.COHERENT_BASELINE)
    assert res.J == pytest.approx(4 * 0.3, rel=1e-6)


def test_qfi_noisy_asymptotic_law():
    # weak probe in bright background: J -> 4 kappa N_S (N_S+1) / (N_B+1)
    sc = SensingScenario()
    res = qfi_phase(sc, ProtocolVariant.ENTANGLED)
    law = 4 * sc.kappa * sc.N_S * (sc.N_S + 1) / (sc.N_B + 1)
    assert res.J == pytest.approx(law, rel=0.02)
    assert res.richardson_error < 1e-3 * res.J


def test_qfi_classical_bright_reference_law():
    sc = SensingScenario()
    res = qfi_phase(sc, ProtocolVariant.CLASSICAL_THERMAL)
    law = 4 * sc.kappa * sc.N_S / (2 * sc.N_B + 1)
    assert res.J == pytest.approx(law, rel=0.02)


def test_qfi_zero_probe():
    res = qfi_phase(SensingScenario(N_S=0.0), ProtocolVariant.ENTANGLED)
    assert res.J == 0.0
    assert math.isinf(res.qcrb_var)


def test_qfi_of_family_on_explicit_rotation():
    def family(theta):
        return g.apply_phase(tmsv(0.15), "S", theta)

    res = qfi_of_family(family, 0.9)
    assert res.J == pytest.approx(4 * 0.15 * 1.15, rel=1e-6)


def test_receiver_fisher_matches_theory_inverse():
    sc = SensingScenario(theta=1.1)
    stats = pcr_stats(sc)
    j = receiver_fisher(stats, sc.theta)
    from covertsense.receivers import theory_mse

    _, var_theta = theory_mse(stats, 1)
    assert j == pytest.approx(1.0 / var_theta, rel=1e-10)


def test_receiver_never_beats_qcrb():
    sc = SensingScenario()
    stats = pcr_stats(sc)
    j_rec = receiver_fisher(stats, sc.theta)
    j_q = qfi_phase(sc, ProtocolVariant.ENTANGLED).J
    assert j_rec <= j_q * (1.0 + 1e-6)
