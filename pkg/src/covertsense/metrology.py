"""Fundamental estimation limits: Gaussian fidelity, quantum Fisher
information by fidelity finite differences, and the classical Fisher
information of the receivers' difference counts.

The fidelity follows the general Gaussian-state formula of Banchi,
Braunstein and Pirandola (PRL 115, 260501), in the square-root convention
F(pure, pure) = |<psi|phi>|.  The finite-difference QFI needs the fidelity
of two nearly identical states resolved far below double precision
(1 - F can be ~1e-14 at operating points of interest), so the QFI path
evaluates the same formula in multi-precision arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath as mp
import numpy as np
import scipy.linalg as sla

from .gaussian import GaussianState, omega
from .protocol import ProtocolVariant, SensingScenario, build_receiver_input
from .receivers import ReceiverStats

QFI_STEPS = (1e-3, 5e-4)
QFI_PRECISION_DPS = 60


class ConvergenceError(RuntimeError):
    """Raised when the finite-difference QFI fails its error budget."""


@dataclass(frozen=True)
class QfiResult:
    """Quantum Fisher information per mode pair and the resulting
    Cramer-Rao variance bound for M pairs."""

    J: float
    qcrb_var: float
    step: float
    richardson_error: float


def gaussian_fidelity(state_a: GaussianState, state_b: GaussianState) -> float:
    """Uhlmann fidelity of two Gaussian states (at most 2 modes needed by
    callers, but the formula is general)."""
    if state_a.n_modes != state_b.n_modes:
        raise ValueError("states must have the same number of modes")
    n = state_a.n_modes
    v1, v2 = state_a.cov, state_b.cov
    om = omega(n)
    sig_sum = (v1 + v2) / 2.0
    sinv = np.linalg.inv(sig_sum)
    vaux = om.T @ sinv @ (om / 4.0 + (v2 / 2.0) @ om @ (v1 / 2.0))
    w = vaux @ om
    m = np.eye(2 * n) + np.linalg.matrix_power(np.linalg.inv(w), 2) / 4.0
    ftot4 = np.linalg.det(2.0 * (sla.sqrtm(m) + np.eye(2 * n)) @ vaux)
    f0_4 = np.real(ftot4) / np.linalg.det(sig_sum)
    if f0_4 < 0.0:
        f0_4 = 0.0
    delta = state_b.mean - state_a.mean
    expo = -float(delta @ np.linalg.inv(v1 + v2) @ delta) / 4.0
    fid = f0_4**0.25 * math.exp(expo)
    return float(min(max(fid, 0.0), 1.0))


def _fidelity_mp(state_a: GaussianState, state_b: GaussianState) -> mp.mpf:
    """Same formula in multi-precision arithmetic; returns an mpf so the
    caller can subtract from 1 without cancellation."""
    n = state_a.n_modes
    with mp.workdps(QFI_PRECISION_DPS):
        om = mp.matrix(omega(n).tolist())
        sig1 = mp.matrix(state_a.cov.tolist()) / 2
        sig2 = mp.matrix(state_b.cov.tolist()) / 2
        sig_sum = sig1 + sig2
        vaux = om.T * (sig_sum**-1) * (om / 4 + sig2 * om * sig1)
        w = vaux * om
        eye = mp.eye(2 * n)
        m = eye + (w**-1) ** 2 / 4
        ftot4 = mp.det(2 * (mp.sqrtm(m) + eye) * vaux)
        f0 = (mp.re(ftot4) / mp.det(sig_sum)) ** mp.mpf("0.25")
        delta = mp.matrix([float(state_b.mean[i] - state_a.mean[i]) for i in range(2 * n)])
        vs = mp.matrix((state_a.cov + state_b.cov).tolist())
        expo = -(delta.T * (vs**-1) * delta)[0] / 4
        return f0 * mp.e**expo


def qfi_of_family(
    state_at: Callable[[float], GaussianState],
    theta: float,
    steps: tuple[float, float] = QFI_STEPS,
) -> QfiResult:
    """QFI of a one-parameter Gaussian family by central finite differences
    of the fidelity, J = lim 8 (1 - F(theta - h/2, theta + h/2)) / h^2,
    with Richardson extrapolation over the two steps."""
    h1, h2 = steps
    estimates = []
    for h in (h1, h2):
        fid = _fidelity_mp(state_at(theta - h / 2.0), state_at(theta + h / 2.0))
        estimates.append(8.0 * float(1 - fid) / h**2)
    j1, j2 = estimates
    j = (4.0 * j2 - j1) / 3.0
    err = abs(j2 - j1) / 3.0
    if j < 0.0 and abs(j) < 1e-30:
        j = 0.0
    if j > 0.0 and err > 1e-3 * j:
        raise ConvergenceError(
            f"finite-difference QFI did not converge (J={j:.3e}, err={err:.3e})"
        )
    return QfiResult(J=max(j, 0.0), qcrb_var=math.nan, step=h2, richardson_error=err)


def qfi_phase(
    scenario: SensingScenario,
    variant: ProtocolVariant,
    steps: tuple[float, float] = QFI_STEPS,
) -> QfiResult:
    """QFI per mode pair of the receiver-input state (returned probe plus
    stored idler/reference, storage loss included) with respect to the
    probed phase; qcrb_var = 1 / (M J)."""
    if scenario.N_S == 0.0:
        return QfiResult(J=0.0, qcrb_var=math.inf, step=steps[1], richardson_error=0.0)

    def state_at(th: float) -> GaussianState:
        return build_receiver_input(scenario.with_(theta=th), variant)

    result = qfi_of_family(state_at, scenario.theta, steps)
    qcrb = math.inf if result.J == 0.0 else 1.0 / (scenario.M * result.J)
    return QfiResult(result.J, qcrb, result.step, result.richardson_error)


def receiver_fisher(stats: ReceiverStats, theta: float) -> float:
    """Classical Fisher information per mode pair of the receiver's
    difference count, from the cosine response law:
    J_rec = A^2 sin^2(theta) / var_diff."""
    if stats.calib_scale == 0.0:
        raise ValueError("degenerate calibration: zero cosine amplitude")
    if stats.var_diff <= 0.0:
        raise ValueError("zero-variance output; Fisher information undefined here")
    return stats.calib_scale**2 * math.sin(theta) ** 2 / stats.var_diff
