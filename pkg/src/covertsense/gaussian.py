"""Symplectic phase-space engine for multimode Gaussian states.

Conventions (fixed once, tested everywhere):

* Quadratures obey ``[x, p] = 2i``, so the vacuum covariance matrix is the
  identity and a thermal state of mean photon number ``n`` has covariance
  ``(2n + 1) I``.
* Vectors are ordered ``(x1, p1, ..., xn, pn)``.
* Photon number of mode ``i``: ``n_i = (tr V_i - 2)/4 + |m_i|^2 / 4`` where
  ``V_i`` is the mode's 2x2 covariance block and ``m_i`` its mean.

All operations are pure: they return new states and never mutate inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

SYMMETRY_TOL = 1e-10
UNCERTAINTY_TOL = 1e-9
SYMPLECTIC_TOL = 1e-9


class StateError(ValueError):
    """Raised when a covariance matrix or mean vector is not a valid state."""


class ModeError(ValueError):
    """Raised when an operation references a mode that does not exist."""


def omega(n_modes: int) -> np.ndarray:
    """Standard symplectic form for n modes in (x1, p1, ...) ordering."""
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = block
    return out


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix (each value >= 1 for
    a physical state in the vacuum-variance-1 convention)."""
    n = cov.shape[0] // 2
    eigs = np.linalg.eigvals(1j * omega(n) @ cov)
    return np.sort(np.abs(eigs))[::2]  # each value appears as a +/- pair


@dataclass(frozen=True)
class GaussianState:
    """A Gaussian state: labeled modes, mean vector, covariance matrix."""

    mode_labels: tuple[str, ...]
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        labels = tuple(self.mode_labels)
        object.__setattr__(self, "mode_labels", labels)
        if len(set(labels)) != len(labels):
            raise ModeError(f"duplicate mode labels: {labels}")
        n = len(labels)
        mean = np.asarray(self.mean, dtype=float).reshape(2 * n)
        cov = np.asarray(self.cov, dtype=float).reshape(2 * n, 2 * n)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise StateError("covariance matrix is not symmetric")
        herm = cov + 1j * omega(n)
        min_eig = float(np.min(np.linalg.eigvalsh(herm)))
        if min_eig < -UNCERTAINTY_TOL * scale:
            raise StateError(
                f"covariance violates the uncertainty relation (min eig {min_eig:.3e})"
            )

    @property
    def n_modes(self) -> int:
        return len(self.mode_labels)

    def mode_index(self, label: str) -> int:
        try:
            return self.mode_labels.index(label)
        except ValueError:
            raise ModeError(f"unknown mode {label!r}; have {self.mode_labels}") from None

    def mode_block(self, label: str) -> tuple[np.ndarray, np.ndarray]:
        """(mean, cov) restricted to one mode."""
        i = 2 * self.mode_index(label)
        return self.mean[i : i + 2].copy(), self.cov[i : i + 2, i : i + 2].copy()

    def cross_block(self, label_a: str, label_b: str) -> np.ndarray:
        ia, ib = 2 * self.mode_index(label_a), 2 * self.mode_index(label_b)
        return self.cov[ia : ia + 2, ib : ib + 2].copy()


@dataclass(frozen=True)
class SymplecticOp:
    """A Gaussian unitary in phase space: r -> S r + d."""

    matrix: np.ndarray
    displacement: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        S = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", S)
        d = self.displacement
        if d is None:
            d = np.zeros(S.shape[0])
        object.__setattr__(self, "displacement", np.asarray(d, dtype=float))
        n = S.shape[0] // 2
        defect = np.linalg.norm(S @ omega(n) @ S.T - omega(n))
        if defect > SYMPLECTIC_TOL * max(1.0, np.linalg.norm(S) ** 2):
            raise StateError(f"matrix is not symplectic (defect {defect:.3e})")

    def compose(self, other: "SymplecticOp") -> "SymplecticOp":
        """self after other: r -> S_self (S_other r + d_other) + d_self."""
        return SymplecticOp(
            self.matrix @ other.matrix,
            self.matrix @ other.displacement + self.displacement,
        )


@dataclass(frozen=True)
class PhotonStats:
    """Photon-number moments for a set of modes."""

    mean: Mapping[str, float]
    variance: Mapping[str, float]
    pairwise_covariances: Mapping[frozenset, float] = field(default_factory=dict)


def vacuum(mode_labels: Sequence[str] | int) -> GaussianState:
    """Vacuum state; accepts a mode count or explicit labels."""
    if isinstance(mode_labels, int):
        if mode_labels < 1:
            raise ValueError("need at least one mode")
        mode_labels = tuple(f"m{i}" for i in range(mode_labels))
    labels = tuple(mode_labels)
    n = len(labels)
    return GaussianState(labels, np.zeros(2 * n), np.eye(2 * n))


def thermal(mean_photons: float, label: str = "m0") -> GaussianState:
    """Single-mode thermal state of the given mean photon number."""
    if mean_photons < 0:
        raise ValueError("mean photon number must be >= 0")
    return GaussianState((label,), np.zeros(2), (2 * mean_photons + 1) * np.eye(2))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state of two disjoint registers."""
    if set(a.mode_labels) & set(b.mode_labels):
        raise ModeError("mode labels overlap")
    n = a.n_modes + b.n_modes
    mean = np.concatenate([a.mean, b.mean])
    cov = np.zeros((2 * n, 2 * n))
    cov[: 2 * a.n_modes, : 2 * a.n_modes] = a.cov
    cov[2 * a.n_modes :, 2 * a.n_modes :] = b.cov
    return GaussianState(a.mode_labels + b.mode_labels, mean, cov)


def append_vacuum(state: GaussianState, label: str) -> GaussianState:
    return tensor(state, vacuum((label,)))


def _embed(state: GaussianState, labels: Sequence[str], small: np.ndarray) -> np.ndarray:
    """Expand a symplectic acting on `labels` to the full mode set."""
    n = state.n_modes
    S = np.eye(2 * n)
    idx = []
    for lab in labels:
        i = 2 * state.mode_index(lab)
        idx.extend([i, i + 1])
    idx = np.array(idx)
    S[np.ix_(idx, idx)] = small
    return S


def apply_symplectic(state: GaussianState, op: SymplecticOp) -> GaussianState:
    S, d = op.matrix, op.displacement
    return GaussianState(state.mode_labels, S @ state.mean + d, S @ state.cov @ S.T)


def phase_symplectic(theta: float) -> np.ndarray:
    """Phase-space rotation for a -> exp(i theta) a."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def beamsplitter_symplectic(transmissivity: float) -> np.ndarray:
    """Two-mode beamsplitter: a -> sqrt(eta) a + sqrt(1-eta) b."""
    t, r = np.sqrt(transmissivity), np.sqrt(1.0 - transmissivity)
    return np.block([[t * np.eye(2), r * np.eye(2)], [-r * np.eye(2), t * np.eye(2)]])


def two_mode_squeeze_symplectic(gain: float) -> np.ndarray:
    """Two-mode squeezer: a -> sqrt(G) a + sqrt(G-1) b^dagger."""
    g, h = np.sqrt(gain), np.sqrt(gain - 1.0)
    Z = np.diag([1.0, -1.0])
    return np.block([[g * np.eye(2), h * Z], [h * Z, g * np.eye(2)]])


def apply_phase(state: GaussianState, mode: str, theta: float) -> GaussianState:
    """Rotate one mode by theta; photon statistics are unchanged."""
    S = _embed(state, [mode], phase_symplectic(theta))
    return apply_symplectic(state, SymplecticOp(S))


def apply_beamsplitter(
    state: GaussianState, mode_a: str, mode_b: str, transmissivity: float
) -> GaussianState:
    """Mix two modes on a beamsplitter of the given transmissivity."""
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError(f"transmissivity must be in [0, 1], got {transmissivity}")
    if mode_a == mode_b:
        raise ModeError("beamsplitter needs two distinct modes")
    S = _embed(state, [mode_a, mode_b], beamsplitter_symplectic(transmissivity))
    return apply_symplectic(state, SymplecticOp(S))


def apply_two_mode_squeeze(
    state: GaussianState, mode_a: str, mode_b: str, gain: float
) -> GaussianState:
    """Two-mode squeezing of gain G >= 1 on (mode_a, mode_b)."""
    if gain < 1.0:
        raise ValueError(f"gain must be >= 1, got {gain}")
    if mode_a == mode_b:
        raise ModeError("two-mode squeezer needs two distinct modes")
    S = _embed(state, [mode_a, mode_b], two_mode_squeeze_symplectic(gain))
    return apply_symplectic(state, SymplecticOp(S))


def apply_thermal_loss(
    state: GaussianState, mode: str, transmissivity: float, added_noise: float = 0.0
) -> GaussianState:
    """Thermal-loss channel, receiver-referred: output photon mean equals
    ``kappa * n_in + added_noise``.

    The equivalent dilation mixes the mode with an environment thermal state
    of mean ``added_noise / (1 - kappa)`` on a beamsplitter of transmissivity
    kappa.  kappa = 0 is rejected as degenerate; use `thermal` to construct
    the replacement state directly.
    """
    kappa = transmissivity
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"transmissivity must be in (0, 1], got {kappa}")
    if added_noise < 0.0:
        raise ValueError("added noise photons must be >= 0")
    i = 2 * state.mode_index(mode)
    n = state.n_modes
    scale = np.ones(2 * n)
    scale[i : i + 2] = np.sqrt(kappa)
    cov = state.cov * np.outer(scale, scale)
    cov[i : i + 2, i : i + 2] += ((1.0 - kappa) + 2.0 * added_noise) * np.eye(2)
    return GaussianState(state.mode_labels, state.mean * scale, cov)


def photon_mean(state: GaussianState, mode: str) -> float:
    m, V = state.mode_block(mode)
    return (np.trace(V) - 2.0) / 4.0 + float(m @ m) / 4.0


def photon_variance(state: GaussianState, mode: str) -> float:
    m, V = state.mode_block(mode)
    var = (np.trace(V @ V) - 2.0) / 8.0 + float(m @ V @ m) / 4.0
    return max(var, 0.0)


def photon_covariance(state: GaussianState, mode_a: str, mode_b: str) -> float:
    """Photon-number covariance between two distinct modes."""
    if mode_a == mode_b:
        return photon_variance(state, mode_a)
    ma, _ = state.mode_block(mode_a)
    mb, _ = state.mode_block(mode_b)
    C = state.cross_block(mode_a, mode_b)
    return float(np.sum(C * C)) / 8.0 + float(ma @ C @ mb) / 4.0


def photon_stats(state: GaussianState, modes: Iterable[str] | None = None) -> PhotonStats:
    """Per-mode photon means/variances and pairwise number covariances,
    via Gaussian (Isserlis) moment reduction."""
    modes = list(modes) if modes is not None else list(state.mode_labels)
    for m in modes:
        state.mode_index(m)
    means = {m: photon_mean(state, m) for m in modes}
    variances = {m: photon_variance(state, m) for m in modes}
    covs = {}
    for i, a in enumerate(modes):
        for b in modes[i + 1 :]:
            covs[frozenset((a, b))] = photon_covariance(state, a, b)
    return PhotonStats(means, variances, covs)


def difference_stats(state: GaussianState, mode_a: str, mode_b: str) -> tuple[float, float]:
    """Mean and variance of the balanced difference count n_a - n_b."""
    if mode_a == mode_b:
        raise ModeError("difference statistics need two distinct modes")
    mean = photon_mean(state, mode_a) - photon_mean(state, mode_b)
    var = (
        photon_variance(state, mode_a)
        + photon_variance(state, mode_b)
        - 2.0 * photon_covariance(state, mode_a, mode_b)
    )
    return mean, max(var, 0.0)


def partial_trace(state: GaussianState, keep_modes: Sequence[str]) -> GaussianState:
    """Marginal state on the kept modes (order as given)."""
    keep = tuple(keep_modes)
    if not keep:
        raise ModeError("must keep at least one mode")
    idx = []
    for lab in keep:
        i = 2 * state.mode_index(lab)
        idx.extend([i, i + 1])
    idx = np.array(idx)
    return GaussianState(keep, state.mean[idx], state.cov[np.ix_(idx, idx)])
