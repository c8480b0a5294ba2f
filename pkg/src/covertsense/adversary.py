"""Willie's side: thermal-state discrimination bounds, the exact optimal
photon-counting test, the covertness parameter, and square-root-law
schedules.

The covertness parameter is defined through quantum relative entropy and
Pinsker's inequality, epsilon = sqrt(M D(rho1 || rho0) / 8), preserving
the operational guarantee P_e >= 1/2 - epsilon.  In the weak-probe,
bright-background regime it scales as sqrt(M) N_S / N_B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.optimize import brentq, minimize_scalar
from scipy.stats import nbinom, norm

from .protocol import SensingScenario, ProtocolVariant, willie_brightnesses

EXACT_COUNT_LIMIT = 1e6  # expected total counts above which we switch to CLT
NS_SOLVER_CAP = 10.0


@dataclass(frozen=True)
class DetectionTest:
    """Outcome of Willie's threshold test on the total photon count."""

    threshold: int
    pe: float
    method: str  # "exact_threshold" or "gaussian_approx"


@dataclass(frozen=True)
class CovertnessReport:
    n0: float
    n1: float
    M: int
    epsilon: float
    pe_lower_fidelity: float
    pe_exact: float
    method: str
    rel_entropy_per_mode: float

    def csv_row(self) -> dict:
        return {
            "n0": self.n0,
            "n1": self.n1,
            "M": self.M,
            "epsilon": self.epsilon,
            "pe_lower": self.pe_lower_fidelity,
            "pe_exact": self.pe_exact,
            "method": self.method,
        }


def _g_entropy(n: float) -> float:
    """Bosonic entropy function g(n) = (n+1) ln(n+1) - n ln n."""
    if n <= 0.0:
        return 0.0
    return (n + 1.0) * math.log(n + 1.0) - n * math.log(n)


def thermal_rel_entropy(n_a: float, n_b: float) -> float:
    """Quantum relative entropy D(thermal(n_a) || thermal(n_b)) in nats.

    The textbook expression -g(n_a) + n_a ln((n_b+1)/n_b) + ln(n_b+1)
    cancels catastrophically in the covert regime (|n_a - n_b| / n_b down
    to ~1e-7, D down to ~1e-14), so it is rearranged into the equivalent
    D = n_a log1p(d/n_b) - (n_a+1) log1p(d/(n_b+1)) with d = n_a - n_b,
    and for very small contrasts evaluated by its power series
    D = sum_{k>=1} (-1)^(k+1) d^(k+1) / (k(k+1)) * (n_b^-k - (n_b+1)^-k),
    whose leading term is the small-difference law d^2 / (2 n_b (n_b+1)).
    """
    if n_a < 0.0 or n_b < 0.0:
        raise ValueError("thermal means must be >= 0")
    if n_b == 0.0:
        if n_a == 0.0:
            return 0.0
        raise ValueError("divergence is infinite against a vacuum null state")
    if n_a == 0.0:
        return math.log(n_b + 1.0)
    d = n_a - n_b
    if d == 0.0:
        return 0.0
    if abs(d) < 1e-3 * n_b:
        total, dk = 0.0, d
        for k in range(1, 12):
            dk *= d  # d^(k+1)
            term = dk / (k * (k + 1)) * (n_b**-k - (n_b + 1.0) ** -k)
            if k % 2 == 0:
                term = -term
            total += term
            if abs(term) < 1e-18 * abs(total):
                break
        return max(total, 0.0)
    val = n_a * math.log1p(d / n_b) - (n_a + 1.0) * math.log1p(d / (n_b + 1.0))
    return max(val, 0.0)


def epsilon_of(scenario: SensingScenario, variant: ProtocolVariant | None = None) -> float:
    """Covertness parameter via the relative-entropy/Pinsker route.

    The variant is accepted for interface symmetry; Willie's marginals are
    identical across variants by construction."""
    del variant
    n0, n1 = willie_brightnesses(scenario)
    if n1 == n0:
        return 0.0
    return math.sqrt(scenario.M * thermal_rel_entropy(n1, n0) / 8.0)


def _thermal_infidelity_gap(n0: float, n1: float) -> float:
    """1/F - 1 for single-mode thermal states, computed without the
    catastrophic cancellation of the textbook sqrt((n0+1)(n1+1)) -
    sqrt(n0 n1) at nearly equal brightnesses: the exact rearrangement is
    (sqrt(n1) - sqrt(n0))^2 / (sqrt((n0+1)(n1+1)) + sqrt(n0 n1) + 1)."""
    if n0 == n1:
        return 0.0
    s = (n1 - n0) / (math.sqrt(n1) + math.sqrt(n0))
    return s * s / (math.sqrt((n0 + 1.0) * (n1 + 1.0)) + math.sqrt(n0 * n1) + 1.0)


def thermal_fidelity(n0: float, n1: float) -> float:
    """Closed-form single-mode thermal-state fidelity (sqrt convention),
    F = 1/(sqrt((n0+1)(n1+1)) - sqrt(n0 n1))."""
    if n0 < 0 or n1 < 0:
        raise ValueError("thermal means must be >= 0")
    return 1.0 / (1.0 + _thermal_infidelity_gap(n0, n1))


def pe_lower_bound(n0: float, n1: float, m_copies: int) -> float:
    """Fidelity-based lower bound on the detection error probability for
    discriminating M-fold thermal products at equal priors:
    P_e >= (1 - sqrt(1 - F^(2M))) / 2.

    Evaluated in log space so the covert regime (1 - F down to ~1e-14,
    M up to ~1e9) keeps full precision."""
    if n0 < 0 or n1 < 0:
        raise ValueError("thermal means must be >= 0")
    log_f = -math.log1p(_thermal_infidelity_gap(n0, n1))
    one_minus_f2m = -math.expm1(2.0 * m_copies * log_f)
    return 0.5 * (1.0 - math.sqrt(max(0.0, one_minus_f2m)))


def _pe_threshold_exact(n0: float, n1: float, m: int) -> DetectionTest:
    """Exact Bayes-optimal threshold test on the negative-binomial total
    count; the likelihood ratio is monotone so only the crossing threshold
    and its neighbors need checking."""
    p0, p1 = 1.0 / (n0 + 1.0), 1.0 / (n1 + 1.0)
    if n0 == 0.0:
        # any nonzero count certifies the probe
        pe = 0.5 * math.exp(m * math.log(p1))
        return DetectionTest(threshold=1, pe=pe, method="exact_threshold")
    # LR(k) >= 1  <=>  k >= m * ln((n1+1)/(n0+1)) / ln(n1 (n0+1) / (n0 (n1+1)))
    t_star = m * math.log((n1 + 1.0) / (n0 + 1.0)) / math.log(
        (n1 * (n0 + 1.0)) / (n0 * (n1 + 1.0))
    )
    candidates = sorted(
        {max(0, int(math.floor(t_star)) + d) for d in (-1, 0, 1, 2)}
    )
    best_t, best_pe = 0, 0.5
    for t in candidates:
        # decide H1 iff count >= t
        pe = 0.5 * (nbinom.sf(t - 1, m, p0) + nbinom.cdf(t - 1, m, p1))
        if pe < best_pe:
            best_t, best_pe = t, pe
    return DetectionTest(threshold=best_t, pe=min(best_pe, 0.5), method="exact_threshold")


def _pe_threshold_gaussian(n0: float, n1: float, m: int) -> DetectionTest:
    mu0, mu1 = m * n0, m * n1
    s0 = math.sqrt(m * n0 * (n0 + 1.0))
    s1 = math.sqrt(m * n1 * (n1 + 1.0))

    def pe_at(t: float) -> float:
        return 0.5 * (norm.sf(t, mu0, s0) + norm.cdf(t, mu1, s1))

    res = minimize_scalar(pe_at, bounds=(mu0, mu1), method="bounded")
    pe = min(float(res.fun), 0.5)
    return DetectionTest(threshold=int(round(res.x)), pe=pe, method="gaussian_approx")


def pe_optimal_counting(
    n0: float, n1: float, m_copies: int, window_count: int = 1
) -> DetectionTest:
    """Error probability of Willie's optimal measurement: direct photon
    counting with the Bayes-optimal threshold on the total count over
    M * window_count thermal modes.

    Uses the exact negative-binomial summation while the expected count is
    at most 1e6; beyond that a Gaussian (CLT) approximation takes over and
    the result is flagged accordingly."""
    if window_count < 1:
        raise ValueError("window_count must be >= 1")
    if not n1 > n0 >= 0.0:
        if n0 == n1:
            return DetectionTest(threshold=0, pe=0.5, method="exact_threshold")
        raise ValueError("need n1 > n0 >= 0")
    m = int(m_copies) * int(window_count)
    if m * n1 <= EXACT_COUNT_LIMIT:
        return _pe_threshold_exact(n0, n1, m)
    return _pe_threshold_gaussian(n0, n1, m)


def solve_ns_for_epsilon(
    epsilon_target: float, scenario: SensingScenario, ns_cap: float = NS_SOLVER_CAP
) -> float:
    """Invert epsilon_of for the probe brightness at fixed channel and M.

    epsilon_of is strictly increasing in N_S, so a bracketed root search
    suffices; raises if the target is unreachable below the cap."""
    if epsilon_target < 0.0:
        raise ValueError("epsilon target must be >= 0")
    if epsilon_target == 0.0:
        return 0.0

    def gap(n_s: float) -> float:
        return epsilon_of(scenario.with_(N_S=n_s)) - epsilon_target

    if gap(ns_cap) < 0.0:
        raise ValueError(
            f"epsilon target {epsilon_target} unreachable with N_S <= {ns_cap}"
        )
    root = brentq(gap, 0.0, ns_cap, xtol=1e-300, rtol=1e-12)
    return float(root)


def sqrt_law_schedule(
    constant: float, t_grid: Sequence[float], scenario: SensingScenario,
    ns_cap: float = NS_SOLVER_CAP,
) -> list[SensingScenario]:
    """Scenarios holding kappa * N_S * sqrt(M) = constant across a grid of
    interrogation times (the square-root law), so covertness stays flat
    while total signal grows only as sqrt(M)."""
    if constant <= 0.0:
        raise ValueError("schedule constant must be > 0")
    out = []
    for t in t_grid:
        sc = scenario.with_(T=float(t))
        n_s = constant / (sc.kappa * math.sqrt(sc.M))
        if n_s > ns_cap:
            raise ValueError(
                f"schedule needs N_S={n_s:.3g} at T={t}, above the cap {ns_cap}"
            )
        out.append(sc.with_(N_S=n_s))
    return out


def covertness_report(
    scenario: SensingScenario,
    variant: ProtocolVariant | None = None,
    window_count: int = 1,
) -> CovertnessReport:
    """Full adversary-side summary for one scenario point."""
    n0, n1 = willie_brightnesses(scenario)
    m = scenario.M
    test = pe_optimal_counting(n0, n1, m, window_count)
    rel = thermal_rel_entropy(n1, n0) if n1 > 0 or n0 == 0 else math.inf
    return CovertnessReport(
        n0=n0,
        n1=n1,
        M=m,
        epsilon=epsilon_of(scenario, variant),
        pe_lower_fidelity=pe_lower_bound(n0, n1, m),
        pe_exact=test.pe,
        method=test.method,
        rel_entropy_per_mode=rel,
    )
