"""Closed-form bounds for the MMSE-constrained Gaussian channel.

A :class:`Scenario` fixes the constraint point ``snr0``, the MMSE level
``beta`` (the cap is ``beta / (1 + beta snr0)``) and the block length ``n``.
Everything here is explicit arithmetic except :func:`power_implication_check`,
which needs quadrature metrics of a concrete input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Discrete, InputDistribution
from .quadrature import GaussGrid

MAX_PAM = 64


class UnconstrainedScenario(ValueError):
    """Raised where ``beta = 0`` makes the phase-transition formulas degenerate."""


class DivergentGap(ValueError):
    """Raised when the gap constants diverge (``beta = 0``)."""


@dataclass(frozen=True)
class Scenario:
    snr0: float
    beta: float
    n: int = 1

    def __post_init__(self):
        if not self.snr0 > 0:
            raise ValueError("snr0 must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")

    def mmse_cap(self) -> float:
        return self.beta / (1.0 + self.beta * self.snr0)

    @property
    def kn(self) -> float:
        return self.n + 2.0


@dataclass(frozen=True)
class BoundReport:
    snr: float
    kn: float
    delta: float
    value: float
    kind: str


@dataclass(frozen=True)
class ScppBound:
    value: float
    direction: str  # "upper" for snr >= snr0, "lower" below


@dataclass(frozen=True)
class GapReport:
    regime: str
    c1: float
    c2: float
    c3: float
    N: int
    delta_mix: float
    gap_nats: float
    degenerate: bool = False


def _positive(snr: float) -> float:
    snr = float(snr)
    if not snr > 0:
        raise ValueError(f"snr must be positive, got {snr}")
    return snr


def lmmse_bound(snr: float, power: float = 1.0) -> float:
    """``min(1/snr, P/(1 + P snr))``."""
    snr = float(snr)
    gauss = power / (1.0 + power * snr)
    return gauss if snr <= 0 else min(1.0 / snr, gauss)


def m_inf(s: Scenario, snr: float) -> float:
    snr = _positive(snr)
    if snr < s.snr0:
        return 1.0 / (1.0 + snr)
    return s.beta / (1.0 + s.beta * snr)


def c_inf(s: Scenario, snr: float) -> float:
    snr = _positive(snr)
    b = s.beta
    ratio = (1.0 + b * snr) / (1.0 + b * s.snr0)
    return 0.5 * max(math.log(ratio), 0.0) + 0.5 * math.log1p(min(snr, s.snr0))


def delta_27(snr: float, snr0: float) -> float:
    """Integral of ``1 / (g^2 (1 + g)^2)`` over ``[snr, snr0]``."""
    return (
        2 * math.log((1 + snr0) / (1 + snr))
        - 2 * math.log(snr0 / snr)
        + 1 / (1 + snr)
        - 1 / (1 + snr0)
        + 1 / snr
        - 1 / snr0
    )


def d_bound(s: Scenario, snr: float, with_power: bool = False) -> BoundReport:
    """MMSE ceiling below the constraint point, from integrating the derivative bound."""
    snr = _positive(snr)
    if snr > s.snr0:
        raise ValueError("d_bound holds for snr <= snr0; use scpp_envelope above it")
    base = s.mmse_cap() + s.kn * (1.0 / snr - 1.0 / s.snr0)
    if not with_power:
        return BoundReport(snr, s.kn, 0.0, base, "d_bound")
    delta = delta_27(snr, s.snr0)
    kn = s.kn - 1.0 / (1.0 + snr) ** 2
    return BoundReport(snr, kn, delta, base - delta, "d_bound_power")


def scpp_envelope(s: Scenario, snr: float) -> ScppBound:
    snr = _positive(snr)
    value = s.beta / (1.0 + s.beta * snr)
    return ScppBound(value, "upper" if snr >= s.snr0 else "lower")


def width_report(s: Scenario) -> tuple[float, float]:
    """Intersection ``snr_L`` of the D-bound with ``1/snr`` and the width ``snr0 - snr_L``."""
    if s.beta == 0:
        raise UnconstrainedScenario("beta = 0: the phase-transition point is not defined")
    kn, b, s0 = s.kn, s.beta, s.snr0
    ratio = kn / (kn - 1.0)
    snr_l = s0 * (1 + b * s0) / (ratio + b * s0)
    width = (1.0 / (kn - 1.0)) * s0 / (ratio + b * s0)
    return snr_l, width


def delta_35(s: Scenario) -> float:
    """Rate correction above ``snr0`` (does not depend on ``snr``)."""
    snr_l, _ = width_report(s)
    s0, b, k = s.snr0, s.beta, s.kn
    gap = s0 - snr_l
    return (
        0.5 * math.log((1 + s0) / (1 + snr_l))
        - 0.5 * b * gap / (1 + b * s0)
        - 0.5 * k * math.log(s0 / snr_l)
        + k * gap / (2 * s0)
        + 0.5
        * (
            (2 * snr_l + 1) * math.log(s0 * (1 + snr_l) / (snr_l * (1 + s0)))
            - gap / (1 + s0)
            - gap / s0
        )
    )


def delta_36(s: Scenario, snr: float) -> float:
    """Rate correction at or below ``snr0``."""
    snr = _positive(snr)
    snr_l, _ = width_report(s)
    s0, b, k = s.snr0, s.beta, s.kn
    lo = min(snr_l, snr)
    gap = snr - lo
    return (
        0.5 * math.log((1 + snr) / (1 + lo))
        - b * gap / (2 * (1 + b * s0))
        - 0.5 * k * math.log(snr / lo)
        + k * gap / (2 * s0)
        + 0.5
        * (
            (2 * lo + 1) * math.log((1 + lo) / lo)
            - (2 * snr + 1) * math.log((1 + snr) / snr)
            + 2 * gap * math.log((1 + s0) / s0)
            - gap / s0
            - gap / (1 + s0)
        )
    )


def rate_correction(s: Scenario, snr: float) -> float:
    return delta_35(s) if snr >= s.snr0 else delta_36(s, snr)


def c_n_upper(s: Scenario, snr: float) -> float:
    """Upper bound on the constrained rate for block length ``n``.

    The correction can dip slightly below zero just above ``snr_L``; the rate can
    never exceed ``c_inf``, so only a positive correction is subtracted.
    """
    snr = _positive(snr)
    value = c_inf(s, snr) - max(rate_correction(s, snr), 0.0)
    return max(value, 0.5 * math.log1p(s.beta * snr))


def mn_envelope(s: Scenario, snr: float) -> float:
    """Piecewise MMSE ceiling for block length ``n``.

    Between ``snr_L`` and ``snr0`` this is the smaller of ``1/(1+snr)`` and the
    power-refined D-bound; :func:`c_n_upper` integrates the D-bound alone there,
    which is slightly looser.
    """
    snr_l, _ = width_report(s)
    if snr <= snr_l:
        return 1.0 / (1.0 + snr)
    if snr <= s.snr0:
        return min(1.0 / (1.0 + snr), d_bound(s, snr, with_power=True).value)
    return s.beta / (1.0 + s.beta * snr)


def rate_integrand(s: Scenario, snr: float) -> float:
    """Integrand whose half-integral over ``[0, snr]`` equals ``c_inf - rate_correction``."""
    snr_l, _ = width_report(s)
    if snr <= snr_l:
        return 1.0 / (1.0 + snr)
    if snr <= s.snr0:
        return d_bound(s, snr, with_power=True).value
    return s.beta / (1.0 + s.beta * snr)


def pam_constraint_cap(s: Scenario, delta: float) -> float:
    """MMSE ceiling for the discrete part of a mixed input at its own SNR."""
    b, s0 = s.beta, s.snr0
    if delta < 0 or delta > 1:
        raise ValueError("delta must lie in [0, 1]")
    if delta > b:
        raise ValueError(f"delta={delta} exceeds beta={b}: no mixed input meets the cap")
    if delta == b:
        return 0.0
    return (b - delta) * (1 + delta * s0) / ((1 - delta) * (1 + b * s0))


def discrete_mmse_upper(x: Discrete, snr: float) -> float:
    """``d_max^2 sum_i p_i exp(-snr d_i^2 / 8)``."""
    if x.size == 1:
        return 0.0
    d = x.nearest_distances()
    return float(x.d_max**2 * (x.probs @ np.exp(-snr * d**2 / 8.0)))


def discrete_mi_lower(x: Discrete, mmse_value: float) -> float:
    """Entropy-minus-penalty lower bound on the rate of a discrete input.

    Uses the ``pi e / 6`` shaping constant; with ``pi / 6`` the bound would exceed
    the entropy as the MMSE vanishes.
    """
    if x.size == 1:
        return 0.0
    return (
        x.entropy()
        - 0.5 * math.log(math.pi * math.e / 6.0)
        - 0.5 * math.log1p(12.0 / x.d_min**2 * mmse_value)
    )


def xa_mmse_upper(a: float, snr: float) -> float:
    if a < 1:
        raise ValueError("a must be at least 1")
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    return min(1.0, 4.0 * (a * a + 1.0) * math.exp(-a * a * snr / 8.0))


def bandemer_power(snr0: float, R: float) -> float:
    """Optimal Gaussian power when the disturbance is measured by mutual information."""
    if R < 0:
        raise ValueError("R must be nonnegative")
    return min(1.0, math.expm1(2.0 * R) / snr0)


# -- mixed-input gap constants ------------------------------------------------

def weak_delta(s: Scenario) -> float:
    return s.beta * s.snr0 / (1.0 + s.snr0)


def weak_c1(s: Scenario, delta: float) -> float:
    b, s0 = s.beta, s.snr0
    arg = 12 * (1 - delta) * (1 + b * s0) / ((1 + s0 * delta) * (b - delta))
    lg = max(math.log(arg), 0.0)
    return math.inf if lg == 0 else 3.0 / (2.0 * lg)


def strong_c(s: Scenario) -> float:
    b, s0 = s.beta, s.snr0
    return 3.0 / (2.0 * math.log(12 * (1 + b * s0) / b))


def pam_size(c: float, snr_eff: float) -> int:
    if math.isinf(c):
        return MAX_PAM
    return int(min(MAX_PAM, math.floor(math.sqrt(1.0 + c * snr_eff))))


def gap_cap_weak(s: Scenario) -> float:
    b, s0 = s.beta, s.snr0
    inner = (2.0 / 3.0) * math.log(24 * (1 + (1 - b) * s0) / b) + 6 * b / (1 + b * s0)
    return 0.5 * math.log(inner) + 0.5 * math.log(4 * math.pi / 3) - delta_35(s)


def gap_cap_strong(s: Scenario, snr: float) -> float:
    b, s0 = s.beta, s.snr0
    inner = 1 + (2.0 / 3.0) * math.log(12 * (1 + b * s0) / b)
    return 0.5 * math.log(inner) + 0.5 * math.log(4 * math.pi * math.e / 6) - delta_36(s, snr)


def gap_report(s: Scenario, snr: float) -> GapReport:
    """Mixed-input parameters and the additive-gap ceiling at ``snr``."""
    snr = _positive(snr)
    if s.beta == 0:
        raise DivergentGap("beta = 0: log(1/beta) diverges, no finite gap")
    c2 = strong_c(s)
    c3 = c2
    delta_w = weak_delta(s)
    c1 = weak_c1(s, delta_w) if delta_w < s.beta else math.inf
    if snr >= s.snr0:
        n_pts = pam_size(c1, (1 - delta_w) * s.snr0 / (1 + delta_w * s.snr0))
        delta_mix = delta_w
    else:
        n_pts = pam_size(c2, snr)
        delta_mix = 0.0
    if snr <= 1:
        regime, cap = "low", 0.5 * math.log(2.0)
    elif snr >= s.snr0:
        if s.snr0 < 1:
            raise ValueError("the weak-interference gap needs snr >= snr0 >= 1")
        regime, cap = "weak", gap_cap_weak(s)
    else:
        regime, cap = "strong", gap_cap_strong(s, snr)
    return GapReport(regime, c1, c2, c3, n_pts, delta_mix, cap, degenerate=n_pts < 2)


# -- does the MMSE constraint force a power reduction? -----------------------

@dataclass(frozen=True)
class PowerVerdict:
    verdict: str  # power_reduced | no_implication | indeterminate
    sup_cov_sq: float
    threshold: float
    bounded_near_zero: bool


def power_implication_check(x: InputDistribution, s: Scenario, grid: GaussGrid | None = None, points: int = 101) -> PowerVerdict:
    """Sufficient condition for the cap at ``snr0`` to imply ``E[X^2] < 1``.

    Compares ``sup E[Cov^2(X, g)]`` over a log grid in ``(1e-4 snr0, snr0)`` with
    ``(1 - mmse(x, snr0)) / snr0``.
    """
    from .metrics import all_metrics, cov_sq_moment

    gammas = np.logspace(math.log10(1e-4 * s.snr0), math.log10(s.snr0), points)
    cov = np.array([cov_sq_moment(x, g, grid) for g in gammas])
    threshold = (1.0 - all_metrics(x, s.snr0, grid).mmse) / s.snr0
    low = cov[: points // 4 + 1]
    bounded = bool(np.all(np.isfinite(low)) and low.max() <= x.fourth_moment() + 1e-9)
    sup = float(cov.max())
    if not bounded:
        verdict = "indeterminate"
    elif sup < threshold:
        verdict = "power_reduced"
    else:
        verdict = "no_implication"
    return PowerVerdict(verdict, sup, threshold, bounded)
