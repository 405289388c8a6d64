"""Numerical oracles shared by unit and acceptance tests."""

import numpy as np
from scipy.integrate import simpson

from mmse_disturbance import bounds


def log_simpson(f, lo, hi, points=4001):
    """Simpson rule in u = log t, which keeps 1/t^2 integrands well resolved."""
    if hi <= lo:
        return 0.0
    u = np.linspace(np.log(lo), np.log(hi), points)
    t = np.exp(u)
    return float(simpson(f(t) * t, x=u))


def delta_27_oracle(snr, snr0):
    return log_simpson(lambda g: 1.0 / (g**2 * (1 + g) ** 2), snr, snr0)


def _power_dbound_fast(s, t):
    k = s.kn
    s0 = s.snr0
    d27 = (2 * np.log((1 + s0) / (1 + t)) - 2 * np.log(s0 / t) + 1 / (1 + t) - 1 / (1 + s0) + 1 / t - 1 / s0)
    return s.mmse_cap() + k * (1 / t - 1 / s0) - d27


def delta_35_oracle(s):
    snr_l, _ = bounds.width_report(s)
    return 0.5 * log_simpson(lambda t: 1 / (1 + t) - _power_dbound_fast(s, t), snr_l, s.snr0)


def delta_36_oracle(s, snr):
    snr_l, _ = bounds.width_report(s)
    return 0.5 * log_simpson(lambda t: 1 / (1 + t) - _power_dbound_fast(s, t), min(snr_l, snr), snr)


def c_n_oracle(s, snr, points=20001):
    """Half the integral of the raw piecewise integrand over (0, snr].

    The integrand jumps at snr_L, so each piece is sampled from its own interior.
    """
    snr_l, _ = bounds.width_report(s)
    edges = [0.0] + [e for e in (snr_l, s.snr0) if e < snr] + [snr]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t = np.linspace(a, b, points)
        inner = t.copy()
        inner[0] = a + 1e-12 * (b - a)
        total += simpson([bounds.rate_integrand(s, v) for v in inner], x=t)
    return 0.5 * total
