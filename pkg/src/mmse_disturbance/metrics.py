"""MMSE, mutual information and conditional-variance moments of scalar inputs.

All quantities refer to ``Y = sqrt(snr) X + Z`` with ``Z ~ N(0, 1)``; information
is in nats.  Finitely supported inputs (and mixed inputs, via the decomposition)
go through one engine: conditioned on the discrete label ``i`` the output is
``N(mu_i, s^2)`` and the input is Gaussian with mean ``a_i + b (y - mu_i)`` and
variance ``v``.  Expectations over ``Y`` are taken per label against ``N(0, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, softmax

from .distributions import Discrete, Gaussian, InputDistribution, Mixed
from .quadrature import GaussGrid, build_grid


@dataclass(frozen=True)
class MetricValue:
    value: float
    snr: float
    quad_order: int

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class _Stats:
    mmse: float
    mi: float
    cov_sq: float


def _grid(grid: GaussGrid | None) -> GaussGrid:
    return build_grid() if grid is None else grid


def _check_snr(snr: float) -> float:
    snr = float(snr)
    if not snr >= 0 or not np.isfinite(snr):
        raise ValueError(f"snr must be a finite nonnegative number, got {snr}")
    return snr


def _label_stats(probs, mu, s, a, b, v, grid: GaussGrid) -> _Stats:
    """Posterior statistics for the label-conditional Gaussian model.

    ``mi`` here is ``I(label; Y)``; callers add the within-label part.
    """
    probs = np.asarray(probs, dtype=float)
    log_p = np.log(probs)
    z = grid.nodes
    # d[i, j] = mu_i - mu_j ; y = mu_i + s z under label i
    d = mu[:, None] - mu[None, :]
    # log p_j + log phi_s(y - mu_j) - log phi_s(y - mu_i), shape (i, q, j)
    expo = log_p[None, None, :] - (
        d[:, None, :] ** 2 + 2.0 * s * d[:, None, :] * z[None, :, None]
    ) / (2.0 * s * s)
    lse = logsumexp(expo, axis=-1)
    w = softmax(expo, axis=-1)
    # conditional means under each label j evaluated at y = mu_i + s z
    m = a[None, None, :] + b * (d[:, None, :] + s * z[None, :, None])
    m_bar = np.sum(w * m, axis=-1)
    post_var = v + np.sum(w * (m - m_bar[..., None]) ** 2, axis=-1)
    mi = -float(probs @ grid.expect(lse))
    mmse = float(probs @ grid.expect(post_var))
    cov_sq = float(probs @ grid.expect(post_var**2))
    return _Stats(mmse=mmse, mi=max(mi, 0.0), cov_sq=cov_sq)


def _discrete_stats(x: Discrete, snr: float, grid: GaussGrid) -> _Stats:
    if x.size == 1:
        return _Stats(0.0, 0.0, 0.0)
    mu = np.sqrt(snr) * x.atoms
    return _label_stats(x.probs, mu, 1.0, x.atoms, 0.0, 0.0, grid)


_BATCH_ELEMS = 1 << 22


def _discrete_batch(x: Discrete, snrs: np.ndarray, grid: GaussGrid) -> tuple[np.ndarray, ...]:
    """Vectorized :func:`_discrete_stats` over positive ``snrs`` (chunked to bound memory)."""
    K = x.size
    out = np.zeros((3, snrs.size))
    if K == 1:
        return out[0], out[1], out[2]
    log_p = np.log(x.probs)
    z = grid.nodes
    chunk = max(1, _BATCH_ELEMS // (K * K * z.size))
    for lo in range(0, snrs.size, chunk):
        sq = np.sqrt(snrs[lo:lo + chunk])[:, None, None, None]
        # d[s, i, j] = sqrt(snr_s) (x_i - x_j)
        dx = (x.atoms[:, None] - x.atoms[None, :])[None, :, None, :]
        d = sq * dx
        expo = log_p - (d**2 + 2.0 * d * z[None, None, :, None]) / 2.0
        top = expo.max(axis=-1, keepdims=True)
        e = np.exp(expo - top)
        tot = e.sum(axis=-1)
        lse = top[..., 0] + np.log(tot)
        w = e / tot[..., None]
        m = x.atoms
        m_bar = np.sum(w * m, axis=-1)
        post_var = np.sum(w * (m - m_bar[..., None]) ** 2, axis=-1)
        out[0, lo:lo + chunk] = grid.expect(post_var) @ x.probs
        out[1, lo:lo + chunk] = np.maximum(-(grid.expect(lse) @ x.probs), 0.0)
        out[2, lo:lo + chunk] = grid.expect(post_var**2) @ x.probs
    return out[0], out[1], out[2]


def _batch(x: InputDistribution, snrs, grid: GaussGrid) -> tuple[np.ndarray, ...]:
    snrs = np.array([_check_snr(s) for s in np.atleast_1d(snrs)], dtype=float)
    if isinstance(x, Gaussian):
        m = x.variance / (1.0 + x.variance * snrs)
        return m, 0.5 * np.log1p(x.variance * snrs), m * m
    mm, mi, cs = (np.zeros(snrs.size) for _ in range(3))
    zero = snrs == 0.0
    var = x.var()
    mm[zero], cs[zero] = var, var * var
    pos = ~zero
    if isinstance(x, Discrete):
        mm[pos], mi[pos], cs[pos] = _discrete_batch(x, snrs[pos], grid)
        return mm, mi, cs
    if not isinstance(x, Mixed):
        raise TypeError(f"unsupported input {type(x).__name__}")
    if x.delta == 1.0:
        return _batch(Gaussian(1.0), snrs, grid)
    dlt = x.delta
    s = snrs[pos]
    g = 1.0 + dlt * s
    sd = discrete_snr(dlt, s)
    dm, dmi, dcs = _discrete_batch(x.discrete, sd, grid)
    mm[pos] = (1 - dlt) / g**2 * dm + dlt / g
    mi[pos] = dmi + 0.5 * np.log1p(dlt * s)
    cs[pos] = 2 * dlt * (1 - dlt) / g**3 * dm + (1 - dlt) ** 2 / g**4 * dcs + dlt**2 / g**2
    return mm, mi, cs


def _mixed_direct_stats(x: Mixed, snr: float, points_per_sd: int = 40) -> _Stats:
    """Metrics of the full mixture density of ``Y``, integrated on a dense ``y`` grid.

    Deliberately avoids both the decomposition and the per-label Gauss-Hermite
    rule so it can serve as an independent check of them.
    """
    dlt = x.delta
    xd = x.discrete
    s2 = 1.0 + snr * dlt
    s = np.sqrt(s2)
    mu = np.sqrt(snr * (1.0 - dlt)) * xd.atoms
    a = np.sqrt(1.0 - dlt) * xd.atoms
    b = dlt * np.sqrt(snr) / s2
    v = dlt / s2
    y = np.arange(mu[0] - 14 * s, mu[-1] + 14 * s, s / points_per_sd)
    log_joint = np.log(xd.probs)[None, :] - 0.5 * (y[:, None] - mu[None, :]) ** 2 / s2 - 0.5 * np.log(2 * np.pi * s2)
    log_py = logsumexp(log_joint, axis=1)
    py = np.exp(log_py)
    w = np.exp(log_joint - log_py[:, None])
    m = a[None, :] + b * (y[:, None] - mu[None, :])
    m_bar = np.sum(w * m, axis=1)
    post_var = v + np.sum(w * (m - m_bar[:, None]) ** 2, axis=1)
    h_y = -np.trapezoid(py * log_py, y)
    mi = h_y - 0.5 * np.log(2 * np.pi * np.e)
    return _Stats(
        float(np.trapezoid(py * post_var, y)),
        float(mi),
        float(np.trapezoid(py * post_var**2, y)),
    )


def discrete_snr(delta: float, snr: float) -> float:
    """SNR seen by the discrete part of a mixed input."""
    return snr * (1.0 - delta) / (1.0 + delta * snr)


def _mixed_stats(x: Mixed, snr: float, grid: GaussGrid) -> _Stats:
    dlt = x.delta
    g = 1.0 + dlt * snr
    if dlt == 1.0:
        return _Stats(1.0 / (1.0 + snr), 0.5 * np.log1p(snr), 1.0 / (1.0 + snr) ** 2)
    sd = discrete_snr(dlt, snr)
    st = _discrete_stats(x.discrete, sd, grid) if sd > 0 else _Stats(x.discrete.var(), 0.0, x.discrete.var() ** 2)
    mmse = (1 - dlt) / g**2 * st.mmse + dlt / g
    mi = st.mi + 0.5 * np.log1p(dlt * snr)
    # minus the snr-derivative of the decomposed mmse
    cov_sq = (
        2 * dlt * (1 - dlt) / g**3 * st.mmse
        + (1 - dlt) ** 2 / g**4 * st.cov_sq
        + dlt**2 / g**2
    )
    return _Stats(mmse, mi, cov_sq)


def _stats(x: InputDistribution, snr: float, grid: GaussGrid) -> _Stats:
    if isinstance(x, Gaussian):
        m = x.variance / (1.0 + x.variance * snr)
        return _Stats(m, 0.5 * np.log1p(x.variance * snr), m * m)
    if snr == 0.0:
        var = x.var()
        return _Stats(var, 0.0, var * var)
    if isinstance(x, Discrete):
        return _discrete_stats(x, snr, grid)
    if isinstance(x, Mixed):
        return _mixed_stats(x, snr, grid)
    raise TypeError(f"unsupported input {type(x).__name__}")


def mmse(x: InputDistribution, snr: float, grid: GaussGrid | None = None) -> MetricValue:
    """Minimum mean square error of estimating ``x`` from ``sqrt(snr) x + Z``.

    At ``snr = 0`` this is the variance of ``x`` (equal to the power for the
    zero-mean inputs used throughout).
    """
    grid = _grid(grid)
    snr = _check_snr(snr)
    return MetricValue(_stats(x, snr, grid).mmse, snr, grid.order)


def mutual_information(x: InputDistribution, snr: float, grid: GaussGrid | None = None) -> MetricValue:
    grid = _grid(grid)
    snr = _check_snr(snr)
    return MetricValue(_stats(x, snr, grid).mi, snr, grid.order)


def cov_sq_moment(x: InputDistribution, snr: float, grid: GaussGrid | None = None) -> float:
    """``E[Var(X | Y)^2]``, which equals minus the snr-derivative of the MMSE."""
    grid = _grid(grid)
    snr = _check_snr(snr)
    if snr == 0.0 and not isinstance(x, Gaussian):
        raise ValueError("cov_sq_moment needs snr > 0 for non-Gaussian inputs")
    return _stats(x, snr, grid).cov_sq


def fisher_info(x: InputDistribution, snr: float, grid: GaussGrid | None = None) -> float:
    """Fisher information of the output, ``J(Y) = 1 - snr * mmse``."""
    snr = _check_snr(snr)
    if snr == 0.0:
        return 1.0
    return 1.0 - snr * mmse(x, snr, grid).value


def cov_sq_upper_fourth(x: InputDistribution, snr: float) -> float:
    """Moment bound on ``E[Var(X | Y)^2]`` that stays finite as snr -> 0."""
    snr = _check_snr(snr)
    m2 = x.second_moment()
    m4 = x.fourth_moment()
    linear = (m4 + 6 * snr * m2 + 3 * snr**2) / (1 + snr) ** 4
    return float(min(linear, m4))


def all_metrics(x: InputDistribution, snr: float, grid: GaussGrid | None = None) -> _Stats:
    """mmse, MI and ``E[Cov^2]`` from a single quadrature pass."""
    return _stats(x, _check_snr(snr), _grid(grid))


def mixed_direct(x: Mixed, snr: float) -> _Stats:
    """Mixed-input metrics from the joint mixture density (no decomposition)."""
    return _mixed_direct_stats(x, _check_snr(snr))


def mixed_decompose_check(x: Mixed, snr: float, grid: GaussGrid | None = None) -> tuple[float, float]:
    """Absolute MI and MMSE residuals between the direct and decomposed routes."""
    if not isinstance(x, Mixed):
        raise TypeError("mixed_decompose_check needs a Mixed input")
    grid = _grid(grid)
    snr = _check_snr(snr)
    if x.delta == 0.0 or snr == 0.0:
        return 0.0, 0.0
    direct = _mixed_direct_stats(x, snr)
    split = _mixed_stats(x, snr, grid)
    return abs(direct.mi - split.mi), abs(direct.mmse - split.mmse)


def mmse_curve(x: InputDistribution, snrs, grid: GaussGrid | None = None) -> np.ndarray:
    return _batch(x, snrs, _grid(grid))[0]


def mi_curve(x: InputDistribution, snrs, grid: GaussGrid | None = None) -> np.ndarray:
    return _batch(x, snrs, _grid(grid))[1]


def cov_sq_curve(x: InputDistribution, snrs, grid: GaussGrid | None = None) -> np.ndarray:
    """``E[Cov^2]`` along ``snrs``; all entries must be positive for non-Gaussian inputs."""
    snrs = np.atleast_1d(np.asarray(snrs, dtype=float))
    if not isinstance(x, Gaussian) and np.any(snrs <= 0):
        raise ValueError("cov_sq_moment needs snr > 0 for non-Gaussian inputs")
    return _batch(x, snrs, _grid(grid))[2]
