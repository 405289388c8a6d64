"""Curve bundles behind each figure, with bound-ordering checks before emission."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bounds
from .bounds import Scenario
from .curves import CurveSeries
from .design import design_mixed, pam, reference_inputs, xa
from .distributions import Gaussian
from .metrics import all_metrics, mi_curve, mmse_curve
from .quadrature import GaussGrid

ORDER_TOL = 1e-6


class OrderingViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class FigureDefaults:
    snr0: float | None
    beta: float | None
    grid: tuple[float, float, int]


DEFAULTS = {
    "fig2": FigureDefaults(None, None, (0.01, 100.0, 121)),
    "fig3": FigureDefaults(5.0, 0.01, (0.01, 100.0, 121)),
    "fig4": FigureDefaults(10.0, 0.01, (0.01, 100.0, 121)),
    "fig5a": FigureDefaults(5.0, 0.01, (0.01, 100.0, 121)),
    "fig5b": FigureDefaults(5.0, 0.05, (0.01, 100.0, 121)),
    "fig6": FigureDefaults(None, None, (0.01, 10.0, 101)),
    "fig7": FigureDefaults(60.0, 0.001, (1.0, 1000.0, 51)),
    "fig_assym": FigureDefaults(5.0, 0.1, (0.01, 100.0, 121)),
}
FIG5B_N = (1, 3, 15, 70)


def _with_snr0(snrs: np.ndarray, snr0: float) -> np.ndarray:
    """Grid with ``snr0`` inserted, so boundary values are always emitted."""
    return np.unique(np.append(snrs, snr0))


def _below(curves: dict, key: str, upper: CurveSeries, label: str, tol: float = ORDER_TOL):
    c = curves[key]
    idx = np.searchsorted(upper.snr, c.snr)
    ok = (idx < upper.snr.size) & np.isclose(upper.snr[np.minimum(idx, upper.snr.size - 1)], c.snr)
    excess = c.values[ok] - upper.values[idx[ok]]
    if excess.size and excess.max() > tol:
        worst = int(np.argmax(excess))
        raise OrderingViolation(
            f"{key} exceeds {label} by {excess[worst]:.3g} at snr={c.snr[ok][worst]:.6g}"
        )


def _series(label, snrs, values, norm="none") -> CurveSeries:
    return CurveSeries(label, snrs, np.asarray(values, dtype=float), norm)


def fig2(snrs, grid=None, **_):
    bpsk, gauss = pam(2), Gaussian(1.0)
    out = {
        "gaussian_mi": _series("gaussian_mi", snrs, mi_curve(gauss, snrs), "dof"),
        "bpsk_mi": _series("bpsk_mi", snrs, mi_curve(bpsk, snrs, grid), "dof"),
        "gaussian_mmse": _series("gaussian_mmse", snrs, mmse_curve(gauss, snrs), "mmse_dim"),
        "bpsk_mmse": _series("bpsk_mmse", snrs, mmse_curve(bpsk, snrs, grid), "mmse_dim"),
    }
    _below(out, "bpsk_mi", out["gaussian_mi"], "gaussian_mi")
    _below(out, "bpsk_mmse", out["gaussian_mmse"], "gaussian_mmse")
    return out


def fig3(snrs, s: Scenario, **_):
    snrs = _with_snr0(snrs, s.snr0)
    out = {
        "c_inf": _series("c_inf", snrs, [bounds.c_inf(s, t) for t in snrs], "dof"),
        "gaussian_full": _series("gaussian_full", snrs, 0.5 * np.log1p(snrs), "dof"),
        "gaussian_reduced": _series("gaussian_reduced", snrs, 0.5 * np.log1p(s.beta * snrs), "dof"),
    }
    _below(out, "c_inf", out["gaussian_full"], "gaussian_full")
    _below(out, "gaussian_reduced", out["c_inf"], "c_inf")
    return out


def fig4(snrs, s: Scenario, grid=None, **_):
    snrs = _with_snr0(snrs, s.snr0)
    below = snrs[snrs <= s.snr0]
    out = {
        "m_inf": _series("m_inf", snrs, [bounds.m_inf(s, t) for t in snrs], "mmse_dim"),
        "d_bound": _series("d_bound", below, [bounds.d_bound(s, t, True).value for t in below], "mmse_dim"),
        "gaussian_only": _series("gaussian_only", snrs, s.beta / (1 + s.beta * snrs), "mmse_dim"),
    }
    for name, x in reference_inputs().items():
        out[name] = _series(name, snrs, mmse_curve(x, snrs, grid), "mmse_dim")
        own = _series("lmmse_own", snrs, [bounds.lmmse_bound(t, x.var()) for t in snrs])
        _below(out, name, own, f"lmmse at power {x.var():.6g}")
        if out[name].at(s.snr0) <= s.mmse_cap():
            _below(out, name, out["d_bound"], "d_bound")
    _below(out, "gaussian_only", out["m_inf"], "m_inf")
    _below(out, "gaussian_only", out["d_bound"], "d_bound")
    return out


def _mn_series(s: Scenario, snrs, label) -> CurveSeries:
    return _series(label, snrs, [bounds.mn_envelope(s, t) for t in snrs], "mmse_dim")


def fig5a(snrs, s: Scenario, **_):
    snrs = _with_snr0(snrs, s.snr0)
    below = snrs[snrs <= s.snr0]
    out = {
        "m_inf": _series("m_inf", snrs, [bounds.m_inf(s, t) for t in snrs], "mmse_dim"),
        "lmmse": _series("lmmse", snrs, 1 / (1 + snrs), "mmse_dim"),
        "d_bound": _series("d_bound", below, [bounds.d_bound(s, t).value for t in below], "mmse_dim"),
        "d_bound_power": _series(
            "d_bound_power", below, [bounds.d_bound(s, t, True).value for t in below], "mmse_dim"
        ),
        "mn_bound": _mn_series(s, snrs, "mn_bound"),
        "gaussian_only": _series("gaussian_only", snrs, s.beta / (1 + s.beta * snrs), "mmse_dim"),
    }
    _below(out, "d_bound_power", out["d_bound"], "d_bound")
    _below(out, "mn_bound", out["lmmse"], "lmmse")
    _below(out, "gaussian_only", out["mn_bound"], "mn_bound")
    return out


def fig5b(snrs, s: Scenario, **_):
    snrs = _with_snr0(snrs, s.snr0)
    out = {
        "m_inf": _series("m_inf", snrs, [bounds.m_inf(s, t) for t in snrs], "mmse_dim"),
        "lmmse": _series("lmmse", snrs, 1 / (1 + snrs), "mmse_dim"),
        "gaussian_only": _series("gaussian_only", snrs, s.beta / (1 + s.beta * snrs), "mmse_dim"),
    }
    for n in FIG5B_N:
        key = f"mn_bound_n{n}"
        out[key] = _mn_series(Scenario(s.snr0, s.beta, n), snrs, key)
        _below(out, key, out["lmmse"], "lmmse")
        _below(out, "gaussian_only", out[key], key)
    return out


def fig6(snrs, grid=None, **_):
    out = {"lmmse": _series("lmmse", snrs, 1 / (1 + snrs))}
    for a in (10, 20):
        out[f"xa{a}_mmse"] = _series(f"xa{a}_mmse", snrs, mmse_curve(xa(a), snrs, grid))
        out[f"xa{a}_upper"] = _series(f"xa{a}_upper", snrs, [bounds.xa_mmse_upper(a, t) for t in snrs])
        _below(out, f"xa{a}_mmse", out[f"xa{a}_upper"], f"xa{a}_upper")
        _below(out, f"xa{a}_mmse", out["lmmse"], "lmmse")
    return out


def fig7(snrs, s: Scenario, grid=None, **_):
    snrs = _with_snr0(snrs, s.snr0)
    mixed, gaps = [], []
    for t in snrs:
        x, rep = design_mixed(s, t, grid)
        mixed.append(all_metrics(x, t, grid).mi)
        gaps.append(rep.gap_nats)
    upper = np.array([bounds.c_n_upper(s, t) for t in snrs])
    out = {
        "c_inf": _series("c_inf", snrs, [bounds.c_inf(s, t) for t in snrs], "dof"),
        "c_n_upper": _series("c_n_upper", snrs, upper, "dof"),
        "mixed_input": _series("mixed_input", snrs, mixed, "dof"),
        "gaussian_reduced": _series("gaussian_reduced", snrs, 0.5 * np.log1p(s.beta * snrs), "dof"),
        "gap_cap": _series("gap_cap", snrs, gaps),
    }
    _below(out, "c_n_upper", out["c_inf"], "c_inf")
    _below(out, "mixed_input", out["c_n_upper"], "c_n_upper")
    _below(out, "gaussian_reduced", out["c_n_upper"], "c_n_upper")
    lower_plus_gap = _series("mixed_plus_gap", snrs, np.array(mixed) + np.array(gaps))
    _below(out, "c_n_upper", lower_plus_gap, "mixed_input + gap")
    return out


def fig_assym(snrs, s: Scenario, **_):
    snrs = _with_snr0(snrs, s.snr0)
    out = {"c_inf": _series("c_inf", snrs, [bounds.c_inf(s, t) for t in snrs], "dof")}
    for n in FIG5B_N:
        sn = Scenario(s.snr0, s.beta, n)
        key = f"c_n_upper_n{n}"
        out[key] = _series(key, snrs, [bounds.c_n_upper(sn, t) for t in snrs], "dof")
        _below(out, key, out["c_inf"], "c_inf")
    return out


FIGURES = {
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5a": fig5a,
    "fig5b": fig5b,
    "fig6": fig6,
    "fig7": fig7,
    "fig_assym": fig_assym,
}


def build_figure(name: str, snrs=None, snr0: float | None = None, beta: float | None = None,
                 grid: GaussGrid | None = None) -> dict[str, CurveSeries]:
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    d = DEFAULTS[name]
    if snrs is None:
        lo, hi, count = d.grid
        snrs = np.geomspace(lo, hi, count)
    snrs = np.asarray(snrs, dtype=float)
    s = None
    if d.snr0 is not None:
        s = Scenario(snr0 if snr0 is not None else d.snr0, beta if beta is not None else d.beta)
    return FIGURES[name](snrs, s=s, grid=grid)
