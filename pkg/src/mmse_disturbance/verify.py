"""Invariant suites run over a fixed battery of inputs.

Failures are collected, not raised, so a report always covers every check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import bounds
from .bounds import Scenario
from .design import pam, reference_inputs, xa
from .distributions import Gaussian, InputDistribution, Mixed
from .metrics import (
    all_metrics,
    cov_sq_curve,
    mixed_decompose_check,
    mmse,
    mmse_curve,
    mutual_information,
)
from .quadrature import GaussGrid, build_grid

IMMSE_SNRS = (0.5, 1.0, 2.0, 5.0, 10.0)
SIMPSON_POINTS = 2001
KBOUND_GRID = (1e-2, 1e2, 51)
SCPP_GRID = (1e-3, 1e3, 2001)
SCPP_SNR0 = 5.0
SUITES = ("immse", "scpp", "kbounds", "decomposition", "power")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    observed: float
    tolerance: float
    passed: bool
    detail: str = ""

    @property
    def margin(self) -> float:
        return self.tolerance - self.observed

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        text = f"[{tag}] {self.suite}/{self.name}: observed={self.observed:.3e} tol={self.tolerance:.1e} margin={self.margin:.3e}"
        return f"{text} ({self.detail})" if self.detail else text


def battery() -> dict[str, InputDistribution]:
    ref = reference_inputs()
    out: dict[str, InputDistribution] = {"gaussian1": Gaussian(1.0), "gaussian0.25": Gaussian(0.25)}
    out.update({f"pam{n}": pam(n) for n in (2, 3, 4, 8)})
    out.update({"xa10": xa(10), "xa20": xa(20)})
    out.update(ref)
    return out


def _check(suite, name, observed, tol, detail="") -> CheckResult:
    observed = float(observed)
    return CheckResult(suite, name, observed, tol, bool(observed <= tol), detail)


def immse_errors(x: InputDistribution, snr: float, grid: GaussGrid) -> tuple[float, float]:
    """Central-difference and Simpson residuals of the I-MMSE relation at ``snr``."""
    h = 1e-4 * max(1.0, snr)
    dI = (mutual_information(x, snr + h, grid).value - mutual_information(x, snr - h, grid).value) / (2 * h)
    fd = abs(2 * dI - mmse(x, snr, grid).value)
    g = np.linspace(0.0, snr, SIMPSON_POINTS)
    integral = simpson(mmse_curve(x, g, grid), x=g)
    return fd, abs(integral - 2 * mutual_information(x, snr, grid).value)


def suite_immse(grid: GaussGrid, scale: float = 1.0) -> list[CheckResult]:
    out = []
    tol = 1e-5 * scale
    for name, x in battery().items():
        fd_worst, int_worst = 0.0, 0.0
        for snr in IMMSE_SNRS:
            fd, integ = immse_errors(x, snr, grid)
            fd_worst, int_worst = max(fd_worst, fd), max(int_worst, integ)
        out.append(_check("immse", f"{name}/derivative", fd_worst, tol))
        out.append(_check("immse", f"{name}/integral", int_worst, tol))
    return out


def matched_beta(x: InputDistribution, snr0: float, grid: GaussGrid) -> float:
    """``beta`` whose Gaussian envelope ``beta/(1+beta snr)`` meets ``mmse(x, snr0)``."""
    m = mmse(x, snr0, grid).value
    return m / (1.0 - m * snr0)


def sign_changes(diff: np.ndarray, floor: float = 0.0) -> int:
    s = np.sign(diff[np.abs(diff) > floor])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def scpp_crossings(x: InputDistribution, grid: GaussGrid, snr0: float = SCPP_SNR0) -> int:
    lo, hi, count = SCPP_GRID
    snrs = np.geomspace(lo, hi, count)
    b = matched_beta(x, snr0, grid)
    diff = mmse_curve(x, snrs, grid) - b / (1 + b * snrs)
    return sign_changes(diff)


def suite_scpp(grid: GaussGrid, scale: float = 1.0) -> list[CheckResult]:
    out = []
    bpsk = scpp_crossings(pam(2), grid)
    out.append(CheckResult("scpp", "bpsk/exactly_one_crossing", bpsk, 1, bpsk == 1, f"{bpsk} sign changes"))
    for name, x in battery().items():
        if isinstance(x, Gaussian):
            continue
        n = scpp_crossings(x, grid)
        out.append(CheckResult("scpp", f"{name}/at_most_one_crossing", n, 1, n <= 1, f"{n} sign changes"))
    return out


def suite_kbounds(grid: GaussGrid, scale: float = 1.0) -> list[CheckResult]:
    out = []
    tol = 1e-6 * scale
    lo, hi, count = KBOUND_GRID
    snrs = np.geomspace(lo, hi, count)
    for name, x in battery().items():
        k = snrs**2 * cov_sq_curve(x, snrs, grid)
        out.append(_check("kbounds", f"{name}/k1<=3", (k - 3.0).max(), tol, f"max snr^2 E[Cov^2]={k.max():.4f}"))
        refined = (k - (3.0 - 1.0 / (1.0 + snrs) ** 2)).max()
        out.append(_check("kbounds", f"{name}/k1_power_refined", refined, tol))
        if x.is_power_constrained():
            fisher = 1.0 - snrs * mmse_curve(x, snrs, grid)
            out.append(_check("kbounds", f"{name}/fisher_floor", (1 / (1 + snrs) - fisher).max(), 1e-9 * scale))
    return out


def decomposition_inputs() -> dict[str, Mixed]:
    d1 = reference_inputs()["discrete1"]
    return {
        "mixed_fig4": reference_inputs()["mixed_fig4"],
        "d1_delta0.00909": Mixed(0.00909, d1),
        "pam4_delta0.3": Mixed(0.3, pam(4)),
        "xa10_delta0.05": Mixed(0.05, xa(10)),
    }


def suite_decomposition(grid: GaussGrid, scale: float = 1.0) -> list[CheckResult]:
    out = []
    tol = 1e-8 * scale
    for name, x in decomposition_inputs().items():
        worst_mi, worst_mmse = 0.0, 0.0
        for snr in (0.5, 2.0, 10.0, 50.0):
            r_mi, r_mmse = mixed_decompose_check(x, snr, grid)
            worst_mi, worst_mmse = max(worst_mi, r_mi), max(worst_mmse, r_mmse)
        out.append(_check("decomposition", f"{name}/mi", worst_mi, tol))
        out.append(_check("decomposition", f"{name}/mmse", worst_mmse, tol))
    return out


def suite_power(grid: GaussGrid, scale: float = 1.0) -> list[CheckResult]:
    out = []
    for snr0 in (1.0, 5.0):
        s = Scenario(snr0, 0.01)
        for name, x in battery().items():
            v = bounds.power_implication_check(x, s, grid)
            full_power = x.second_moment() >= 1.0 - 1e-9
            if name.startswith("xa") or name == "gaussian1":
                ok = v.verdict == "no_implication"
            else:
                # a verdict of power_reduced is a proof that E[X^2] < 1
                ok = not (full_power and v.verdict == "power_reduced")
            out.append(CheckResult(
                "power", f"{name}/snr0={snr0:g}", v.sup_cov_sq, v.threshold, ok,
                f"verdict={v.verdict} E[X^2]={x.second_moment():.6g}",
            ))
    for a in (10, 20):
        x = xa(a)
        snrs = np.geomspace(1e-2, 10, 101)
        excess = (mmse_curve(x, snrs, grid) - [bounds.xa_mmse_upper(a, t) for t in snrs]).max()
        out.append(_check("power", f"xa{a}/ceiling", excess, 0.0))
    m = all_metrics(xa(20), 1.0, grid).mmse
    out.append(_check("power", "xa20/full_power_tiny_mmse", m, 1e-12, f"E[X^2]={xa(20).second_moment()!r}"))
    b = bounds.bandemer_power(5.0, 0.5)
    out.append(_check("power", "bandemer(5,0.5)", abs(b - (math.e - 1) / 5), 1e-12))
    return out


_RUNNERS = {
    "immse": suite_immse,
    "scpp": suite_scpp,
    "kbounds": suite_kbounds,
    "decomposition": suite_decomposition,
    "power": suite_power,
}


def run(suite: str = "all", grid: GaussGrid | None = None, scale: float = 1.0) -> list[CheckResult]:
    grid = grid or build_grid()
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        if name not in _RUNNERS:
            raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
        results.extend(_RUNNERS[name](grid, scale))
    return results


def format_report(results: list[CheckResult]) -> str:
    lines = [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
