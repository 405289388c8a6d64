"""Input families: unit-power PAM, the X_a family, mixed inputs, published inputs.

Also the text format used to store finitely supported and mixed inputs::

    # name=discrete1            (optional)
    # discrete N=3 power=1.0000216806280002
    # delta=0.0090909090909090905   (mixed inputs only)
    -1.8412 0.1111
    ...
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import bisect

from . import bounds
from .bounds import GapReport, Scenario
from .distributions import MAX_ATOMS, Discrete, Gaussian, InputDistribution, Mixed
from .metrics import discrete_snr, mmse
from .quadrature import GaussGrid


class InfeasibleDesign(ValueError):
    """A constructed input violates the MMSE cap, or no input of the family can meet it."""


class NoCrossing(ValueError):
    pass


def pam(N: int) -> Discrete:
    """Uniform, zero-mean, unit-power PAM with ``N`` points."""
    if int(N) != N or not 1 <= N <= MAX_ATOMS:
        raise ValueError(f"PAM size must be an integer in [1, {MAX_ATOMS}], got {N}")
    N = int(N)
    if N == 1:
        return Discrete([0.0], [1.0], name="pam1")
    d = math.sqrt(12.0 / (N * N - 1))
    atoms = (np.arange(N) - (N - 1) / 2.0) * d
    return Discrete(atoms, np.full(N, 1.0 / N), name=f"pam{N}")


def xa(a: float) -> Discrete:
    """Three-point unit-power input ``{-a, 0, a}`` with outer masses ``1/(2a^2)``."""
    if not a >= 1:
        raise ValueError("a must be at least 1")
    outer = 1.0 / (2.0 * a * a)
    if a == 1:
        return Discrete([-1.0, 1.0], [0.5, 0.5], name="xa1")
    return Discrete([-a, 0.0, a], [outer, 1.0 - 2.0 * outer, outer], name=f"xa{a:g}")


_PUBLISHED = {
    "discrete1": ([-1.8412, -1.7386, 0.5594], [0.1111, 0.1274, 0.7615]),
    "discrete2": ([-1.4689, -1.1634, 0.7838], [0.1282, 0.2542, 0.6176]),
}


def _renormalized(atoms, probs, name) -> Discrete:
    probs = np.array(probs, dtype=float)
    probs[-1] = 1.0 - probs[:-1].sum()
    return Discrete(atoms, probs, name=name)


def reference_inputs() -> dict[str, InputDistribution]:
    """Published three-point inputs and the mixed input built on the first one."""
    d1 = _renormalized(*_PUBLISHED["discrete1"], "discrete1")
    d2 = _renormalized(*_PUBLISHED["discrete2"], "discrete2")
    return {
        "discrete1": d1,
        "discrete2": d2,
        "mixed_fig4": Mixed(0.01 * 10.0 / 11.0, d1),
    }


def published_probabilities(name: str) -> np.ndarray:
    return np.array(_PUBLISHED[name][1])


def design_mixed(s: Scenario, snr: float, grid: GaussGrid | None = None, delta: float | None = None,
                 tol: float = 1e-6) -> tuple[Mixed, GapReport]:
    """Mixed input with PAM discrete part, sized for the regime of ``snr``.

    ``delta`` overrides the Gaussian share; values at or above ``beta`` leave no
    room for the discrete part and are rejected.
    """
    report = bounds.gap_report(s, snr)
    if delta is None:
        delta = report.delta_mix
        n_pts = report.N
    else:
        if delta >= s.beta:
            raise InfeasibleDesign(f"delta={delta} >= beta={s.beta}: the discrete part has no MMSE headroom")
        cap_d = bounds.pam_constraint_cap(s, delta)
        lg = math.log(12.0 / cap_d) if cap_d > 0 else math.inf
        c = 3.0 / (2.0 * lg) if lg > 0 else math.inf
        n_pts = bounds.pam_size(c, discrete_snr(delta, s.snr0))
    x = Mixed(delta, pam(n_pts))
    achieved = mmse(x, s.snr0, grid).value
    if achieved > s.mmse_cap() + tol:
        raise InfeasibleDesign(
            f"designed input has mmse {achieved:.6g} at snr0={s.snr0}, cap is {s.mmse_cap():.6g}"
        )
    return x, report


def intersect_power_bound(s: Scenario, xtol: float = 1e-14) -> float:
    """SNR where ``1/(1+snr)`` meets the power-refined D-bound, by bisection."""
    if not 0 < s.beta < 1:
        raise ValueError("intersect_power_bound needs 0 < beta < 1")

    def f(t):
        return 1.0 / (1.0 + t) - bounds.d_bound(s, t, with_power=True).value

    lo, hi = 1e-6 * s.snr0, s.snr0 * (1 - 1e-9)
    if not (f(lo) < 0 < f(hi)):
        raise NoCrossing(f"no sign change of the bound difference on [{lo:g}, {hi:g}]")
    root = bisect(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(f(root)) > 1e-10:
        raise NoCrossing(f"bisection stalled with residual {f(root):.3g}")
    return float(root)


# -- text format ----------------------------------------------------------------

def dump_input(x: InputDistribution, name: str | None = None, extra: dict | None = None) -> str:
    if isinstance(x, Gaussian):
        raise TypeError("Gaussian inputs have no atom list to serialize")
    xd = x.discrete if isinstance(x, Mixed) else x
    lines = []
    if name:
        lines.append(f"# name={name}")
    lines.append(f"# discrete N={xd.size} power={xd.second_moment():.17g}")
    if isinstance(x, Mixed):
        lines.append(f"# delta={x.delta:.17g}")
    for key, val in (extra or {}).items():
        lines.append(f"# {key}={val}")
    lines += [f"{a:.17g} {p:.17g}" for a, p in zip(xd.atoms, xd.probs)]
    return "\n".join(lines) + "\n"


def _parse_block(lines: list[str]) -> tuple[str | None, InputDistribution, dict]:
    name = None
    delta = None
    meta = {}
    atoms, probs = [], []
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("discrete"):
                continue
            for tok in body.split():
                key, sep, val = tok.partition("=")
                if not sep:
                    raise ValueError(f"malformed header token {tok!r}")
                if key == "name":
                    name = val
                elif key == "delta":
                    delta = float(val)
                else:
                    meta[key] = val
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"expected 'atom probability', got {line!r}")
        atoms.append(float(parts[0]))
        probs.append(float(parts[1]))
    xd = Discrete(atoms, probs, name=name or "")
    x = xd if delta is None else Mixed(delta, xd)
    return name, x, meta


def load_input(text: str) -> InputDistribution:
    return _parse_block(text.splitlines())[1]


def dump_catalog(catalog: dict[str, InputDistribution]) -> str:
    return "".join(dump_input(x, name=k) for k, x in catalog.items())


def load_catalog(text: str) -> dict[str, InputDistribution]:
    blocks: list[list[str]] = []
    for line in text.splitlines():
        if line.strip().startswith("# name=") or not blocks:
            blocks.append([])
        blocks[-1].append(line)
    out = {}
    for i, block in enumerate(blocks):
        name, x, _ = _parse_block(block)
        out[name or f"input{i}"] = x
    return out
