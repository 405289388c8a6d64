"""Coordinate hill-climb over N-atom inputs for the max-MMSE and max-I problems.

Parameters are the atom positions and ``N - 1`` logits (the last logit is pinned
to zero).  Each move perturbs a single coordinate; a move is kept only when it
stays feasible (unit power, MMSE cap at ``snr0``) and strictly improves the
objective.  The search runs at a cheaper quadrature order than the final
certification, so feasibility during search keeps a small safety margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import softmax

from . import bounds
from .bounds import Scenario
from .design import pam
from .distributions import POWER_TOL, Discrete, InputDistribution, Mixed
from .metrics import all_metrics
from .quadrature import GaussGrid, build_grid

MAX_MMSE = "max_mmse"
MAX_MI = "max_mi"
SEARCH_ORDER = 200
CAP_MARGIN = 1e-7
MIN_GAP = 1e-6


class InfeasibleStart(ValueError):
    """No starting point satisfies the MMSE cap."""


@dataclass(frozen=True)
class SearchConfig:
    N: int
    objective: str
    snr_eval: float
    scenario: Scenario
    seed: int = 0
    restarts: int = 4
    step0: float = 0.2
    decay: float = 0.5
    levels: int = 8
    max_iters_per_level: int = 400
    delta: float = 0.0  # Gaussian share when searching inside a mixed input
    search_order: int = SEARCH_ORDER
    start_pool: int = 32

    def __post_init__(self):
        if int(self.N) != self.N or not 2 <= self.N <= 8:
            raise ValueError("N must be an integer in [2, 8]")
        if self.objective not in (MAX_MMSE, MAX_MI):
            raise ValueError(f"objective must be {MAX_MMSE!r} or {MAX_MI!r}")
        if not self.snr_eval > 0:
            raise ValueError("snr_eval must be positive")
        if self.restarts < 1 or self.levels < 1 or self.max_iters_per_level < 1:
            raise ValueError("restarts, levels and max_iters_per_level must be positive")
        if not 0 <= self.delta < 1:
            raise ValueError("delta must lie in [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SearchResult:
    best: Discrete
    objective_value: float
    constraint_slack: float
    iterations: int
    feasible: bool
    trace: list[float] = field(default_factory=list)
    delta: float = 0.0

    def as_input(self) -> InputDistribution:
        return Mixed(self.delta, self.best) if self.delta > 0 else self.best


class _Problem:
    def __init__(self, cfg: SearchConfig, grid: GaussGrid):
        self.cfg = cfg
        self.grid = grid
        self.cap = cfg.scenario.mmse_cap()

    def wrap(self, x: Discrete) -> InputDistribution:
        return Mixed(self.cfg.delta, x) if self.cfg.delta > 0 else x

    def slack(self, x: Discrete, grid: GaussGrid | None = None) -> float:
        m = all_metrics(self.wrap(x), self.cfg.scenario.snr0, grid or self.grid).mmse
        return self.cap - m

    def objective(self, x: Discrete, grid: GaussGrid | None = None) -> float:
        st = all_metrics(self.wrap(x), self.cfg.snr_eval, grid or self.grid)
        return st.mmse if self.cfg.objective == MAX_MMSE else st.mi

    def feasible(self, x: Discrete) -> bool:
        return x.second_moment() <= 1.0 and self.slack(x) >= CAP_MARGIN


def _to_input(atoms: np.ndarray, logits: np.ndarray) -> Discrete | None:
    order = np.argsort(atoms, kind="stable")
    a = atoms[order]
    if np.any(np.diff(a) < MIN_GAP):
        return None
    p = softmax(np.append(logits, 0.0))[order]
    p[-1] = 1.0 - p[:-1].sum()
    if np.any(p <= 0):
        return None
    return Discrete(a, p)


def _params(x: Discrete) -> tuple[np.ndarray, np.ndarray]:
    logp = np.log(x.probs)
    return x.atoms.copy(), logp[:-1] - logp[-1]


def _fit_power(x: Discrete) -> Discrete:
    p2 = x.second_moment()
    return x.scaled(1.0 / math.sqrt(p2)) if p2 > 1.0 else x


def _largest_feasible_scale(prob: _Problem, x: Discrete, scan: int = 40) -> Discrete:
    """Shrink ``x`` by the largest factor in ``(0, 1]`` that meets the cap.

    The feasible amplitudes need not form an interval, so the factor is first
    bracketed by a downward scan and then refined by bisection.
    """
    x = _fit_power(x)
    if prob.feasible(x):
        return x
    # mmse(c X) <= c^2 E[X^2], so this amplitude is always feasible when the
    # headroom left by the Gaussian share of a mixed input is positive
    d, snr0 = prob.cfg.delta, prob.cfg.scenario.snr0
    g = 1.0 + d * snr0
    target = (prob.cap - d / g - 2 * CAP_MARGIN) * g * g / (1.0 - d)
    if target <= 0:
        raise InfeasibleStart(
            f"{prob.cfg.scenario} (delta={prob.cfg.delta:g}): cap {prob.cap:g} "
            "leaves no room for a nondegenerate input"
        )
    floor = math.sqrt(target / x.second_moment()) * 0.999
    hi = 1.0
    lo = None
    for c in np.geomspace(1.0, floor, scan)[1:]:
        if prob.feasible(x.scaled(c)):
            lo = c
            break
        hi = c
    if lo is None:
        raise InfeasibleStart(f"no feasible amplitude for scenario {prob.cfg.scenario}")
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if prob.feasible(x.scaled(mid)):
            lo = mid
        else:
            hi = mid
    return x.scaled(lo)


def _candidate_starts(prob: _Problem, start: Discrete, rng: np.random.Generator, pool: int) -> Discrete:
    """Best feasible point among ``start`` and ``pool`` random unit-power inputs."""
    best, best_val = start, prob.objective(start)
    N = start.size
    for _ in range(pool):
        x = _to_input(rng.normal(0.0, 1.0, N), rng.normal(0.0, 1.0, N - 1))
        if x is None:
            continue
        x = x.scaled(1.0 / math.sqrt(x.second_moment()))
        try:
            x = _largest_feasible_scale(prob, x, scan=12)
        except InfeasibleStart:
            continue
        val = prob.objective(x)
        if val > best_val:
            best, best_val = x, val
    return best


def starting_point(cfg: SearchConfig, grid: GaussGrid | None = None) -> Discrete:
    """PAM of size ``N`` scaled to the largest feasible amplitude."""
    prob = _Problem(cfg, grid or build_grid(cfg.search_order))
    return _largest_feasible_scale(prob, pam(cfg.N))


def _climb(prob: _Problem, x0: Discrete, rng: np.random.Generator, cfg: SearchConfig):
    atoms, logits = _params(x0)
    best = prob.objective(x0)
    trace = [best]
    moves = 0
    dims = cfg.N + cfg.N - 1
    for level in range(cfg.levels):
        step = cfg.step0 * cfg.decay**level
        used = 0
        while used < cfg.max_iters_per_level:
            accepted = False
            for k in rng.permutation(dims):
                for sign in (1.0, -1.0) if rng.random() < 0.5 else (-1.0, 1.0):
                    if used >= cfg.max_iters_per_level:
                        break
                    used += 1
                    moves += 1
                    a, lg = atoms.copy(), logits.copy()
                    if k < cfg.N:
                        a[k] += sign * step
                    else:
                        lg[k - cfg.N] += sign * step
                    x = _to_input(a, lg)
                    if x is None or not prob.feasible(x):
                        continue
                    val = prob.objective(x)
                    if val > best:
                        best = val
                        atoms, logits = _params(x)
                        trace.append(best)
                        accepted = True
                        break
            if not accepted:
                break
    return _to_input(atoms, logits), best, trace, moves


def local_search(cfg: SearchConfig, grid: GaussGrid | None = None) -> SearchResult:
    """Best of ``cfg.restarts`` hill-climbs, certified on ``grid`` (default order)."""
    final_grid = grid or build_grid()
    prob = _Problem(cfg, build_grid(cfg.search_order))
    start = _largest_feasible_scale(prob, pam(cfg.N))
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = None
    total = 0
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        x0 = start if r == 0 else _candidate_starts(prob, start, rng, cfg.start_pool)
        x, val, trace, moves = _climb(prob, x0, rng, cfg)
        total += moves
        if best is None or val > best[1]:
            best = (x, val, trace)
    x, _, trace = best
    objective = prob.objective(x, final_grid)
    slack = prob.slack(x, final_grid)
    feasible = slack >= -1e-9 and x.second_moment() <= 1.0 + POWER_TOL
    return SearchResult(x, objective, slack, total, feasible, trace, cfg.delta)


def result_text(result: SearchResult, seed: int) -> str:
    """Catalog text of the found input with the ``# objective=... slack=... seed=...`` sidecar."""
    from .design import dump_input

    lines = dump_input(result.as_input()).splitlines()
    n_head = sum(ln.startswith("#") for ln in lines)
    lines.insert(n_head, f"# objective={result.objective_value:.17g} slack={result.constraint_slack:.17g} seed={seed}")
    return "\n".join(lines) + "\n"


def sweep_and_compare(result: SearchResult, snr_grid, scenario: Scenario, grid: GaussGrid | None = None):
    """Curves of the found input next to the bounds of ``scenario``."""
    from .curves import CurveSeries

    if not result.feasible:
        raise ValueError("sweep_and_compare needs a feasible search result")
    snrs = np.asarray(snr_grid, dtype=float)
    x = result.as_input()
    stats = [all_metrics(x, t, grid) for t in snrs]
    below = snrs[snrs <= scenario.snr0]
    return {
        "found_mmse": CurveSeries("found_mmse", snrs, np.array([st.mmse for st in stats])),
        "found_mi": CurveSeries("found_mi", snrs, np.array([st.mi for st in stats])),
        "m_inf": CurveSeries("m_inf", snrs, np.array([bounds.m_inf(scenario, t) for t in snrs])),
        "d_bound": CurveSeries(
            "d_bound", below, np.array([bounds.d_bound(scenario, t, with_power=True).value for t in below])
        ),
        "scpp_envelope": CurveSeries(
            "scpp_envelope", snrs, np.array([bounds.scpp_envelope(scenario, t).value for t in snrs])
        ),
        "gaussian_reduced": CurveSeries(
            "gaussian_reduced", snrs, scenario.beta / (1.0 + scenario.beta * snrs)
        ),
    }
