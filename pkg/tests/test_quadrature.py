import numpy as np
import pytest
from scipy.special import logsumexp

from mmse_disturbance.quadrature import (
    DEFAULT_ORDER,
    QuadratureSpec,
    build_grid,
    log_mixture_density,
)


def test_default_grid_is_cached_and_immutable():
    g = build_grid()
    assert g is build_grid()
    assert g.order == DEFAULT_ORDER
    with pytest.raises(ValueError):
        g.weights[0] = 1.0


@pytest.mark.parametrize("order", [16, 96, 200, 400, 800])
def test_gauss_hermite_moments(order):
    g = build_grid(order)
    assert g.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert g.expect(g.nodes) == pytest.approx(0.0, abs=1e-14)
    assert g.expect(g.nodes**2) == pytest.approx(1.0, abs=1e-12)
    assert g.expect(g.nodes**4) == pytest.approx(3.0, abs=1e-11)


def test_gauss_hermite_exact_for_cosine():
    # E[cos(tZ)] = exp(-t^2/2)
    g = build_grid(200)
    for t in (0.5, 2.0, 5.0):
        assert g.expect(np.cos(t * g.nodes)) == pytest.approx(np.exp(-t * t / 2), abs=1e-13)


def test_trapezoid_fallback_matches_moments():
    g = build_grid(QuadratureSpec(order=2001, kind="trapezoid_fallback", range_sigmas=12.0))
    assert g.expect(g.nodes**2) == pytest.approx(1.0, abs=1e-10)
    assert g.expect(g.nodes**4) == pytest.approx(3.0, abs=1e-9)


def test_pruning_can_be_disabled():
    full = build_grid(QuadratureSpec(order=400, prune_below=0.0))
    pruned = build_grid(400)
    assert full.size == 400 and pruned.size < 400
    f = lambda z: np.exp(-0.1 * z**2) * (1 + z**2)  # noqa: E731
    assert pruned.expect(f(pruned.nodes)) == pytest.approx(full.expect(f(full.nodes)), abs=1e-14)


@pytest.mark.parametrize("bad", [dict(order=8), dict(order=20.5), dict(kind="simpson"), dict(range_sigmas=0)])
def test_spec_rejects_bad_values(bad):
    with pytest.raises(ValueError):
        QuadratureSpec(**bad)


def test_log_mixture_density_large_separation():
    # far-apart atoms at huge snr: no underflow, matches the dominant term
    atoms = np.array([-1.0, 1.0])
    lp = np.log([0.5, 0.5])
    snr = 1e6
    y = np.sqrt(snr) * 1.0 + 0.3
    expect = np.log(0.5) - 0.5 * 0.3**2 - 0.5 * np.log(2 * np.pi)
    assert log_mixture_density(y, atoms, lp, snr) == pytest.approx(expect, abs=1e-12)
    direct = logsumexp(lp - 0.5 * (y - np.sqrt(snr) * atoms) ** 2) - 0.5 * np.log(2 * np.pi)
    assert log_mixture_density(y, atoms, lp, snr) == pytest.approx(direct, abs=1e-12)


def test_log_mixture_density_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        log_mixture_density(0.0, [0.0, 1.0], [0.0], 1.0)
