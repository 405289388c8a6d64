import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmse_disturbance.distributions import Discrete, Gaussian, Mixed, discrete


def test_discrete_validation():
    with pytest.raises(ValueError):
        Discrete([], [])
    with pytest.raises(ValueError):
        Discrete([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        Discrete([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(ValueError):
        Discrete([0.0, 1.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        Discrete(np.arange(65.0), np.full(65, 1 / 65))


def test_discrete_accessors():
    x = Discrete([-1.0, 0.0, 2.0], [0.25, 0.5, 0.25])
    assert x.mean() == pytest.approx(0.25)
    assert x.second_moment() == pytest.approx(1.25)
    assert x.var() == pytest.approx(1.25 - 0.0625)
    assert x.d_min == 1.0 and x.d_max == 3.0
    np.testing.assert_array_equal(x.nearest_distances(), [1.0, 1.0, 2.0])
    assert x.entropy() == pytest.approx(-(0.5 * np.log(0.25) + 0.5 * np.log(0.5)))


def test_merge_helper_sorts_and_merges():
    x = discrete([1.0, -1.0, 1.0, 3.0], [0.25, 0.25, 0.25, 0.0])
    np.testing.assert_array_equal(x.atoms, [-1.0, 1.0])
    np.testing.assert_allclose(x.probs, [1 / 3, 2 / 3])


def test_gaussian_and_mixed_moments():
    g = Gaussian(2.0)
    assert g.fourth_moment() == 12.0
    m = Mixed(0.3, Discrete([-1.0, 1.0], [0.5, 0.5]))
    assert m.second_moment() == pytest.approx(1.0)
    # E[(sqrt(.7) B + sqrt(.3) G)^4] = .49 + 6 * .7 * .3 + 3 * .09
    assert m.fourth_moment() == pytest.approx(0.49 + 1.26 + 0.27)
    with pytest.raises(ValueError):
        Mixed(1.5, Discrete([0.0], [1.0]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6, unique=True),
       st.lists(st.floats(0.05, 1.0), min_size=6, max_size=6))
def test_mixed_fourth_moment_against_sampling_free_formula(atoms, w):
    atoms = sorted(atoms)
    if np.any(np.diff(atoms) <= 1e-9):
        return
    p = np.array(w[: len(atoms)])
    x = Discrete(atoms, p / p.sum())
    d = 0.4
    m = Mixed(d, x)
    # binomial expansion of E[(aX + bG)^4] with odd Gaussian moments zero
    a, b = np.sqrt(1 - d), np.sqrt(d)
    ref = a**4 * x.moment(4) + 6 * a**2 * b**2 * x.moment(2) + 3 * b**4
    assert m.fourth_moment() == pytest.approx(ref, rel=1e-12, abs=1e-12)
