import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmse_disturbance import bounds
from mmse_disturbance.bounds import (
    DivergentGap,
    Scenario,
    UnconstrainedScenario,
    bandemer_power,
    c_inf,
    c_n_upper,
    d_bound,
    delta_27,
    delta_35,
    delta_36,
    gap_report,
    m_inf,
    pam_constraint_cap,
    scpp_envelope,
    width_report,
    xa_mmse_upper,
)
from mmse_disturbance.design import pam, reference_inputs, xa
from mmse_disturbance.distributions import Discrete, Gaussian
from oracles import c_n_oracle, delta_27_oracle, delta_35_oracle, delta_36_oracle

S5 = Scenario(5.0, 0.01)


def test_scenario_validation():
    for bad in (dict(snr0=0, beta=0.1), dict(snr0=1, beta=1.5), dict(snr0=1, beta=0.1, n=0)):
        with pytest.raises(ValueError):
            Scenario(**bad)
    assert S5.mmse_cap() == pytest.approx(0.01 / 1.05, abs=1e-16)


def test_m_inf_branches():
    assert m_inf(S5, 2.0) == pytest.approx(1 / 3)
    s1 = Scenario(5.0, 1.0)
    assert m_inf(s1, 5.0) == pytest.approx(1 / 6) and m_inf(s1, 5.0 - 1e-12) == pytest.approx(1 / 6)
    assert m_inf(S5, 10.0) == pytest.approx(0.0090909, abs=1e-7)


def test_c_inf_examples():
    assert c_inf(S5, 5.0) == pytest.approx(0.5 * math.log(6))
    assert c_inf(Scenario(5.0, 0.0), 10.0) == pytest.approx(0.5 * math.log(6))
    assert c_inf(S5, 100.0) == pytest.approx(0.5 * math.log(2 / 1.05) + 0.5 * math.log(6), abs=1e-15)


def test_d_bound_examples():
    assert d_bound(S5, 5.0).value == S5.mmse_cap()
    assert d_bound(S5, 5.0, with_power=True).value == pytest.approx(S5.mmse_cap(), abs=1e-16)
    assert d_bound(S5, 4.0).value == pytest.approx(0.01 / 1.05 + 3 * (0.25 - 0.2), abs=1e-15)
    r = d_bound(S5, 2.0)
    assert r.delta == 0.0 and r.kind == "d_bound" and r.kn == 3
    rp = d_bound(S5, 2.0, with_power=True)
    assert rp.kn == pytest.approx(3 - 1 / 9) and rp.value < r.value
    with pytest.raises(ValueError):
        d_bound(S5, 5.1)


def test_delta_27_against_simpson():
    assert abs(delta_27(1.0, 5.0) - delta_27_oracle(1.0, 5.0)) <= 1e-8


def test_scpp_envelope():
    assert scpp_envelope(S5, 5.0).value == S5.mmse_cap()
    assert scpp_envelope(S5, 5.0).direction == "upper" and scpp_envelope(S5, 1.0).direction == "lower"
    assert scpp_envelope(Scenario(5.0, 1.0), 3.0).value == pytest.approx(0.25)
    assert scpp_envelope(Scenario(5.0, 0.05), 20.0).value == pytest.approx(0.025)


def test_width_report():
    snr_l, w = width_report(S5)
    assert abs(snr_l - 3.387097) <= 1e-6
    assert snr_l == pytest.approx(5 * 1.05 / 1.55, abs=1e-14)
    assert w == pytest.approx(5 - snr_l, abs=1e-14)
    widths = [width_report(Scenario(5.0, 0.05, n))[1] for n in (1, 3, 15, 70)]
    assert all(a > b for a, b in zip(widths, widths[1:]))
    assert width_report(Scenario(5.0, 0.05, 10**6))[1] <= 5e-5
    with pytest.raises(UnconstrainedScenario):
        width_report(Scenario(5.0, 0.0))


def test_snr_l_is_where_dbound_meets_one_over_snr():
    for s in (S5, Scenario(60.0, 0.001, 4), Scenario(2.0, 0.5, 30)):
        snr_l, _ = width_report(s)
        assert d_bound(s, snr_l).value == pytest.approx(1 / snr_l, rel=1e-12)


def test_delta_degenerate_cases():
    snr_l, _ = width_report(S5)
    assert delta_36(S5, 0.5 * snr_l) == 0.0
    assert delta_36(S5, snr_l) == pytest.approx(0.0, abs=1e-15)
    # beta = 1: snr_L = snr0 only as n grows, so check the interval shrinks the correction
    assert abs(delta_35(Scenario(5.0, 0.3, 10**6))) < 1e-6


@pytest.mark.parametrize("s", [Scenario(5.0, 0.1), Scenario(60.0, 0.001, 1), Scenario(10.0, 0.05, 15),
                               Scenario(1.5, 0.8, 70)])
def test_delta_closed_forms_against_simpson(s):
    assert delta_35(s) == pytest.approx(delta_35_oracle(s), abs=1e-9)
    snr_l, _ = width_report(s)
    for snr in np.linspace(snr_l * 0.5, s.snr0, 7):
        assert delta_36(s, snr) == pytest.approx(delta_36_oracle(s, snr), abs=1e-9)
    assert delta_36(s, s.snr0) == pytest.approx(delta_35(s), abs=1e-13)


def test_delta_36_can_be_negative_near_snr_l():
    # the power-refined D-bound sits above 1/(1+snr) just past snr_L,
    # so the closed form (and its defining integral) dips below zero there
    s = Scenario(5.0, 0.01, 1)
    snr_l, _ = width_report(s)
    snr = snr_l + 0.2
    assert d_bound(s, snr, True).value > 1 / (1 + snr)
    assert delta_36(s, snr) < 0
    assert delta_36(s, snr) == pytest.approx(delta_36_oracle(s, snr), abs=1e-9)


def test_delta_35_can_be_negative_for_large_beta():
    # with beta large the D-bound stays above 1/(1+t) over most of [snr_L, snr0]
    s = Scenario(1.01, 0.373, 94)
    assert delta_35(s) < -1e-4
    assert delta_35(s) == pytest.approx(delta_35_oracle(s), abs=1e-10)
    assert c_n_upper(s, 5.0) == pytest.approx(c_inf(s, 5.0), abs=1e-15)


def test_c_n_upper_example_and_integral():
    s = Scenario(5.0, 0.1, 1)
    assert delta_35(s) >= 0
    assert c_n_upper(s, 20.0) == pytest.approx(c_inf(s, 20.0) - delta_35(s), abs=1e-15)
    assert c_n_upper(s, 20.0) == pytest.approx(c_n_oracle(s, 20.0), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.0, 100.0), st.floats(1e-3, 1.0), st.integers(1, 100), st.floats(0.01, 3.0))
def test_c_n_upper_sandwich(snr0, beta, n, frac):
    s = Scenario(snr0, beta, n)
    snr = frac * snr0
    c = c_n_upper(s, snr)
    assert 0.5 * math.log1p(beta * snr) - 1e-15 <= c <= c_inf(s, snr) + 1e-15


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 100.0), st.floats(1e-3, 1.0), st.integers(1, 50), st.floats(0.01, 1.0))
def test_power_dbound_is_tighter(snr0, beta, n, frac):
    s = Scenario(snr0, beta, n)
    snr = frac * snr0
    assert delta_27(snr, snr0) >= -1e-15
    assert d_bound(s, snr, True).value <= d_bound(s, snr).value + 1e-15


def test_large_n_envelope_approaches_m_inf_pointwise():
    # pointwise limit: the snr points are fixed before n grows
    snrs = np.linspace(0.5, 4.99, 25)
    s = Scenario(5.0, 0.01, 10**6)
    for snr in snrs:
        assert abs(bounds.mn_envelope(s, snr) - m_inf(s, snr)) <= 1e-3
    assert bounds.mn_envelope(s, 5.0) == pytest.approx(m_inf(s, 5.0), abs=1e-15)


def test_pam_constraint_cap():
    assert pam_constraint_cap(S5, 0.0) == pytest.approx(S5.mmse_cap())
    assert pam_constraint_cap(S5, 0.01) == 0.0
    s = Scenario(10.0, 0.01)
    d = 0.01 * 10 / 11
    cap = pam_constraint_cap(s, d)
    assert cap == pytest.approx((0.01 - d) * (1 + 10 * d) / ((1 - d) * 1.1), abs=1e-16)
    # substituting the cap into the mixed-input decomposition lands exactly on the constraint
    g = 1 + d * 10
    assert (1 - d) / g**2 * cap + d / g == pytest.approx(s.mmse_cap(), abs=1e-16)
    with pytest.raises(ValueError):
        pam_constraint_cap(S5, 0.02)


def test_xa_upper():
    assert xa_mmse_upper(10, 0.0) == 1.0
    cross = 8 * math.log(4 * 101) / 100
    assert 4 * 101 * math.exp(-100 * cross / 8) == pytest.approx(1.0, abs=1e-12)
    assert xa_mmse_upper(10, cross * 1.001) < 1.0
    assert xa_mmse_upper(20, 1.0) < 1e-18
    with pytest.raises(ValueError):
        xa_mmse_upper(0.5, 1.0)


def test_bandemer():
    assert abs(bandemer_power(5.0, 0.5) - 0.343656) <= 1e-6
    assert bandemer_power(5.0, 0.0) == 0.0
    assert bandemer_power(5.0, 0.5 * math.log(6)) == pytest.approx(1.0, abs=1e-15)
    assert bandemer_power(5.0, 10.0) == 1.0


def test_gap_report_regimes():
    s = Scenario(60.0, 0.001)
    low = gap_report(s, 0.5)
    assert low.regime == "low" and low.gap_nats <= 0.5 * math.log(2)
    weak = gap_report(s, 100.0)
    assert weak.regime == "weak"
    assert weak.delta_mix == pytest.approx(9.8361e-4, abs=1e-8)
    ref = (0.5 * math.log((2 / 3) * math.log(24 * (1 + 0.999 * 60) / 0.001) + 6 * 0.001 / 1.06)
           + 0.5 * math.log(4 * math.pi / 3) - delta_35(s))
    assert weak.gap_nats == pytest.approx(ref, abs=1e-14)
    strong = gap_report(Scenario(10.0, 0.05), 4.0)
    assert strong.regime == "strong" and strong.delta_mix == 0.0
    c2 = 3 / (2 * math.log(12 * 1.5 / 0.05))
    assert strong.c2 == pytest.approx(c2) and strong.N == math.floor(math.sqrt(1 + 4 * c2))
    assert strong.degenerate == (strong.N < 2)
    with pytest.raises(DivergentGap):
        gap_report(Scenario(60.0, 0.0), 10.0)


def test_discrete_bounds():
    x = pam(4)
    m = bounds.discrete_mmse_upper(x, 0.0)
    assert m == pytest.approx(x.d_max**2)
    assert bounds.discrete_mmse_upper(Discrete([0.0], [1.0]), 3.0) == 0.0
    # at zero mmse the lower bound is the entropy minus the shaping loss
    assert bounds.discrete_mi_lower(x, 0.0) == pytest.approx(math.log(4) - 0.5 * math.log(math.pi * math.e / 6))
    assert bounds.discrete_mi_lower(x, 0.0) <= x.entropy()


def test_power_implication(grid):
    assert bounds.power_implication_check(Gaussian(1.0), Scenario(5.0, 0.01), grid).verdict == "no_implication"
    v = bounds.power_implication_check(xa(20), Scenario(1.0, 0.01), grid)
    assert v.verdict == "no_implication"
    single = bounds.power_implication_check(Discrete([0.3], [1.0]), Scenario(5.0, 0.01), grid)
    assert single.verdict == "power_reduced" and single.sup_cov_sq == 0.0


def test_bound_sandwich(grid):
    from mmse_disturbance.metrics import mmse_curve

    s = Scenario(10.0, 0.01)
    snrs = np.geomspace(0.05, 100, 60)
    d1 = reference_inputs()["discrete1"]
    m = mmse_curve(d1, snrs, grid)
    assert mmse_curve(d1, [10.0], grid)[0] <= s.mmse_cap()
    for t, v in zip(snrs, m):
        ceiling = bounds.lmmse_bound(t, d1.var())
        ceiling = min(ceiling, d_bound(s, t, True).value) if t <= 10 else min(ceiling, scpp_envelope(s, t).value)
        assert v <= ceiling + 1e-6
