import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lphard import constants as hc
from lphard import theta as th
from lphard.errors import DomainError

# Frozen from a 40-digit mpmath direct summation (|z| <= 50 / 60 cutoffs).
THETA_2_5_0 = 1.0134758981204782
MU_1_1_0 = 0.8509181282393215
# min over tau in (0, 10] on a 1e4-point grid of exp(tau) * Theta_2(tau, 0).
MIN_FORM_2_0_1 = 4.132731376234986

ps = st.sampled_from([1, 1.5, 2, 2.5, 3, 5])
ts = st.sampled_from([0.0, 0.125, 0.25, 0.5])


def test_theta_direct_sum():
    assert th.theta(2, 5, 0) == pytest.approx(THETA_2_5_0, rel=1e-12)


def test_theta_large_tau_keeps_only_origin():
    assert abs(th.theta(3, 1e4, 0) - 1) < 1e-12


def test_theta_small_tau_limit():
    tau = 1e-4
    assert th.theta(2, tau, 0.5) * tau ** 0.5 == pytest.approx(math.sqrt(math.pi), rel=0.01)


def test_theta_extended_matches_double():
    ext = th.theta(1.5, 0.3, 0.25, precision="extended")
    assert float(ext) == pytest.approx(th.theta(1.5, 0.3, 0.25), rel=1e-13)


def test_mu_direct_sum():
    assert th.mu(1, 1, 0) == pytest.approx(MU_1_1_0, rel=1e-12)


def test_mu_limits():
    assert th.mu(2, 100, 0.5) == pytest.approx(0.25, rel=1e-6)
    assert th.mu(2, 1e-4, 0) * 1e-4 == pytest.approx(0.5, rel=0.01)


def test_theta_rejects_bad_domain():
    with pytest.raises(DomainError):
        th.theta(0.5, 1.0)
    with pytest.raises(DomainError):
        th.theta(2, -1.0)
    with pytest.raises(DomainError):
        th.mu(2, 1.0, 0.7)


@given(ps, ts, st.floats(0.05, 5))
def test_mu_strictly_decreasing_in_tau(p, t, tau):
    # beyond tau ~ 10 the decrease at t = 1/2 drops below one ulp
    assert th.mu(p, tau * 1.1, t) < th.mu(p, tau, t)


@given(ps, ts, st.floats(0.05, 3))
def test_solve_tau_roundtrip(p, t, extra):
    a = t + extra
    tau = th.solve_tau(p, a, t)
    assert th.mu(p, tau, t) == pytest.approx(a ** p, rel=1e-9)


def test_solve_tau_monotone_grid():
    for p in np.linspace(1, 6, 10):
        taus = [th.solve_tau(p, a, 0.0) for a in np.linspace(0.1, 3, 10)]
        assert all(x > y for x, y in zip(taus, taus[1:]))


def test_solve_tau_needs_a_above_t():
    with pytest.raises(DomainError):
        th.solve_tau(2, 0.25, 0.25)


def test_solve_tau_at_p0_reproduces_two():
    p = hc.p0()
    tau = th.solve_tau(p, 0.5, 0)
    assert math.exp(tau / 2 ** p) * th.theta(p, tau, 0) == pytest.approx(2, abs=1e-5)


def test_beta_half_offset_base():
    for p in (1, 2, 3.7):
        assert th.beta(p, 0.5, 0.5).value == 2


def test_beta_at_p0():
    assert th.beta(hc.p0(), 0, 0.5).value == pytest.approx(2, abs=1e-6)


def test_beta_large_radius_limit():
    a = 100.0
    lim = 2 * math.gamma(1.5) * math.sqrt(2 * math.e)
    assert th.beta(2, 0, a).value / a == pytest.approx(lim, rel=0.02)


def test_beta_min_form_oracle():
    assert th.beta(2, 0, 1).value == pytest.approx(MIN_FORM_2_0_1, rel=1e-6)
    assert th.beta_min_form(2, 0, 1) == pytest.approx(MIN_FORM_2_0_1, rel=1e-6)


@given(ps, ts, st.floats(0.05, 4))
def test_beta_min_form_agrees(p, t, extra):
    a = t + extra
    b = th.beta(p, t, a).value
    assert th.beta_min_form(p, t, a) == pytest.approx(b, rel=1e-6)


@given(ps, ts, st.floats(0.05, 4), st.floats(0.2, 5))
def test_beta_min_form_is_a_minimum(p, t, extra, factor):
    a = t + extra
    pt = th.beta(p, t, a)
    tau = pt.tau_star * factor
    other = math.exp(tau * a ** p) * th.theta(p, tau, t)
    assert other >= pt.value * (1 - 1e-12)


def test_beta_below_offset_is_zero():
    assert th.beta(2, 0.5, 0.25).value == 0


def test_beta_vectorised_matches_scalar():
    a = np.array([0.3, 0.7, 1.2, 4.0])
    vals, _ = th.beta_values(2.5, 0.25, a)
    for x, v in zip(a, vals):
        assert v == pytest.approx(th.beta(2.5, 0.25, x).value, rel=1e-10)


@given(ps, ts, st.floats(0.05, 3))
def test_beta_inv_roundtrip(p, t, extra):
    a = t + extra
    nu = th.beta(p, t, a).value
    assert th.beta_inv(p, t, nu) == pytest.approx(a, rel=1e-8)


def test_beta_inv_at_p0():
    assert th.beta_inv(hc.p0(), 0, 2) == pytest.approx(0.5, abs=1e-4)


def test_beta_inv_alpha_star_value():
    assert 1 / (2 * th.beta_inv(1.5, 0, 2)) == pytest.approx(1.3554, abs=1e-3)


def test_beta_inv_extended_agrees():
    d = th.beta_inv(1.5, 0, 2)
    e = th.beta_inv(1.5, 0, 2, precision="extended")
    assert float(e) == pytest.approx(d, rel=1e-10)


def test_beta_inv_domain():
    with pytest.raises(DomainError):
        th.beta_inv(2, 0.5, 1.5)
    assert th.beta_inv(2, 0.5, 2) == 0.5


def test_fraction_inputs_accepted():
    from fractions import Fraction
    v = th.beta(2, Fraction(1, 4), Fraction(3, 4), precision="extended").value
    assert float(v) == pytest.approx(th.beta(2, 0.25, 0.75).value, rel=1e-10)


def test_tolerances_validated():
    with pytest.raises(DomainError):
        th.Tolerances(series_rel_tail=0.1)
