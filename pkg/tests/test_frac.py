import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from diffwave.errors import DomainError
from diffwave.frac import extrapolate_to_zero, rl_derivative, rl_integral, rl_limit_at_base, rl_operator
from diffwave.func import Func1D, constant, polynomial, power, sine, zero


def bare(f: Func1D) -> Func1D:
    """Same function without closed forms, forcing the numerical route."""
    return Func1D(f.eval, f.domain, f.singular_exponent, None, f.label)


@pytest.mark.parametrize("f, nu, y, expected", [
    (constant(1.0), -1.0, 0.8, 0.8),
    (power(0.5), -0.5, 1.0, math.gamma(1.5) / math.gamma(2.0)),
    (zero(), -0.3, 0.7, 0.0),
])
def test_rl_integral_examples(f, nu, y, expected):
    assert_allclose(rl_integral(f, nu, y), expected, atol=1e-13)
    assert_allclose(rl_integral(bare(f), nu, y), expected, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 0.8, 1.2, 1.7])
def test_rl_derivative_annihilates_kernel_power(alpha):
    assert_allclose(rl_derivative(power(alpha - 1.0), alpha, [0.5, 1.0]), 0.0, atol=1e-15)
    assert_allclose(rl_derivative(bare(power(alpha - 1.0)), alpha, [0.5, 1.0], 1e-10), 0.0, atol=1e-7)


def test_rl_derivative_examples():
    assert rl_derivative(power(1.0), 0.0, 0.6) == pytest.approx(0.6)
    # Gamma(3)/Gamma(1.5) for y^(2 alpha - 1) at alpha = 1.5
    assert_allclose(rl_derivative(power(2.0), 1.5, 1.0), 2.256758334191025, rtol=1e-14)
    assert_allclose(rl_derivative(bare(power(2.0)), 1.5, 1.0, 1e-10), 2.256758334191025, rtol=1e-8)


def test_negative_order_rejected_by_derivative():
    with pytest.raises(DomainError):
        rl_derivative(power(1.0), -0.5, 1.0)


@pytest.mark.parametrize("p, nu", [(0.0, 0.5), (0.5, 1.5), (1.0, -0.7), (-0.4, 0.3), (2.0, 1.9)])
def test_numeric_route_matches_power_rule(p, nu):
    ys = np.array([0.3, 1.0, 2.2])
    closed = rl_operator(power(p), nu, ys)
    numeric = rl_operator(bare(power(p)), nu, ys, 1e-11)
    assert_allclose(numeric, closed, rtol=1e-7, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.9, 2.0), st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.2, 2.0))
def test_integral_semigroup(p, a, b, y):
    f = bare(power(p))
    inner = Func1D(lambda s: rl_integral(f, -a, np.maximum(s, 1e-300), 1e-12), (0.0, math.inf), p + a)
    lhs = rl_integral(inner, -b, y, 1e-11)
    rhs = rl_integral(power(p), -(a + b), y)
    assert_allclose(lhs, rhs, rtol=1e-8)


def test_trig_integral_against_closed_form():
    # I^1 sin(ky) = (1 - cos(ky)) / k
    k = 3.0
    ys = np.array([0.2, 0.9, 1.7])
    assert_allclose(rl_integral(sine(k), -1.0, ys), (1 - np.cos(k * ys)) / k, atol=1e-13)


@pytest.mark.parametrize("k, expected", [(1, math.gamma(1.5)), (2, 0.0)])
def test_limit_at_base_examples(k, expected):
    f = bare(power(0.5))
    ys = [0.04, 0.02, 0.01]
    assert_allclose(rl_limit_at_base(f, 1.5, k, ys, 1e-11), expected, atol=1e-6)


def test_limit_at_base_zero_function():
    assert rl_limit_at_base(zero(), 1.5, 1, [0.1, 0.05, 0.025]) == 0.0


def test_limit_at_base_needs_decreasing_sequence():
    with pytest.raises(DomainError):
        rl_limit_at_base(power(0.5), 1.5, 1, [0.01, 0.02, 0.04])


def test_newton_leibniz():
    # I^alpha D^alpha mu = mu - sum_k y^(alpha-k)/Gamma(alpha-k+1) lim D^(alpha-k) mu
    alpha = 1.5
    mu = power(alpha - 1.0) + power(2.0)
    ys = np.array([0.3, 0.7, 1.0])
    d_mu = mu.closed_frac(alpha)
    lhs = rl_integral(d_mu, -alpha, ys, 1e-12)
    # Error expansions: D^(1/2) mu ~ c + y^1.5, D^(-1/2) mu ~ y + y^2.5.
    powers = {1: (1.5, 3.0), 2: (1.0, 2.5)}
    limits = [rl_limit_at_base(bare(mu), alpha, k, [0.02, 0.01, 0.005], 1e-11, powers[k])
              for k in (1, 2)]
    rhs = mu(ys) - sum(ys ** (alpha - k) / math.gamma(alpha - k + 1) * lim
                       for k, lim in zip((1, 2), limits))
    assert_allclose(lhs, rhs, atol=1e-6)


def test_extrapolate_to_zero_removes_known_powers():
    h = np.array([0.1, 0.05, 0.025])
    vals = 2.0 + 3.0 * h**0.5 - h**1.5
    value, _ = extrapolate_to_zero(h, vals, powers=(0.5, 1.5))
    assert_allclose(value, 2.0, rtol=1e-13)


def test_polynomial_closed_form_derivative():
    p = polynomial([1.0, -2.0, 0.5])
    assert_allclose(rl_derivative(p, 1.0, [0.0, 1.0, 2.0]), [-2.0, -1.0, 0.0], atol=1e-14)
