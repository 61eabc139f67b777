import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy.special import erf

from diffwave import special
from diffwave.errors import DomainError
from diffwave.frac import rl_integral
from diffwave.func import constant, polynomial, power, sine, zero
from diffwave.kernel_ops import (
    HeatKernel,
    NOperator,
    ROperator,
    WrightKernel,
    apply_N,
    apply_R,
    compose_D_N,
    compose_D_R,
    compose_R_N,
    compose_R_semigroup,
    integrate_N_over_x,
    integrate_R_over_x,
    make_kernel,
    n_values,
    property2_rhs,
    property3_limit,
    property4_limit,
    r_values,
    support_radius,
    verify_property,
)

# 1/2 int_0^1 exp(-1/(4(1-s))) / sqrt(pi (1-s)) ds, mpmath quad at 30 digits
R_EXAMPLE = 0.199641228374245665888235304358


def test_apply_N_zero_density():
    assert apply_N(NOperator(0.5, 0.0, 1.0, 0.3, 1.0), 0.5, zero()) == 0.0


def test_apply_N_heat_window():
    # 1/2 int_0^5 exp(-t^2/4)/sqrt(pi) dt = erf(5/2)/2
    got = apply_N(NOperator(0.5, 0.0, 5.0, 0.0, 1.0), 0.5, constant(1.0))
    assert_allclose(got, 0.5 * erf(2.5), rtol=1e-12)


def test_apply_R_heat_example():
    got = apply_R(ROperator(0.5, 1.0), 0.5, constant(1.0), 1.0)
    assert_allclose(got, R_EXAMPLE, rtol=1e-12)


def test_apply_R_zero_density():
    assert apply_R(ROperator(0.3, 0.7), 0.4, zero(), 1.0) == 0.0


@pytest.mark.parametrize("delta, mu", [(0.5, constant(1.0)), (1.2, power(0.5)), (0.3, sine(2.0))])
def test_apply_R_at_zero_offset_is_half_integral(delta, mu):
    got = apply_R(ROperator(delta, 0.0), 0.6, mu, 0.9)
    assert_allclose(got, 0.5 * rl_integral(mu, -delta, 0.9), rtol=1e-11)


def test_apply_R_order_zero_at_zero_offset():
    assert_allclose(apply_R(ROperator(0.0, 0.0), 0.6, sine(1.0), 0.9), 0.5 * math.sin(0.9))


def test_r_values_vectorised_matches_scalar():
    ys = np.array([0.2, 0.6, 1.1])
    vec = r_values(0.7, 0.45, polynomial([1.0, 2.0]), 0.8, ys)
    one = [apply_R(ROperator(0.7, 0.8), 0.45, polynomial([1.0, 2.0]), y) for y in ys]
    assert_allclose(vec, one, rtol=1e-12)


def test_n_values_vectorised_matches_scalar():
    ys = np.array([0.3, 1.0])
    tau = polynomial([0.0, 1.0, -1.0])
    vec = n_values(0.8, 0.4, tau, 0.25, 0.0, 1.0, ys)
    one = [apply_N(NOperator(0.8, 0.0, 1.0, 0.25, y), 0.4, tau) for y in ys]
    assert_allclose(vec, one, rtol=1e-12)


@pytest.mark.parametrize("theta", [-0.5, 0.0, 0.5, 1.0, 1.5])
def test_heat_kernel_matches_wright_kernel(theta):
    x = np.array([0.0, 0.3, 1.0, 2.5, 6.0])
    y = np.array([0.2, 0.5, 1.0, 2.0, 4.0])
    X, Y = np.meshgrid(x, y)
    if theta == -0.5:
        X = X + 0.1  # order -1/2 is singular only at x = 0
    assert_allclose(HeatKernel()(theta, X, Y), WrightKernel(0.5)(theta, X, Y), rtol=1e-11, atol=1e-300)


def test_make_kernel_picks_heat_at_half():
    assert isinstance(make_kernel(0.5), HeatKernel)
    assert not isinstance(make_kernel(0.5, closed_form=False), HeatKernel)
    assert not isinstance(make_kernel(0.3), HeatKernel)


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75, 0.95])
def test_support_radius_bounds_kernel(beta):
    z = support_radius(beta, beta)
    tail = np.geomspace(z, 50 * z, 50)
    assert np.all(np.abs(special.phi(beta, beta, -tail)) * (1 + tail) ** 2 < 1e-18)


def test_support_radius_shrinks_with_beta():
    radii = [support_radius(b, b) for b in (0.25, 0.5, 0.75, 0.9)]
    assert radii == sorted(radii, reverse=True)


def test_semigroup_example():
    lhs = compose_R_semigroup(0.25, 0.5, 0.25, 0.5, 0.5, constant(1.0), 1.0)
    rhs = 2 * apply_R(ROperator(0.5, 1.0), 0.5, constant(1.0), 1.0)
    assert_allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("b", [1.0, -0.2, 0.4])
def test_R_N_composition(b):
    beta, delta, theta, a, l, y = 0.5, 0.5, 0.5, 0.3, 1.0, 1.0
    lhs = compose_R_N(delta, a, theta, b, beta, l, constant(1.0), y)
    rhs = property2_rhs(delta, a, theta, b, beta, l, constant(1.0), y)
    assert_allclose(lhs, rhs, atol=1e-9)


def test_property5_example():
    # int_0^l R[theta, a + x] mu dx = (R[theta+beta, a] - R[theta+beta, a+l]) mu
    beta, theta, a, l, y = 0.4, 0.5, 1.0, 0.5, 1.0
    lhs = integrate_R_over_x(theta, a, +1, beta, constant(1.0), l, y)
    rhs = (apply_R(ROperator(0.9, 1.0), beta, constant(1.0), y)
           - apply_R(ROperator(0.9, 1.5), beta, constant(1.0), y))
    assert_allclose(lhs, rhs, atol=1e-9)


def test_property6_third_identity_example():
    # int_0^l N[delta, x] tau dx = -(N[1, 0] + N[1, l]) tau + y^0/Gamma(1) int_0^l tau
    beta, delta, l, y = 0.5, 0.5, 1.0, 1.0
    lhs = integrate_N_over_x(delta, 0.0, 1, beta, constant(1.0), l, y)
    n = lambda x: apply_N(NOperator(1.0, 0.0, l, x, y), beta, constant(1.0))
    assert_allclose(lhs, -(n(0.0) + n(l)) + 1.0, atol=1e-9)


@pytest.mark.parametrize("delta", [0.4, 1.0, 0.0])
def test_property3_limit(delta):
    limit, target = property3_limit(delta, 0.5, polynomial([1.0, 1.0]), 0.8)
    assert abs(limit - target) <= 1e-5


@pytest.mark.parametrize("k, n", [(1, 1), (1, 2), (2, 2)])
def test_property4_limit(k, n):
    beta = 0.35 if n == 1 else 0.8
    limit, expected = property4_limit(k, n, beta, polynomial([1.0, 0.5]), 6.0, 3.0)
    assert abs(limit - expected) <= 1e-3


def test_fractional_integral_of_R():
    lhs = compose_D_R(0.4, 0.6, 0.7, 0.5, sine(1.0), 1.2)
    rhs = apply_R(ROperator(1.0, 0.7), 0.5, sine(1.0), 1.2)
    assert_allclose(lhs, rhs, atol=1e-9)


def test_fractional_integral_of_N():
    lhs = compose_D_N(0.3, 0.6, 0.4, 0.5, polynomial([1.0, -1.0]), 1.0, 0.9)
    rhs = apply_N(NOperator(0.9, 0.0, 1.0, 0.4, 0.9), 0.5, polynomial([1.0, -1.0]))
    assert_allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("prop", [1, 2, 5, 6, 7])
@pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
def test_verify_property_identities(prop, beta):
    checks = verify_property(prop, beta, seed=11, draws=3)
    assert len(checks) == 3
    assert max(c.abs_diff for c in checks) <= 1e-8


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 0.9), st.integers(0, 10_000))
def test_verify_property_random_seeds(beta, seed):
    checks = verify_property(1, beta, seed=seed, draws=1)
    assert checks[0].abs_diff <= 1e-8


def test_verify_property_rejects_unknown():
    with pytest.raises(DomainError):
        verify_property(9, 0.5)
