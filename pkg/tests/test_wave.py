import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from diffwave.errors import DomainError, ValidationError
from diffwave.func import Func1D, constant, polynomial, sine, zero
from diffwave.wave import (
    WaveSpec,
    derive_phil,
    evaluate_wave_solution,
    extend_odd_periodic,
    verify_wave_integral_condition,
    wave_fd_residual,
    wave_preset,
)


def test_derive_phil_examples():
    spec = wave_preset("sine").spec
    assert abs(derive_phil(spec, spec.l / 4)) <= 1e-14
    spec = wave_preset("linear", c=0.7).spec
    ys = np.array([0.0, 0.2, 0.45])
    assert_allclose(derive_phil(spec, ys), 0.7 * ys, atol=1e-14)


def test_derive_phil_outside_range():
    spec = wave_preset("sine").spec
    with pytest.raises(DomainError):
        derive_phil(spec, 2 * spec.T)


def test_odd_periodic_extension():
    f = extend_odd_periodic(polynomial([0.0, 1.0]), 1.0)
    assert_allclose(f(-0.3), -0.3)
    assert_allclose(f(2.0 - 0.3), -0.3)
    assert_allclose(f(0.4 + 2.0), 0.4)


@pytest.mark.parametrize("l, T", [(1.0, 0.5), (2.0, 1.5), (3.0, 0.4)])
def test_sine_preset_exact(l, T):
    p = wave_preset("sine", l=l, T=T)
    x, y = l / 3, T / 2
    assert_allclose(evaluate_wave_solution(p.spec, x, y), p.exact(x, y), atol=1e-14)


def test_linear_preset_grid():
    p = wave_preset("linear", c=1.3)
    X, Y = np.meshgrid(np.linspace(0, 1, 5), np.linspace(0, 0.5, 4))
    assert_allclose(evaluate_wave_solution(p.spec, X, Y), 1.3 * Y, atol=1e-14)


def test_zero_data():
    spec = WaveSpec(1.0, 0.5, zero(), zero(), zero(), zero())
    assert_allclose(evaluate_wave_solution(spec, [0.1, 0.5, 0.9], 0.4), 0.0, atol=0)


def test_time_must_stay_below_length():
    spec = WaveSpec(1.0, 1.0, zero(), zero(), zero(), zero())
    with pytest.raises(ValidationError):
        spec.validate()


def test_point_outside_domain():
    spec = wave_preset("sine").spec
    with pytest.raises(DomainError):
        evaluate_wave_solution(spec, 1.2, 0.1)


@pytest.mark.parametrize("name, kw", [("sine", {}), ("linear", {"c": 0.5}), ("bump", {"l": 4.0, "T": 0.9})])
def test_initial_and_boundary_data(name, kw):
    spec = wave_preset(name, **kw).spec
    xs = np.linspace(0, spec.l, 9)
    assert_allclose(evaluate_wave_solution(spec, xs, 0.0), spec.tau(xs), atol=1e-14)
    ys = np.linspace(0, spec.T, 6)
    assert_allclose(evaluate_wave_solution(spec, 0.0, ys), spec.phi0(ys), atol=1e-13)
    assert verify_wave_integral_condition(spec, ys) <= 1e-12


def test_initial_velocity_first_order():
    spec = wave_preset("bump", l=4.0, T=0.9).spec
    x = 1.7
    hs = np.array([1e-2, 5e-3, 2.5e-3])
    err = np.abs((evaluate_wave_solution(spec, x, hs) - float(spec.tau(x))) / hs - float(spec.nu(x)))
    assert np.all(np.diff(err) < 0)
    assert err[-1] <= 1e-2


def test_mismatch_residual():
    # Shift mu by 0.05: the integral condition is violated by exactly that amount.
    base = wave_preset("sine").spec
    spec = WaveSpec(base.l, base.T, base.tau, base.nu, base.phi0, base.mu + constant(0.05))
    with pytest.warns(UserWarning):
        assert spec.validate() != []
    with pytest.raises(ValidationError):
        spec.validate(strict=True)
    res = verify_wave_integral_condition(spec, [0.1, 0.3], return_all=True)
    assert_allclose(np.abs(res), 0.05, rtol=1e-9)


def test_fd_residual_orders():
    spec = wave_preset("sine").spec
    hs = [0.04, 0.02, 0.01]
    exact = [abs(wave_fd_residual(spec, 0.4, 0.25, h)) for h in hs]
    assert max(exact) <= 1e-10
    r = np.array([abs(wave_fd_residual(spec, 0.4, 0.25, h, y_ratio=0.5)) for h in hs])
    assert_allclose(np.log2(r[:-1] / r[1:]), 2.0, atol=0.05)


def test_fd_stencil_must_fit():
    spec = wave_preset("sine").spec
    with pytest.raises(DomainError):
        wave_fd_residual(spec, 0.5, 0.49, 0.05)


def test_general_mu_without_closed_derivative():
    # mu given as a bare function: the derivative falls back to differences.
    p = wave_preset("sine")
    mu = Func1D(p.spec.mu.eval)
    spec = WaveSpec(p.spec.l, p.spec.T, p.spec.tau, p.spec.nu, p.spec.phi0, mu)
    assert_allclose(evaluate_wave_solution(spec, 0.6, 0.4), p.exact(0.6, 0.4), atol=1e-7)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 0.5), st.integers(1, 4))
def test_standing_modes(x, y, mode):
    # u = sin(k x) cos(k y) for k = mode * pi / l.
    l, T = 1.0, 0.5
    k = mode * math.pi / l
    mu = Func1D(lambda s: (1 - math.cos(k * l)) / k * np.cos(k * np.asarray(s)))
    mu_p = Func1D(lambda s: -(1 - math.cos(k * l)) * np.sin(k * np.asarray(s)))
    spec = WaveSpec(l, T, sine(k), zero(), zero(), mu, mu_p)
    assert_allclose(evaluate_wave_solution(spec, x, y), math.sin(k * x) * math.cos(k * y), atol=1e-12)
