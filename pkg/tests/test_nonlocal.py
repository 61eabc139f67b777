import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from diffwave.errors import DomainError, ValidationError
from diffwave.func import Func1D, constant, polynomial, power, zero
from diffwave.kernel_ops import HeatKernel, WrightKernel
from diffwave.nonlocal_conditions import (
    BUILTIN_CASES,
    BoundaryTraces,
    kernel_limit_check,
    manufactured_case,
    order_count,
    residual_x0,
    residual_xl,
    wave_residuals,
)
from diffwave.wave import wave_preset, wave_traces

YS = np.linspace(0.05, 1.0, 7)


@pytest.mark.parametrize("alpha, n", [(0.3, 1), (1.0, 1), (1.01, 2), (2.0, 2)])
def test_order_count(alpha, n):
    assert order_count(alpha) == n


@pytest.mark.parametrize("alpha", [0.4, 1.0, 1.5, 1.9])
@pytest.mark.parametrize("name", BUILTIN_CASES)
def test_manufactured_solutions_satisfy_relations(name, alpha):
    case = manufactured_case(name, alpha)
    assert np.max(np.abs(residual_x0(case.traces, alpha, 1.0, YS))) <= 1e-8
    assert np.max(np.abs(residual_xl(case.traces, alpha, 1.0, YS))) <= 1e-8


def test_zero_traces_give_zero():
    tr = BoundaryTraces(zero(), zero(), zero(), zero(), (zero(), zero()))
    assert residual_x0(tr, 1.5, 1.0, 0.5) == 0.0
    assert residual_xl(tr, 1.5, 1.0, 0.5) == 0.0


def test_linear_example_alpha_06():
    # u = x y^(alpha-1), alpha = 0.6
    alpha, l = 0.6, 1.0
    p = alpha - 1
    tr = BoundaryTraces(zero(), power(p, l), power(p), power(p), (polynomial([0.0, math.gamma(alpha)]),))
    assert abs(residual_x0(tr, alpha, l, 0.7)) <= 1e-5
    assert abs(residual_xl(tr, alpha, l, 0.7)) <= 1e-5


def test_wrong_trace_is_detected():
    case = manufactured_case("power", 1.5)
    tr = case.traces
    bad = BoundaryTraces(tr.u0 + constant(0.1), tr.ul, tr.ux0, tr.uxl, tr.tau)
    assert abs(residual_x0(bad, 1.5, 1.0, 0.5)) > 1e-2


@pytest.mark.parametrize("name", BUILTIN_CASES)
def test_heat_kernel_matches_wright_kernel(name):
    case = manufactured_case(name, 1.0)
    for fn in (residual_x0, residual_xl):
        a = fn(case.traces, 1.0, 1.0, YS, kernel=WrightKernel(0.5))
        b = fn(case.traces, 1.0, 1.0, YS, kernel=HeatKernel())
        assert_allclose(a, b, atol=1e-12)


def test_trace_count_checked():
    tr = BoundaryTraces(zero(), zero(), zero(), zero(), (zero(),))
    with pytest.raises(ValidationError):
        residual_x0(tr, 1.5, 1.0, 0.5)


@pytest.mark.parametrize("alpha", [0.0, 2.0, 2.5])
def test_alpha_range(alpha):
    tr = BoundaryTraces(zero(), zero(), zero(), zero(), (zero(), zero()))
    with pytest.raises(DomainError):
        residual_x0(tr, alpha, 1.0, 0.5)


@pytest.mark.parametrize("g, kind, expected", [
    (lambda t: np.ones_like(t), "window_kernel", 1.0),
    (lambda t: np.exp(-t), "delta_kernel", math.exp(-1.0)),
    (lambda t: t, "window_kernel", 0.5),
    (lambda t: t, "delta_kernel", 1.0),
])
def test_kernel_limits(g, kind, expected):
    limit, values = kernel_limit_check(g, kind)
    assert len(values) == 3
    assert abs(limit - expected) <= 1e-3


def test_kernel_limit_rejects_bad_sequence():
    with pytest.raises(DomainError):
        kernel_limit_check(lambda t: t, "window_kernel", (0.9, 0.8))


def test_wave_residuals_zero_data():
    tr = BoundaryTraces(zero(), zero(), zero(), zero(), (zero(), zero()))
    assert wave_residuals(tr, 1.0, 0.5, 0.3) == (0.0, 0.0)


def test_wave_residuals_standing_wave():
    l = 1.0
    k = math.pi / l
    u0 = zero()
    ul = zero()
    ux0 = Func1D(lambda y: k * np.cos(k * y), (0, math.inf))
    uxl = Func1D(lambda y: -k * np.cos(k * y), (0, math.inf))
    tr = BoundaryTraces(u0, ul, ux0, uxl, (zero(), Func1D(lambda x: np.sin(k * x))))
    r0, rl = wave_residuals(tr, l, 0.9, l / 2)
    assert abs(r0) <= 1e-10 and abs(rl) <= 1e-10


def test_wave_residuals_linear_solution():
    # u = x + y: u(0,y) = y, u_y(x,0) = 1, u(x,0) = x, u_x = 1
    tr = BoundaryTraces(power(1.0), polynomial([1.0, 1.0]), constant(1.0), constant(1.0),
                        (constant(1.0), polynomial([0.0, 1.0])))
    for y in (0.2, 0.6, 1.0):
        r0, rl = wave_residuals(tr, 1.0, 1.0, y)
        assert abs(r0) <= 1e-13 and abs(rl) <= 1e-13


@pytest.mark.parametrize("name, kw", [("sine", {}), ("linear", {"c": 0.7}), ("bump", {"l": 4.0, "T": 0.9})])
def test_wave_residuals_vanish_for_presets(name, kw):
    spec = wave_preset(name, **kw).spec
    tr = wave_traces(spec)
    for y in np.linspace(0.1, spec.T, 4):
        r0, rl = wave_residuals(tr, spec.l, spec.T, y)
        assert abs(r0) <= 1e-8 and abs(rl) <= 1e-8
