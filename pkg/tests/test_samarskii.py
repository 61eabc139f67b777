import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from diffwave.errors import DegenerateCoefficients, InputError, TruncationBudgetExceeded, ValidationError
from diffwave.func import constant, power, zero
from diffwave.kernel_ops import NOperator, apply_N
from diffwave.samarskii import (
    MatchingWarning,
    ProblemSpec,
    boundary_residual,
    build_Phi,
    derive_flux_condition,
    evaluate_solution,
    initial_trace_limit,
    manufactured_problem,
    neumann_psi,
    pde_residual,
    recover_boundary_traces,
    solve,
    solve_psi,
    verify_integral_condition,
    volterra_residual,
)

YS = np.array([0.2, 0.55, 1.0])


def zero_spec(alpha=1.5):
    n = 1 if alpha <= 1 else 2
    return ProblemSpec(alpha, 1.0, 1.0, tuple([zero()] * n), zero(), zero())


def test_flux_examples():
    alpha = 1.5
    spec = ProblemSpec(alpha, 1.0, 1.0, (zero(), zero()), zero(), power(alpha - 1, 1.0))
    assert_allclose(derive_flux_condition(spec, YS), 0.0, atol=1e-15)
    spec = ProblemSpec(alpha, 1.0, 1.0, (zero(), zero()), zero(), power(2 * alpha - 1))
    assert_allclose(derive_flux_condition(spec, 1.0), math.gamma(2 * alpha) / math.gamma(alpha))


def test_Phi_example():
    alpha, l = 1.5, 1.0
    beta = alpha / 2
    g = math.gamma(alpha)
    spec = ProblemSpec(alpha, l, 1.0, (constant(g), zero()), zero(), power(alpha - 1, l))
    n = lambda x: apply_N(NOperator(beta, 0.0, l, x, 1.0), beta, constant(g))
    assert_allclose(build_Phi(spec, 1.0), 2 * (n(0.0) + n(l)), rtol=1e-10)


def test_Phi_bounded_after_scaling():
    spec, _ = manufactured_problem("power", 1.5)
    ys = np.array([1e-2, 1e-3, 1e-4])
    scaled = ys ** (2 - 1.5) * build_Phi(spec, ys)
    assert np.all(np.isfinite(scaled)) and np.max(np.abs(scaled)) < 10


def test_zero_data():
    spec = zero_spec()
    assert_allclose(solve_psi(spec, YS), 0.0, atol=1e-300)
    sol = solve(spec)
    assert_allclose(sol.eval(0.4, YS), 0.0, atol=1e-300)


def test_psi_power_example():
    spec, _ = manufactured_problem("power", 1.5)
    assert_allclose(solve_psi(spec, 0.5), 2 * math.sqrt(0.5), rtol=1e-12)


@pytest.mark.parametrize("name", ["power", "quadratic", "wright"])
def test_volterra_and_neumann(name):
    spec, _ = manufactured_problem(name, 1.5)
    assert np.max(np.abs(volterra_residual(spec, YS))) <= 1e-9
    assert_allclose(neumann_psi(spec, YS), solve_psi(spec, YS), atol=1e-9)


def test_recover_traces_with_general_coefficients():
    spec = ProblemSpec(1.5, 1.0, 1.0, (zero(), zero()), constant(1.0), zero(), a1=2.0, a2=-1.0)
    phi0, phil = recover_boundary_traces(spec, constant(3.0))
    assert_allclose([phi0(0.5), phil(0.5)], [4 / 3, 5 / 3], rtol=1e-15)
    assert_allclose(2 * phi0(0.5) - phil(0.5), 1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
@pytest.mark.parametrize("name", ["power", "linear", "quadratic", "wright"])
def test_manufactured_solutions_reproduced(name, alpha):
    l = 2.0 if alpha == 0.5 else 1.0  # keeps the image count small at small alpha
    spec, exact = manufactured_problem(name, alpha, l, 1.0, a1=2.0, a2=-1.0)
    sol = solve(spec)
    ys = np.array([0.3, 1.0])
    for x in (0.0, 0.37 * l, l):
        assert_allclose(sol.eval(x, ys), exact(x, ys), atol=1e-8)


def test_power_case_interior_point():
    spec, _ = manufactured_problem("power", 1.5, 1.0, 1.0)
    assert_allclose(evaluate_solution(spec, 0.5, 0.5), math.sqrt(0.5), atol=1e-10)


def test_green_and_direct_routes_agree():
    spec, _ = manufactured_problem("quadratic", 1.5)
    ys = np.array([0.4, 0.9])
    green = evaluate_solution(spec, 0.3, ys)
    direct = evaluate_solution(spec, 0.3, ys, method="direct")
    assert_allclose(green, direct, atol=1e-9)


def test_near_boundary_matches_trace():
    spec, _ = manufactured_problem("wright", 1.5, a1=2.0, a2=-1.0)
    sol = solve(spec)
    assert_allclose(sol.eval(1e-7, YS), sol.phi0(YS), atol=1e-6)


def test_integral_and_boundary_conditions():
    spec, _ = manufactured_problem("linear", 1.5, a1=1.0, a2=0.5)
    sol = solve(spec)
    assert verify_integral_condition(spec, sol, YS) <= 1e-9
    assert boundary_residual(spec, sol, YS) <= 1e-10


def test_mismatch_residual_leading_term():
    spec, _ = manufactured_problem("power", 1.5, mismatch=0.1)
    sol = solve(spec, check=False)
    ys = np.array([0.05, 0.1])
    res = verify_integral_condition(spec, sol, ys, return_all=True)
    assert_allclose(np.abs(res), 0.1 * ys ** -0.5 / math.gamma(0.5), rtol=1e-6)


def test_validate_flags_mismatch():
    spec, _ = manufactured_problem("power", 1.5, mismatch=0.1)
    with pytest.warns(MatchingWarning):
        spec.validate()
    with pytest.raises(ValidationError):
        spec.validate(strict=True)


@pytest.mark.parametrize("name", ["power", "linear", "quadratic", "wright"])
def test_validate_quiet_on_consistent_data(name):
    spec, _ = manufactured_problem(name, 1.5, a1=2.0, a2=-1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert spec.validate() == []


def test_equal_coefficients_rejected():
    spec = ProblemSpec(1.5, 1.0, 1.0, (zero(), zero()), zero(), zero(), a1=1.0, a2=1.0)
    with pytest.raises(InputError, match="a1 == a2"):
        spec.validate()
    with pytest.raises(DegenerateCoefficients):
        solve(spec, check=False)


@pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0])
def test_alpha_range(alpha):
    spec = ProblemSpec(alpha, 1.0, 1.0, (zero(),), zero(), zero())
    with pytest.raises(ValidationError):
        spec.validate()


def test_truncation_budget():
    spec, _ = manufactured_problem("power", 0.3, l=0.01, T=1.0)
    with pytest.raises(TruncationBudgetExceeded):
        solve(spec)


@pytest.mark.parametrize("name, k, expected", [
    ("power", 1, math.gamma(1.5)),
    ("power", 2, 0.0),
])
def test_initial_trace_recovery(name, k, expected):
    spec, _ = manufactured_problem(name, 1.5)
    sol = solve(spec)
    assert abs(initial_trace_limit(sol, 0.4, k) - expected) <= 1e-3


def test_pde_residual_second_order():
    spec, _ = manufactured_problem("wright", 1.0)
    sol = solve(spec)
    r = np.abs(pde_residual(sol, 0.5, 0.5, [0.2, 0.1, 0.05]))
    orders = np.log2(r[:-1] / r[1:])
    assert np.all(orders >= 1.8)
