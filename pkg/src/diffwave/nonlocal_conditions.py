"""Necessary non-local boundary relations for regular solutions on a strip.

Every regular solution of ``u_xx = D^alpha u`` on ``(0, l) x (0, T]`` ties its
boundary values, boundary fluxes and initial traces together through the
operators of :mod:`diffwave.kernel_ops`.  The functions here evaluate those
relations as residuals, so a candidate solution can be certified pointwise in
``y``.  The wave-equation versions (``alpha = 2``) are local in time and are
written with plain integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import rgamma

from . import special
from .errors import DomainError, ExtrapolationDiverged, ValidationError
from .frac import extrapolate_to_zero, rl_integral
from .func import Func1D, power, wright_profile, zero
from .kernel_ops import WrightKernel, _n_values, _r_values, support_radius
from .quadrature import integrate

__all__ = [
    "BUILTIN_CASES",
    "BoundaryTraces",
    "ManufacturedCase",
    "kernel_limit_check",
    "manufactured_case",
    "order_count",
    "residual_x0",
    "residual_xl",
    "wave_residuals",
]


def order_count(alpha: float) -> int:
    """Number of initial traces: the integer n with n - 1 < alpha <= n."""
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    return 1 if alpha <= 1.0 else 2


@dataclass(frozen=True)
class BoundaryTraces:
    """Boundary values, boundary fluxes and initial traces of a solution.

    ``tau[k-1]`` is the limit of ``D^(alpha-k) u(x, y)`` as ``y -> 0``.
    """

    u0: Func1D
    ul: Func1D
    ux0: Func1D
    uxl: Func1D
    tau: tuple = field(default_factory=tuple)

    def check(self, alpha: float) -> None:
        n = order_count(alpha)
        if len(self.tau) != n:
            raise ValidationError(f"alpha={alpha} needs {n} initial traces, got {len(self.tau)}")


def _setup(traces: BoundaryTraces, alpha: float, y, kernel):
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    traces.check(alpha)
    beta = alpha / 2.0
    kern = kernel if kernel is not None else WrightKernel(beta)
    if kern.beta != beta:
        raise DomainError("kernel beta does not match alpha / 2")
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ys <= 0):
        raise DomainError("residuals are evaluated at y > 0")
    return beta, kern, ys


def _initial_part(traces, beta, kern, x, l, ys, tol):
    total = np.zeros(ys.shape)
    for k, tau in enumerate(traces.tau, start=1):
        total += 2.0 * _n_values(kern, beta - k + 1.0, x, 0.0, l, ys, tau, tol)
    return total


def residual_x0(traces: BoundaryTraces, alpha: float, l: float, y, tol: float = 1e-10, kernel=None):
    """Residual of the relation expressing ``u(0, y)`` through the other data.

    ``kernel`` may be a :class:`~diffwave.kernel_ops.HeatKernel` at alpha = 1.
    Returns a float for scalar ``y`` and an array otherwise.
    """
    beta, kern, ys = _setup(traces, alpha, y, kernel)
    rhs = (_initial_part(traces, beta, kern, 0.0, l, ys, tol)
           + 2.0 * _r_values(kern, beta, l, traces.uxl, ys, tol)
           - np.atleast_1d(rl_integral(traces.ux0, -beta, ys, tol))
           + 2.0 * _r_values(kern, 0.0, l, traces.ul, ys, tol))
    res = traces.u0(ys) - rhs
    return float(res[0]) if np.ndim(y) == 0 else res


def residual_xl(traces: BoundaryTraces, alpha: float, l: float, y, tol: float = 1e-10, kernel=None):
    """Residual of the mirror relation for ``u(l, y)``."""
    beta, kern, ys = _setup(traces, alpha, y, kernel)
    rhs = (_initial_part(traces, beta, kern, l, l, ys, tol)
           - 2.0 * _r_values(kern, beta, l, traces.ux0, ys, tol)
           + np.atleast_1d(rl_integral(traces.uxl, -beta, ys, tol))
           + 2.0 * _r_values(kern, 0.0, l, traces.u0, ys, tol))
    res = traces.ul(ys) - rhs
    return float(res[0]) if np.ndim(y) == 0 else res


# ---------------------------------------------------------------------------
# wave equation (alpha = 2)


def _int(f: Func1D, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    return float(integrate(f.eval, a, b, atol=1e-14, rtol=1e-13).value)


def wave_residuals(traces: BoundaryTraces, l: float, T: float, y: float, nu: Func1D | None = None):
    """Residuals of the two wave-equation boundary relations at time ``y``.

    ``traces.tau`` holds ``(velocity, displacement)``: the first initial trace
    of the diffusion-wave family becomes ``u_y(x, 0)`` and the second becomes
    ``u(x, 0)`` in the limit alpha -> 2.  ``nu`` overrides the velocity.
    """
    if y > T:
        raise DomainError(f"y={y} exceeds T={T}")
    if y <= 0:
        raise DomainError("wave residuals are evaluated at y > 0")
    if len(traces.tau) != 2:
        raise ValidationError("wave residuals need (velocity, displacement) traces")
    vel = nu if nu is not None else traces.tau[0]
    disp = traces.tau[1]
    flux0 = _int(traces.ux0, 0.0, y)
    fluxl = _int(traces.uxl, 0.0, y)
    if y <= l:
        r0 = traces.u0(y) - (_int(vel, 0.0, y) + disp(y) - flux0)
        rl = traces.ul(y) - (_int(vel, l - y, l) + disp(l - y) + fluxl)
    else:
        total = _int(vel, 0.0, l)
        r0 = traces.u0(y) - (total + _int(traces.uxl, 0.0, y - l) - flux0 + traces.ul(y - l))
        rl = traces.ul(y) - (total - _int(traces.ux0, 0.0, y - l) + fluxl + traces.u0(y - l))
    return float(r0), float(rl)


# ---------------------------------------------------------------------------
# kernel limits as beta -> 1


def kernel_limit_check(g: Callable, kind: str = "delta_kernel", beta_sequence=(0.9, 0.95, 0.975),
                       tol: float = 1e-11):
    """Extrapolate ``int_0^inf g(t) phi(-beta, order; -t) dt`` to beta = 1.

    ``kind`` selects order 0 (``delta_kernel``, limit ``g(1)``) or order beta
    (``window_kernel``, limit ``int_0^1 g``).  The extrapolation is polynomial
    in ``1 - beta``.  Returns ``(limit, values)``.
    """
    if kind not in ("delta_kernel", "window_kernel"):
        raise DomainError(f"unknown kernel kind {kind!r}")
    betas = np.asarray(beta_sequence, dtype=float)
    if betas.size < 2 or np.any(np.diff(betas) <= 0) or np.any(betas >= 1) or np.any(betas <= 0):
        raise DomainError("beta_sequence must increase inside (0, 1)")
    evalg = g.eval if isinstance(g, Func1D) else g
    values = []
    for beta in betas:
        order = 0.0 if kind == "delta_kernel" else float(beta)
        upper = 2.0 * max(support_radius(float(beta), order), 2.0)
        width = 1.0 - beta
        breaks = [1.0 - 4 * width, 1.0 - width, 1.0, 1.0 + width, 1.0 + 4 * width, 2.0, 4.0]
        res = integrate(lambda t, b=beta, o=order: evalg(t) * special.phi(b, o, -t),
                        0.0, upper, breaks=[p for p in breaks if 0 < p < upper],
                        atol=tol, rtol=tol)
        values.append(float(res.value))
    limit, correction = extrapolate_to_zero(1.0 - betas, values)
    if correction > 10.0 * (max(abs(v) for v in values) + 1.0):
        raise ExtrapolationDiverged("beta extrapolation is not settling")
    return limit, values


# ---------------------------------------------------------------------------
# manufactured exact solutions


@dataclass(frozen=True)
class ManufacturedCase:
    """Closed-form solution with its traces and integral data."""

    name: str
    alpha: float
    l: float
    solution: Callable  # (x, y) -> u
    traces: BoundaryTraces
    mu: Func1D  # integral of u over [0, l]
    flux: Func1D  # D^alpha mu = u_x(l, y) - u_x(0, y)


def _const(c: float) -> Func1D:
    return Func1D(lambda t: np.full_like(np.asarray(t, float), c), (-math.inf, math.inf), 0.0,
                  None, f"{c}")


def _scaled_x(power_x: int, c: float) -> Func1D:
    return Func1D(lambda t: c * np.asarray(t, float) ** power_x, (-math.inf, math.inf), 0.0,
                  None, f"{c}*x^{power_x}")


def manufactured_case(name: str, alpha: float, l: float = 1.0, shift: float = 0.5) -> ManufacturedCase:
    """Builtin exact solutions of ``u_xx = D^alpha u``.

    ``power``      u = y^(alpha-1)
    ``linear``     u = x y^(alpha-1)
    ``quadratic``  u = x^2 y^(alpha-1) + c y^(2 alpha - 1), c = 2 Gamma(alpha)/Gamma(2 alpha)
    ``wright``     u = K_beta(x + shift * l, y), a shifted kernel (all traces zero)
    """
    n = order_count(alpha)
    if alpha >= 2:
        raise DomainError("manufactured cases need alpha < 2")
    beta = alpha / 2.0
    g_a = math.gamma(alpha)
    p = alpha - 1.0

    def taus(first: Func1D):
        return tuple([first] + [_const(0.0)] * (n - 1))

    if name == "power":
        yp = power(p)
        tr = BoundaryTraces(yp, yp, zero(), zero(), taus(_const(g_a)))
        return ManufacturedCase(name, alpha, l, lambda x, y: np.asarray(y, float) ** p + 0 * x,
                                tr, power(p, l), zero())
    if name == "linear":
        tr = BoundaryTraces(zero(), power(p, l), power(p), power(p), taus(_scaled_x(1, g_a)))
        return ManufacturedCase(name, alpha, l, lambda x, y: x * np.asarray(y, float) ** p,
                                tr, power(p, 0.5 * l * l), zero())
    if name == "quadratic":
        c = 2.0 * g_a * float(rgamma(2.0 * alpha))
        q = 2.0 * alpha - 1.0
        tr = BoundaryTraces(power(q, c), power(p, l * l) + power(q, c), zero(), power(p, 2.0 * l),
                            taus(_scaled_x(2, g_a)))
        mu = power(p, l**3 / 3.0) + power(q, c * l)
        return ManufacturedCase(
            name, alpha, l,
            lambda x, y: x * x * np.asarray(y, float) ** p + c * np.asarray(y, float) ** q,
            tr, mu, power(p, 2.0 * l))
    if name == "wright":
        x0 = shift * l
        theta = beta
        tr = BoundaryTraces(
            wright_profile(beta, theta, x0), wright_profile(beta, theta, x0 + l),
            wright_profile(beta, theta - beta, x0, -1.0), wright_profile(beta, theta - beta, x0 + l, -1.0),
            taus(_const(0.0)))
        # The antiderivative in x of K_theta is -K_{theta+beta}.
        mu = (wright_profile(beta, theta + beta, x0)
              + wright_profile(beta, theta + beta, x0 + l, -1.0))
        flux = (wright_profile(beta, theta - beta, x0)
                + wright_profile(beta, theta - beta, x0 + l, -1.0))
        return ManufacturedCase(
            name, alpha, l,
            lambda x, y: special.kernel(beta, theta, np.asarray(x, float) + x0, y),
            tr, mu, flux)
    raise DomainError(f"unknown manufactured case {name!r}")


BUILTIN_CASES = ("power", "linear", "quadratic", "wright")
