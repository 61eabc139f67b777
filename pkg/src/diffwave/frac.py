"""Riemann-Liouville fractional integrals and derivatives of ``Func1D`` handles."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import rgamma

from .errors import DifferentiationUnstable, DomainError, ExtrapolationDiverged
from .func import Func1D
from .quadrature import integrate

__all__ = [
    "extrapolate_to_zero",
    "rl_derivative",
    "rl_integral",
    "rl_limit_at_base",
    "rl_operator",
]

# First step of the Richardson ladder, relative to the distance from the base.
STEP_FRACTION = 0.02
RICHARDSON_LEVELS = 4


def _as_array(y):
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    return arr, np.ndim(y) == 0


def _check_domain(f: Func1D, y: np.ndarray) -> None:
    lo, hi = f.domain
    if np.any(y < lo) or np.any(y > hi):
        raise DomainError(f"evaluation point outside domain [{lo}, {hi}]")


def rl_integral(f: Func1D, nu: float, y, tol: float = 1e-12, use_closed_form: bool = True):
    """Fractional integral ``D^nu f(y)`` of order ``-nu > 0`` with base ``f.domain[0]``.

    The substitution ``s = a + (y - a) u`` puts every evaluation point on the
    same reference interval, so an array of ``y`` is handled by one adaptive
    Gauss-Jacobi run with weights ``u^gamma (1 - u)^(-nu-1)``, gamma being the
    declared singular exponent of ``f``.
    """
    if nu >= 0:
        raise DomainError("rl_integral needs nu < 0")
    ys, scalar = _as_array(y)
    _check_domain(f, ys)
    if use_closed_form:
        closed = f.closed_frac(nu)
        if closed is not None:
            out = closed(ys)
            return float(out[0]) if scalar else out
    a = f.base
    gam = f.singular_exponent
    span = ys - a
    pos = span > 0
    out = np.zeros_like(ys)
    if pos.any():
        sp = span[pos]

        def integrand(u):
            s = a + np.outer(sp, u)
            with np.errstate(divide="ignore", invalid="ignore"):
                smooth = f.eval(s) / (s - a) ** gam if gam != 0 else f.eval(s)
            return smooth

        res = integrate(integrand, 0.0, 1.0, left=gam, right=-nu - 1.0, atol=tol * 1e-2, rtol=tol)
        out[pos] = np.atleast_1d(res.value) * sp ** (gam - nu) * rgamma(-nu)
    return float(out[0]) if scalar else out


def _richardson(values: np.ndarray, ratio: float, order: int):
    """Richardson table along axis 0 for an error expansion in h^order, h^(2 order), ..."""
    table = [values[i] for i in range(values.shape[0])]
    estimates = [table[0]]
    for j in range(1, len(table)):
        factor = ratio ** (order * j)
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
        estimates.append(table[0])
    return estimates


def rl_derivative(f: Func1D, nu: float, y, tol: float = 1e-12, use_closed_form: bool = True):
    """RL derivative ``(d/dy)^n D^(nu-n) f(y)`` with ``n = ceil(nu)``.

    Closed forms attached to ``f`` are used when present; otherwise the outer
    derivatives are Richardson-extrapolated central differences of the
    fractional integral.
    """
    if nu < 0:
        raise DomainError("rl_derivative needs nu >= 0")
    ys, scalar = _as_array(y)
    _check_domain(f, ys)
    if nu == 0:
        out = f(ys)
        return float(out[0]) if scalar else out
    if use_closed_form:
        closed = f.closed_frac(nu)
        if closed is not None:
            out = closed(ys)
            return float(out[0]) if scalar else out
    n = math.ceil(nu)
    inner = nu - n
    a = f.base
    if np.any(ys <= a):
        raise DomainError("rl_derivative needs y strictly inside the domain")
    h0 = STEP_FRACTION * (ys - a)
    hs = h0[None, :] / 2.0 ** np.arange(RICHARDSON_LEVELS)[:, None]
    # Central stencils: n=1 uses y +- h, n=2 uses y - h, y, y + h.
    if n == 1:
        weights = np.array([-0.5, 0.5])
        offsets = np.array([-1.0, 1.0])
    elif n == 2:
        weights = np.array([1.0, -2.0, 1.0])
        offsets = np.array([-1.0, 0.0, 1.0])
    else:
        raise DomainError("orders above 2 are not supported")
    pts = ys[None, None, :] + offsets[:, None, None] * hs[None, :, :]
    if inner < 0:
        vals = rl_integral(f, inner, pts.ravel(), tol=tol * 1e-3, use_closed_form=use_closed_form)
    else:
        vals = f(pts.ravel())
    vals = np.asarray(vals).reshape(pts.shape)
    diffs = np.tensordot(weights, vals, axes=1) / hs**n
    est = _richardson(diffs, 2.0, 2)
    value = est[-1]
    if len(est) >= 3:
        last = np.abs(est[-1] - est[-2])
        before = np.abs(est[-2] - est[-3])
        scale = np.maximum(np.abs(value), 1.0)
        bad = (last > 10 * before) & (last > 1e-6 * scale)
        if np.any(bad) or not np.all(np.isfinite(value)):
            raise DifferentiationUnstable("Richardson estimates of the outer derivative diverge")
    return float(value[0]) if scalar else value


def rl_operator(f: Func1D, nu: float, y, tol: float = 1e-12, use_closed_form: bool = True):
    """``D^nu f(y)`` for any real order."""
    if nu < 0:
        return rl_integral(f, nu, y, tol, use_closed_form)
    return rl_derivative(f, nu, y, tol, use_closed_form)


def extrapolate_to_zero(h, values, powers=None):
    """Polynomial (Neville) extrapolation of ``values(h)`` to ``h = 0``.

    ``powers`` lists the exponents of the error expansion (default 1, 2, ...).
    Returns the estimate and the size of the last correction.
    """
    h = np.asarray(h, dtype=float)
    v = np.asarray(values, dtype=float)
    m = h.size
    if powers is None:
        powers = np.arange(1, m)
    powers = np.asarray(powers, dtype=float)[: m - 1]
    if not np.any(v):
        return 0.0, 0.0  # some LAPACK builds reject an all-zero right-hand side
    basis = np.column_stack([np.ones(m)] + [h**p for p in powers])
    coef = np.linalg.solve(basis, v) if basis.shape[0] == basis.shape[1] else \
        np.linalg.lstsq(basis, v, rcond=None)[0]
    value = float(coef[0])
    if m >= 2:
        sub = np.column_stack([np.ones(m - 1)] + [h[1:] ** p for p in powers[: m - 2]])
        previous = float(np.linalg.lstsq(sub, v[1:], rcond=None)[0][0])
        correction = abs(value - previous)
    else:
        correction = math.inf
    if not math.isfinite(value):
        raise ExtrapolationDiverged("extrapolated value is not finite")
    return value, correction


def rl_limit_at_base(f: Func1D, nu: float, k: int, y_sequence, tol: float = 1e-10,
                     powers=None) -> float:
    """Extrapolate ``D^(nu-k) f(y)`` to ``y -> base+`` from a decreasing sequence."""
    ys = np.asarray(y_sequence, dtype=float)
    if ys.size < 2 or np.any(np.diff(ys) >= 0) or np.any(ys <= f.base):
        raise DomainError("y_sequence must decrease toward the base and stay above it")
    order = nu - k
    vals = np.atleast_1d(rl_operator(f, order, ys, tol))
    value, correction = extrapolate_to_zero(ys - f.base, vals, powers)
    spread = np.max(np.abs(vals)) + 1.0
    if correction > 10.0 * spread:
        raise ExtrapolationDiverged(f"extrapolation correction {correction:.3g} exceeds data scale")
    return value
