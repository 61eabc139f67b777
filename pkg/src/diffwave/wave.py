"""Wave equation with a Samarskii integral condition (``alpha = 2``).

Solve ``u_xx = u_yy`` on ``(0, l) x (0, T]``, ``T < l``, with displacement
``tau``, velocity ``nu``, boundary value ``u(0, y) = phi0(y)`` and
``int_0^l u(x, y) dx = mu(y)``.  The integral condition fixes the right
boundary value ``phi_l``; the solution is then d'Alembert's formula with the
initial data extended oddly about both ends plus the two boundary waves.

Notation: ``tau`` is displacement and ``nu`` velocity.  In the non-local
relations of :mod:`diffwave.nonlocal_conditions` the same data appear as
``(velocity, displacement)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, ValidationError
from .func import Func1D, constant, cosine, polynomial, sine, zero
from .nonlocal_conditions import BoundaryTraces
from .quadrature import integrate

__all__ = [
    "WavePreset",
    "WaveSpec",
    "derivative",
    "derive_phil",
    "evaluate_wave_solution",
    "extend_odd_periodic",
    "wave_fd_residual",
    "wave_preset",
    "wave_traces",
    "verify_wave_integral_condition",
]

MU_STEP = 1e-4


def _integral(f: Func1D, a: float, b: float) -> float:
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    return sign * float(integrate(f.eval, a, b, atol=1e-15, rtol=1e-14).value)


def derivative(f: Func1D, step: float = 1e-3) -> Func1D:
    """First derivative: closed form if attached, else a 4th-order central difference."""
    closed = f.closed_frac(1.0)
    if closed is not None:
        return closed

    def ev(y):
        y = np.asarray(y, dtype=float)
        h = step * np.maximum(1.0, np.abs(y))
        return (8.0 * (f.eval(y + h) - f.eval(y - h)) - (f.eval(y + 2 * h) - f.eval(y - 2 * h))) / (12.0 * h)

    return Func1D(ev, f.domain, 0.0, None, f"d/dy {f.label}")


@dataclass(frozen=True)
class WaveSpec:
    l: float
    T: float
    tau: Func1D
    nu: Func1D
    phi0: Func1D
    mu: Func1D
    mu_prime: Optional[Func1D] = field(default=None, compare=False)

    def validate(self, strict: bool = False, tol: float = 1e-8) -> list[str]:
        if self.l <= 0 or self.T <= 0:
            raise ValidationError("l and T must be positive")
        if not self.T < self.l:
            raise ValidationError("T < l is required")
        problems = []
        int_tau = _integral(self.tau, 0.0, self.l)
        if abs(int_tau - float(self.mu(0.0))) > tol * max(1.0, abs(int_tau)):
            problems.append(f"int tau = {int_tau:.6g} != mu(0) = {float(self.mu(0.0)):.6g}")
        int_nu = _integral(self.nu, 0.0, self.l)
        mp0 = float(self.derivative_mu()(0.0))
        if abs(int_nu - mp0) > 1e3 * tol * max(1.0, abs(int_nu)):
            problems.append(f"int nu = {int_nu:.6g} != mu'(0) = {mp0:.6g}")
        for msg in problems:
            if strict:
                raise ValidationError(msg)
            warnings.warn(msg, UserWarning, stacklevel=2)
        return problems

    def derivative_mu(self) -> Func1D:
        if self.mu_prime is not None:
            return self.mu_prime
        closed = self.mu.closed_frac(1.0)
        if closed is not None:
            return closed
        mu, h = self.mu, MU_STEP * self.T

        def ev(y):
            y = np.asarray(y, dtype=float)
            # One-sided at y = 0 (second order), central elsewhere.
            central = (mu.eval(y + h) - mu.eval(y - h)) / (2 * h)
            forward = (-3 * mu.eval(y) + 4 * mu.eval(y + h) - mu.eval(y + 2 * h)) / (2 * h)
            return np.where(y < h, forward, central)

        return Func1D(ev, (0.0, math.inf), 0.0, None, "mu'")


def derive_phil(spec: WaveSpec, y) -> float:
    """Right boundary value forced by the integral condition."""
    if np.ndim(y):
        return np.array([derive_phil(spec, float(v)) for v in np.ravel(y)]).reshape(np.shape(y))
    if not 0.0 <= y <= spec.T * (1 + 1e-12):
        raise DomainError(f"y={y} outside [0, T]")
    y = min(y, spec.T)
    mp = spec.derivative_mu()
    l = spec.l
    return (_integral(spec.nu, 0.0, y) + _integral(spec.nu, l - y, l) + float(spec.tau(y))
            + float(spec.tau(l - y)) + float(mp(y)) - float(mp(0.0)) - float(spec.phi0(y)))


def _fold(x, l):
    """Map to ``[0, l]`` plus the sign of the odd 2l-periodic extension."""
    r = np.mod(np.asarray(x, dtype=float), 2.0 * l)
    upper = r > l
    return np.where(upper, 2.0 * l - r, r), np.where(upper, -1.0, 1.0)


def extend_odd_periodic(f: Func1D, l: float) -> Func1D:
    """Extension with ``f(-x) = -f(x)`` and ``f(2l - x) = -f(x)``."""

    def ev(x):
        r, sign = _fold(x, l)
        return sign * f.eval(r)

    return Func1D(ev, (-math.inf, math.inf), 0.0, None, f"odd ext of {f.label}")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _cumulative(f: Func1D, r, l: float):
    """``int_0^r f`` for many ``r`` in ``[0, l]``: one batched Gauss sweep over sorted cuts."""
    cuts = np.unique(np.concatenate([np.linspace(0.0, l, 65), r]))
    a, b = cuts[:-1], cuts[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES
    pieces = half * (f.eval(nodes) @ _GL_WEIGHTS)
    total = np.concatenate([[0.0], np.cumsum(pieces)])
    return total[np.searchsorted(cuts, r)]


def _antiderivative_extended(nu: Func1D, l: float):
    """``V(s) = int_0^s nu_ext``; even and 2l-periodic."""

    def V(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        r, _ = _fold(np.abs(s), l)
        return _cumulative(nu, r, l)

    return V


def _heaviside_part(f: Func1D):
    def ev(s):
        s = np.asarray(s, dtype=float)
        return np.where(s > 0, f.eval(np.maximum(s, 0.0)), 0.0)

    return ev


def evaluate_wave_solution(spec: WaveSpec, x, y):
    """d'Alembert solution at points ``(x, y)`` (broadcast)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    l = spec.l
    if np.any(x < -1e-14) or np.any(x > l + 1e-14) or np.any(y < 0) or np.any(y > spec.T * (1 + 1e-12)):
        raise DomainError("point outside [0, l] x [0, T]")
    tau_ext = extend_odd_periodic(spec.tau, l)
    V = _antiderivative_extended(spec.nu, l)
    phil = Func1D(lambda s: np.atleast_1d(derive_phil(spec, np.atleast_1d(s))), (0.0, spec.T))
    xf, yf = x.ravel(), y.ravel()
    out = (0.5 * (tau_ext.eval(xf + yf) + tau_ext.eval(xf - yf))
           + 0.5 * (V(xf + yf) - V(xf - yf))
           + _heaviside_part(spec.phi0)(yf - xf))
    s = yf + xf - l
    live = s > 0
    if live.any():
        out[live] += phil.eval(s[live])
    out = out.reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def verify_wave_integral_condition(spec: WaveSpec, y_grid, return_all: bool = False):
    """``max_y |int_0^l u(x, y) dx - mu(y)|``."""
    res = []
    for y in np.atleast_1d(y_grid):
        # Kinks of the solution sit on the characteristics through the corners.
        kinks = [k for k in (y, spec.l - y) if 0 < k < spec.l]
        val = integrate(lambda xs: evaluate_wave_solution(spec, xs, float(y)), 0.0, spec.l,
                        breaks=kinks, atol=1e-14, rtol=1e-13).value
        res.append(val - float(spec.mu(float(y))))
    res = np.array(res)
    return res if return_all else float(np.max(np.abs(res)))


def wave_fd_residual(spec: WaveSpec, x: float, y: float, h: float, y_ratio: float = 1.0) -> float:
    """``u_xx - u_yy`` by central differences, step ``h`` in x and ``y_ratio * h`` in y.

    With equal steps the stencil is exact for any d'Alembert solution, so the
    residual sits at roundoff; unequal steps expose the O(h^2) truncation.
    """
    u = lambda a, b: evaluate_wave_solution(spec, a, b)
    k = y_ratio * h
    lo, hi = y - k, y + k
    if lo < -1e-12 * spec.T or hi > spec.T * (1 + 1e-12):
        raise DomainError("y-stencil leaves [0, T]")
    c = u(x, y)
    uxx = (u(x - h, y) - 2 * c + u(x + h, y)) / h**2
    uyy = (u(x, max(lo, 0.0)) - 2 * c + u(x, min(hi, spec.T))) / k**2
    return float(uxx - uyy)


def wave_traces(spec: WaveSpec) -> BoundaryTraces:
    """Boundary traces of the solution, ordered for the non-local wave relations."""
    l = spec.l
    dtau = derivative(spec.tau)
    dphi0 = derivative(spec.phi0)
    dmu2 = derivative(spec.derivative_mu())

    def dphil_ev(s):
        s = np.asarray(s, dtype=float)
        return (spec.nu.eval(s) + spec.nu.eval(l - s) + dtau.eval(s) - dtau.eval(l - s)
                + dmu2.eval(s) - dphi0.eval(s))

    dphil = Func1D(dphil_ev, (0.0, spec.T))
    dtau_ext = Func1D(lambda s: dtau.eval(_fold(s, l)[0]), (-math.inf, math.inf))  # even extension
    nu_ext = extend_odd_periodic(spec.nu, l)

    def ux(xb):
        def ev(y):
            y = np.asarray(y, dtype=float)
            val = (0.5 * (dtau_ext.eval(xb + y) + dtau_ext.eval(xb - y))
                   + 0.5 * (nu_ext.eval(xb + y) - nu_ext.eval(xb - y)))
            s0 = y - xb
            val = val - np.where(s0 > 0, dphi0.eval(np.maximum(s0, 0.0)), 0.0)
            s1 = y + xb - l
            if np.any(s1 > 0):
                val = val + np.where(s1 > 0, dphil.eval(np.where(s1 > 0, s1, 0.5 * spec.T)), 0.0)
            return val

        return Func1D(ev, (0.0, spec.T))

    u0 = Func1D(lambda y: evaluate_wave_solution(spec, 0.0, np.asarray(y, float)), (0.0, spec.T))
    ul = Func1D(lambda y: evaluate_wave_solution(spec, l, np.asarray(y, float)), (0.0, spec.T))
    return BoundaryTraces(u0, ul, ux(0.0), ux(l), (spec.nu, spec.tau))


# ---------------------------------------------------------------------------
# presets


@dataclass(frozen=True)
class WavePreset:
    spec: WaveSpec
    exact: Optional[object] = None


def _bump(center: float, width: float, amp: float) -> Func1D:
    def ev(x):
        x = np.asarray(x, dtype=float)
        s = (x - center) / width
        inside = np.abs(s) < 1
        out = np.zeros(x.shape)
        out[inside] = amp * np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return out

    return Func1D(ev, (-math.inf, math.inf), 0.0, None, f"bump({center},{width})")


def wave_preset(name: str, l: float = 1.0, T: float = 0.5, c: float = 1.0) -> WavePreset:
    """``sine``: standing wave; ``linear``: u = c y; ``bump``: interior pulses."""
    if name == "sine":
        k = math.pi / l
        spec = WaveSpec(l, T, sine(k), zero(), zero(), cosine(k, 2.0 * l / math.pi))
        return WavePreset(spec, lambda x, y: np.sin(k * np.asarray(x)) * np.cos(k * np.asarray(y)))
    if name == "linear":
        spec = WaveSpec(l, T, zero(), constant(c), polynomial([0.0, c]), polynomial([0.0, c * l]))
        return WavePreset(spec, lambda x, y: c * np.asarray(y) + 0.0 * np.asarray(x))
    if name == "bump":
        width = 0.25 * l
        tau = _bump(0.5 * l, width, 1.0)
        nu = _bump(0.5 * l, width, c)
        if T >= 0.5 * l - width:
            raise ValidationError("bump preset needs T < l/4 so pulses stay interior")
        m_tau = _integral(tau, 0.0, l)
        m_nu = _integral(nu, 0.0, l)
        spec = WaveSpec(l, T, tau, nu, zero(), polynomial([m_tau, m_nu]))
        return WavePreset(spec, None)
    raise DomainError(f"unknown wave preset {name!r}")
