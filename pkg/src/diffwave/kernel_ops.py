"""The two Wright-kernel integral operator families and their composition laws.

With ``K_theta(x, y) = y^(theta-1) phi(-beta, theta; -|x| y^-beta)``:

* spatial operator  ``N[theta, x, y] tau = 1/2 int_{x1}^{x2} tau(t) K_theta(x - t, y) dt``
* temporal operator ``R[delta, x] mu(y) = 1/2 int_0^y mu(s) K_delta(x, y - s) ds``

Both are evaluated by adaptive product quadrature directly on function
handles.  The kernel decays like ``exp(-c z^(1/(1-beta)))`` in
``z = |x| y^-beta``; beyond a precomputed radius it is treated as zero, which
also truncates every image sum used by the solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc, rgamma

from . import special
from .errors import DomainError
from .frac import extrapolate_to_zero, rl_derivative, rl_integral, rl_operator
from .func import Func1D
from .quadrature import integrate

__all__ = [
    "HeatKernel",
    "NOperator",
    "ROperator",
    "WrightKernel",
    "apply_N",
    "apply_R",
    "PropertyCheck",
    "compose_D_N",
    "compose_D_R",
    "compose_R_N",
    "compose_R_semigroup",
    "integrate_N_over_x",
    "integrate_R_over_x",
    "make_kernel",
    "n_values",
    "property2_rhs",
    "property3_limit",
    "property4_limit",
    "r_values",
    "support_radius",
    "verify_property",
]

# Kernel values below this (relative to O(1) magnitudes) are dropped.
NEGLIGIBLE = 1e-20


@lru_cache(maxsize=256)
def support_radius(beta: float, theta: float) -> float:
    """Argument beyond which ``|phi(-beta, theta; -z)| (1 + z)^2`` stays below NEGLIGIBLE."""
    z = np.geomspace(1e-3, 1e7, 4000)
    vals = np.abs(special.phi(beta, theta, -z)) * (1.0 + z) ** 2
    above = np.nonzero(vals > NEGLIGIBLE)[0]
    if above.size == 0:
        return float(z[0])
    last = above[-1]
    return float(z[min(last + 1, z.size - 1)]) * 1.05


class WrightKernel:
    """``K_theta(x, y)`` built from the Wright function."""

    def __init__(self, beta: float):
        if not 0.0 < beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {beta}")
        self.beta = float(beta)

    def __call__(self, theta: float, x, y):
        # Only points inside the support radius reach the Wright evaluator.
        x = np.abs(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        out = np.zeros(x.shape)
        live = (y > 0) & (x < self.radius(theta) * np.where(y > 0, y, 0.0) ** self.beta)
        if live.any():
            out[live] = special.kernel(self.beta, theta, x[live], y[live])
        return out if out.ndim else float(out)

    def radius(self, theta: float) -> float:
        return support_radius(self.beta, theta)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(beta={self.beta})"


class HeatKernel(WrightKernel):
    """beta = 1/2 kernels written with Gaussians and erfc.

    Orders outside {-1/2, 0, 1/2, 1, 3/2} fall back to the Wright series.
    """

    _SQPI = math.sqrt(math.pi)

    def __init__(self):
        super().__init__(0.5)

    def __call__(self, theta: float, x, y):
        x = np.abs(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        if theta not in (-0.5, 0.0, 0.5, 1.0, 1.5):
            return super().__call__(theta, x, y)
        out = np.zeros(x.shape)
        pos = y > 0
        yp = y[pos]
        z = x[pos] / np.sqrt(yp)
        gauss = np.exp(-0.25 * z * z) / self._SQPI
        if theta == 0.5:
            phi = gauss
        elif theta == 0.0:
            phi = 0.5 * z * gauss
        elif theta == -0.5:
            phi = (0.25 * z * z - 0.5) * gauss
        elif theta == 1.0:
            phi = erfc(0.5 * z)
        else:
            phi = 2.0 * (gauss - 0.5 * z * erfc(0.5 * z))
        out[pos] = yp ** (theta - 1.0) * phi
        return out if out.ndim else float(out)


def make_kernel(beta: float, closed_form: bool = True) -> WrightKernel:
    """Kernel for ``beta``; the Gaussian forms are used at beta = 1/2 when allowed."""
    if closed_form and beta == 0.5:
        return HeatKernel()
    return WrightKernel(beta)


def _kernel(beta: float, kern):
    if kern is None:
        return WrightKernel(beta)
    if kern.beta != beta:
        raise DomainError("kernel beta does not match")
    return kern


# ---------------------------------------------------------------------------
# single operators


@dataclass(frozen=True)
class NOperator:
    theta: float
    x1: float
    x2: float
    x: float
    y: float


@dataclass(frozen=True)
class ROperator:
    delta: float
    x: float


def _geometric(center, first, limit, ratio=4.0):
    """Points center +- first * ratio^j while inside +- limit."""
    pts = []
    step = first
    while step < limit:
        pts.extend((center - step, center + step))
        step *= ratio
    return pts


def _groups(scales, ratio=4.0):
    """Index groups whose scales differ by less than ``ratio`` (shared meshes)."""
    key = np.floor(np.log(scales) / math.log(ratio)).astype(int)
    return [np.nonzero(key == k)[0] for k in np.unique(key)]


def _n_multi(kern, theta, offsets, coeffs, x1, x2, ys, tau, tol):
    """``sum_i c_i N[theta, p_i, y] tau`` over ``[x1, x2]`` for an array of times.

    All offsets share one quadrature; times are grouped by kernel width so
    each group shares a mesh refined at its own scale.
    """
    beta = kern.beta
    if theta + beta <= 0:
        raise DomainError("the spatial operator needs theta + beta > 0")
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if np.any(ys <= 0):
        raise DomainError("the spatial operator needs y > 0")
    offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
    coeffs = np.broadcast_to(np.asarray(coeffs, dtype=float), offsets.shape)
    out = np.zeros(ys.shape)
    if x2 <= x1 or offsets.size == 0:
        return out
    widths = ys**beta
    radius = kern.radius(theta)
    for idx in _groups(widths):
        w = widths[idx]
        reach = radius * w.max()
        gap = np.maximum(np.maximum(x1 - offsets, offsets - x2), 0.0)
        keep = (gap < reach) & (coeffs != 0.0)
        if not keep.any():
            continue
        p, c = offsets[keep], coeffs[keep]
        lo, hi = max(x1, p.min() - reach), min(x2, p.max() + reach)
        if hi <= lo:
            continue
        breaks = []
        near = gap[keep] < 4.0 * w.min()
        for q in p[near]:
            breaks.append(q)
            breaks.extend(_geometric(q, 0.25 * w.min(), reach))
        breaks = [b for b in breaks if lo < b < hi]
        yy = ys[idx][:, None, None]

        def integrand(t, yy=yy, p=p, c=c):
            k = kern(theta, p[None, :, None] - t[None, None, :], yy)
            return tau.eval(t)[None, :] * np.einsum("j,yjt->yt", c, k)

        res = integrate(integrand, lo, hi, breaks=breaks, atol=tol * 1e-2, rtol=tol)
        out[idx] = 0.5 * np.asarray(res.value).ravel()
    return out


def _n_values(kern, theta, x, x1, x2, ys, tau, tol):
    """Spatial operator for an array of times."""
    return _n_multi(kern, theta, [x], [1.0], x1, x2, ys, tau, tol)


def _n_value(kern, theta, x, x1, x2, y, tau, tol):
    return float(_n_values(kern, theta, x, x1, x2, [y], tau, tol)[0])


def n_values(theta, beta, tau: Func1D, x, x1, x2, ys, tol=1e-12, kernel=None):
    """``N[theta, x, y] tau`` over ``[x1, x2]`` for every ``y`` in ``ys``."""
    return _n_values(_kernel(beta, kernel), theta, x, x1, x2, ys, tau, tol)


def apply_N(op: NOperator, beta: float, tau: Func1D, tol: float = 1e-12, kernel=None) -> float:
    """``1/2 int_{x1}^{x2} tau(t) y^(theta-1) phi(-beta, theta; -|x-t| y^-beta) dt``."""
    kern = _kernel(beta, kernel)
    return _n_value(kern, op.theta, op.x, op.x1, op.x2, op.y, tau, tol)


def _r_at_zero(delta, mu, ys, tol):
    # Limit x -> 0: half the fractional integral (or the function itself).
    if delta > 0:
        return 0.5 * np.atleast_1d(rl_integral(mu, -delta, ys, tol))
    if delta == 0:
        return 0.5 * np.atleast_1d(mu(ys))
    return 0.5 * np.atleast_1d(rl_derivative(mu, -delta, ys, tol))


def _r_multi(kern, delta, offsets, coeffs, mu, ys, tol):
    """``sum_i c_i R[delta, p_i] mu (y)`` for an array of times.

    Uses ``t = y v`` so every time shares the reference interval; a zero
    offset contributes the limiting value ``1/2 D^-delta mu``.
    """
    beta = kern.beta
    if delta + beta <= 0:
        raise DomainError("the temporal operator needs delta + beta > 0")
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    offsets = np.abs(np.atleast_1d(np.asarray(offsets, dtype=float)))
    coeffs = np.broadcast_to(np.asarray(coeffs, dtype=float), offsets.shape)
    out = np.zeros(ys.shape)
    pos = ys > 0
    if not pos.any() or offsets.size == 0:
        return out
    yp = ys[pos]
    res_pos = np.zeros(yp.shape)
    zero = (offsets == 0.0) & (coeffs != 0.0)
    if zero.any():
        res_pos += coeffs[zero].sum() * _r_at_zero(delta, mu, yp, tol)
    radius = kern.radius(delta)
    reach = radius * yp.max() ** beta
    keep = (offsets > 0.0) & (offsets < reach) & (coeffs != 0.0)
    if keep.any():
        p, c = offsets[keep], coeffs[keep]
        t_min = (p.min() / radius) ** (1.0 / beta)
        live = yp > t_min
        if live.any():
            yl = yp[live]
            gam = mu.singular_exponent
            v_min = t_min / yl.max()
            yy = yl[:, None]

            def integrand(v):
                s = yy * (1.0 - v[None, :])
                with np.errstate(divide="ignore", invalid="ignore"):
                    vals = mu.eval(s) if gam == 0 else mu.eval(s) / (s / yy) ** gam
                k = kern(delta, p[None, :, None], (yy * v[None, :])[:, None, :])
                return vals * np.einsum("j,yjt->yt", c, k)

            breaks = [b for b in _geometric(0.0, 2.0 * t_min / yl.min(), 1.0) if v_min < b < 1.0]
            res = integrate(integrand, v_min, 1.0, right=gam, breaks=breaks,
                            atol=tol * 1e-2, rtol=tol)
            sub = np.zeros(yp.shape)
            sub[live] = 0.5 * np.asarray(res.value).reshape(yl.shape) * yl
            res_pos += sub
    out[pos] = res_pos
    return out


def _r_values(kern, delta, x, mu, ys, tol):
    """Temporal operator for an array of times."""
    return _r_multi(kern, delta, [x], [1.0], mu, ys, tol)


def _r_value(kern, delta, x, mu, y, tol):
    return float(_r_values(kern, delta, x, mu, [y], tol)[0])


def r_values(delta, beta, mu: Func1D, x, ys, tol=1e-12, kernel=None):
    """``R[delta, x] mu (y)`` for every ``y`` in ``ys``."""
    return _r_values(_kernel(beta, kernel), delta, x, mu, ys, tol)


def apply_R(op: ROperator, beta: float, mu: Func1D, y, tol: float = 1e-12, kernel=None):
    """``1/2 int_0^y mu(s) (y-s)^(delta-1) phi(-beta, delta; -|x| (y-s)^-beta) ds``.

    At ``x = 0`` the limiting value ``1/2 D^-delta mu(y)`` is returned.
    Accepts an array of ``y``.
    """
    kern = _kernel(beta, kernel)
    vals = _r_values(kern, op.delta, op.x, mu, np.ravel(y), tol)
    return float(vals[0]) if np.ndim(y) == 0 else vals.reshape(np.shape(y))


# ---------------------------------------------------------------------------
# compositions and property checks


def _as_func(fn, exponent: float = 0.0, label: str = "") -> Func1D:
    return Func1D(fn, (0.0, math.inf), exponent, None, label)


def compose_R_semigroup(delta1, x1, delta2, x2, beta, mu: Func1D, y, tol=1e-10, kernel=None):
    """Nested value of ``(2R[delta1, x1]) (2R[delta2, x2]) mu (y)``."""
    kern = _kernel(beta, kernel)
    inner_tol = tol / 10.0

    def inner(s):
        s = np.atleast_1d(s)
        return 2.0 * _r_values(kern, delta2, x2, mu, s.ravel(), inner_tol).reshape(s.shape)

    return 2.0 * _r_value(kern, delta1, x1, _as_func(inner), y, tol)


def compose_R_N(delta, a, theta, b, beta, l, tau: Func1D, y, tol=1e-10, kernel=None):
    """Nested value of ``R[delta, a] N_{0l}[theta, b, .] tau (y)``."""
    if a < 0:
        raise DomainError("compose_R_N needs a >= 0")
    kern = _kernel(beta, kernel)
    inner_tol = tol / 10.0

    def inner(s):
        s = np.atleast_1d(s)
        out = np.zeros(s.size)
        pos = s.ravel() > 0
        out[pos] = _n_values(kern, theta, b, 0.0, l, s.ravel()[pos], tau, inner_tol)
        return out.reshape(s.shape)

    # Near s = 0 the inner function behaves like s^(theta+beta-1) when b is in [0, l].
    exponent = theta + beta - 1.0 if 0.0 <= b <= l else 0.0
    return _r_value(kern, delta, a, _as_func(inner, exponent), y, tol)


def property2_rhs(delta, a, theta, b, beta, l, tau: Func1D, y, tol=1e-12, kernel=None):
    """Closed right-hand side of the R-N composition law (three cases in b)."""
    kern = _kernel(beta, kernel)
    order = delta + theta
    if b <= 0:
        return 0.5 * _n_value(kern, order, b - a, 0.0, l, y, tau, tol)
    if b >= l:
        return 0.5 * _n_value(kern, order, a + b, 0.0, l, y, tau, tol)
    return 0.5 * (_n_value(kern, order, a + b, 0.0, b, y, tau, tol)
                  + _n_value(kern, order, b - a, b, l, y, tau, tol))


def integrate_R_over_x(theta, a, sign, beta, mu: Func1D, l, y, tol=1e-10, kernel=None):
    """``int_0^l R[theta, a + sign*x] mu (y) dx`` by outer quadrature.

    The closed form is ``sign * (R[theta+beta, a] - R[theta+beta, a+sign*l]) mu``.
    """
    kern = _kernel(beta, kernel)

    def inner(x):
        return np.array([_r_value(kern, theta, a + sign * v, mu, y, tol / 10.0) for v in x])

    kinks = [abs(a)] if 0 < -sign * a < l else []
    res = integrate(inner, 0.0, l, breaks=kinks, atol=tol, rtol=tol)
    return float(res.value)


def integrate_N_over_x(delta, a, sign, beta, tau: Func1D, l, y, tol=1e-10, kernel=None):
    """``int_0^l N_{0l}[delta, a + sign*x, y] tau dx`` by outer quadrature."""
    kern = _kernel(beta, kernel)

    def inner(x):
        return np.array([_n_value(kern, delta, a + sign * v, 0.0, l, y, tau, tol / 10.0) for v in x])

    # The inner value is smooth in x except where the offset enters [0, l].
    kinks = [v for v in (-a * sign, (l - a) * sign) if 0 < v < l]
    res = integrate(inner, 0.0, l, breaks=kinks, atol=tol, rtol=tol)
    return float(res.value)


def property3_limit(delta, beta, mu: Func1D, y, tol=1e-12, exponents=(1, 2, 3), kernel=None):
    """Extrapolate ``R[delta, x] mu (y)`` from x = 10^-1..10^-4 to x = 0.

    Returns ``(extrapolated, 1/2 D^-delta mu (y))``.
    """
    kern = _kernel(beta, kernel)
    xs = 10.0 ** -np.arange(1, 5)
    vals = [_r_value(kern, delta, float(x), mu, y, tol) for x in xs]
    limit, _ = extrapolate_to_zero(xs, vals, exponents)
    target = 0.5 * float(rl_integral(mu, -delta, y, tol)) if delta > 0 else 0.5 * float(mu(y))
    return limit, target


def property4_limit(k, n, beta, tau: Func1D, l, x, ys=(0.1, 0.05, 0.025), tol=1e-8, kernel=None):
    """Extrapolate ``D^(2beta-n) N_{0l}[beta-k+1, x, y] tau`` to y = 0.

    The fractional integral acts on the y-dependence numerically.  Returns
    ``(extrapolated, expected)`` with expected ``tau(x)`` for ``k == n`` and 0
    otherwise.
    """
    kern = _kernel(beta, kernel)
    theta = beta - k + 1.0

    def g(s):
        s = np.atleast_1d(s)
        out = np.zeros(s.size)
        pos = s.ravel() > 0
        out[pos] = _n_values(kern, theta, x, 0.0, l, s.ravel()[pos], tau, tol * 1e-2)
        return out.reshape(s.shape)

    f = _as_func(g, theta + beta - 1.0)
    vals = np.atleast_1d(rl_operator(f, 2.0 * beta - n, np.asarray(ys, float), tol))
    powers = (2.0 * beta, 4.0 * beta) if k == n else (1.0, 1.0 + 2.0 * beta)
    limit, _ = extrapolate_to_zero(np.asarray(ys, float), vals, powers)
    expected = float(tau(x)) if k == n else 0.0
    return limit, expected


def compose_D_R(theta, delta, x, beta, mu: Func1D, y, tol=1e-10, kernel=None):
    """Nested value of ``D^-theta R[delta, x] mu (y)``; equals ``R[delta+theta, x] mu (y)``."""
    kern = _kernel(beta, kernel)

    def inner(s):
        s = np.atleast_1d(s)
        return _r_values(kern, delta, x, mu, s.ravel(), tol / 10.0).reshape(s.shape)

    return float(rl_integral(_as_func(inner), -theta, y, tol))


def compose_D_N(delta, theta, x, beta, tau: Func1D, l, y, tol=1e-10, kernel=None):
    """Nested value of ``D^-delta N_{0l}[theta, x, .] tau (y)``; equals ``N[delta+theta, x, y] tau``."""
    kern = _kernel(beta, kernel)

    def inner(s):
        s = np.atleast_1d(s)
        out = np.zeros(s.size)
        pos = s.ravel() > 0
        out[pos] = _n_values(kern, theta, x, 0.0, l, s.ravel()[pos], tau, tol / 10.0)
        return out.reshape(s.shape)

    exponent = theta + beta - 1.0 if 0.0 <= x <= l else 0.0
    return float(rl_integral(_as_func(inner, exponent), -delta, y, tol))


# ---------------------------------------------------------------------------
# randomized verification driver


@dataclass
class PropertyCheck:
    property: int
    draw: int
    params: dict
    lhs: float
    rhs: float

    @property
    def abs_diff(self) -> float:
        return abs(self.lhs - self.rhs)


def _test_data(rng):
    c = rng.uniform(0.5, 1.5, size=3)
    mu = Func1D(lambda s: c[0] + c[1] * np.sin(c[2] * s), (0.0, math.inf), 0.0, None, "trig")
    tau = Func1D(lambda t: c[0] + c[1] * t - 0.3 * c[2] * t * t, (-math.inf, math.inf), 0.0, None, "quad")
    return mu, tau


def verify_property(prop: int, beta: float, seed: int = 0, draws: int = 3, tol: float = 1e-9,
                    y: float = 1.0, l: float = 1.0):
    """Evaluate both sides of an operator identity for random parameters.

    ``prop`` 1-6 are the numbered composition/limit laws and 7 the
    fractional-integral composition rules.  Returns ``PropertyCheck`` rows.
    """
    if not 0 < beta < 1:
        raise DomainError("beta must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    kern = WrightKernel(beta)
    rows = []
    for draw in range(draws):
        mu, tau = _test_data(rng)
        if prop == 1:
            d1, d2 = rng.uniform(0.05, 1.0, 2)
            x1, x2 = rng.uniform(0.05, 2.0, 2)
            lhs = compose_R_semigroup(d1, x1, d2, x2, beta, mu, y, tol, kern)
            rhs = 2.0 * _r_value(kern, d1 + d2, x1 + x2, mu, y, tol)
            params = dict(delta1=d1, x1=x1, delta2=d2, x2=x2)
        elif prop == 2:
            d = rng.uniform(max(0.05, 0.05 - beta), 1.0)
            th = rng.uniform(0.05, 1.0)
            a = rng.uniform(0.0, 1.0)
            b = float(rng.choice([-0.3, 0.0, 0.5, 1.0, 1.4]) * l)
            lhs = compose_R_N(d, a, th, b, beta, l, tau, y, tol, kern)
            rhs = property2_rhs(d, a, th, b, beta, l, tau, y, tol, kern)
            params = dict(delta=d, a=a, theta=th, b=b)
        elif prop == 3:
            d = rng.uniform(0.05, 1.0)
            lhs, rhs = property3_limit(d, beta, mu, y, tol, kernel=kern)
            params = dict(delta=d)
        elif prop == 4:
            n = 1 if beta <= 0.5 else 2
            k = int(rng.integers(1, n + 1))
            # A window wide enough that the ends of [0, L] do not reach x.
            span = 2.0 * max(3.0, kern.radius(beta - k + 1.0) * 0.1**beta)
            xx = rng.uniform(0.45, 0.55) * span
            lhs, rhs = property4_limit(k, n, beta, tau, span, xx, tol=max(tol, 1e-8), kernel=kern)
            params = dict(k=k, n=n, x=xx)
        elif prop == 5:
            th = rng.uniform(0.05, 1.0)
            sign = int(rng.choice([-1, 1]))
            a = rng.uniform(0.1, 1.0) + (l if sign < 0 else 0.0)
            lhs = integrate_R_over_x(th, a, sign, beta, mu, l, y, tol, kern)
            rhs = sign * (_r_value(kern, th + beta, a, mu, y, tol)
                          - _r_value(kern, th + beta, a + sign * l, mu, y, tol))
            params = dict(theta=th, a=a, sign=sign)
        elif prop == 6:
            d = rng.uniform(0.05, 1.0)
            case = draw % 3
            order = d + beta
            if case == 0:
                sign = int(rng.choice([-1, 1]))
                a = float(rng.choice([-1, 1])) * rng.uniform(2.0, 3.0) * l
                lhs = integrate_N_over_x(d, a, sign, beta, tau, l, y, tol, kern)
                rhs = sign * math.copysign(1.0, a) * (
                    _n_value(kern, order, a, 0.0, l, y, tau, tol)
                    - _n_value(kern, order, a + sign * l, 0.0, l, y, tau, tol))
                params = dict(delta=d, a=a, sign=sign, identity=1)
            elif case == 1:
                lhs = integrate_N_over_x(d, 0.0, -1, beta, tau, l, y, tol, kern)
                rhs = (_n_value(kern, order, 0.0, 0.0, l, y, tau, tol)
                       - _n_value(kern, order, -l, 0.0, l, y, tau, tol))
                params = dict(delta=d, identity=2)
            else:
                lhs = integrate_N_over_x(d, 0.0, 1, beta, tau, l, y, tol, kern)
                total = integrate(tau.eval, 0.0, l, atol=tol, rtol=tol).value
                rhs = (-(_n_value(kern, order, 0.0, 0.0, l, y, tau, tol)
                         + _n_value(kern, order, l, 0.0, l, y, tau, tol))
                       + y ** (order - 1.0) * float(rgamma(order)) * total)
                params = dict(delta=d, identity=3)
        elif prop == 7:
            th = rng.uniform(0.1, 1.0)
            d = rng.uniform(0.05, 1.0)
            xx = rng.uniform(0.1, 1.0)
            if draw % 2 == 0:
                lhs = compose_D_R(th, d, xx, beta, mu, y, tol, kern)
                rhs = _r_value(kern, d + th, xx, mu, y, tol)
                params = dict(theta=th, delta=d, x=xx, rule="R")
            else:
                lhs = compose_D_N(d, th, xx * l, beta, tau, l, y, tol, kern)
                rhs = _n_value(kern, d + th, xx * l, 0.0, l, y, tau, tol)
                params = dict(theta=th, delta=d, x=xx * l, rule="N")
        else:
            raise DomainError(f"unknown property {prop}")
        rows.append(PropertyCheck(prop, draw, params, float(lhs), float(rhs)))
    return rows
