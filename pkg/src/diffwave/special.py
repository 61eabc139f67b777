"""Wright function of the second kind, reciprocal gamma and the fundamental solution.

Two evaluation routes are used for ``phi(-beta, mu; -x)``:

* the power series, for small arguments where it is well conditioned;
* a Hankel-contour integral along the steepest-descent path through the
  saddle point, for everything else.  Along that path the integrand is
  real-exponential, so Gauss-Legendre panels reach full double precision and
  the value is assembled in log form (no overflow, graceful underflow to 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, rgamma

from .errors import DomainError, NonConvergence

__all__ = [
    "EvalResult",
    "MAX_TERMS",
    "fundamental_solution",
    "gamma_recip",
    "kernel",
    "phi",
    "wright_phi",
    "wright_phi_z_derivative",
]

MAX_TERMS = 10**6

# Saddle scale below which the power series is used.
_SERIES_LAMBDA = 0.03
# Contour truncated where lambda * (g - g0) drops below this.
_CONTOUR_DEPTH = 60.0
_PANEL_NODES = 32
_CHUNK = 2048
_PRUNE = 50.0
_EPS = np.finfo(float).eps


def gamma_recip(x):
    """Return ``1/Gamma(x)``; exactly zero at the non-positive integers."""
    out = rgamma(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class EvalResult:
    value: float
    abs_error_bound: float
    terms_used: int
    precision_mode: str  # "standard", "extended" or "contour"


def _check_beta(beta: float) -> None:
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")


def _saddle(beta: float, x):
    return (beta * x) ** (1.0 / (1.0 - beta))


# ---------------------------------------------------------------------------
# power series


def _log_envelope(beta: float, mu: float, k: np.ndarray) -> np.ndarray:
    """Upper bound for log|1/(k! Gamma(mu - beta k))| that ignores the zeros at poles."""
    a = mu - beta * k
    pos = a > 0
    env = np.where(pos, -gammaln(np.where(pos, a, 1.0)),
                   gammaln(np.where(pos, 1.0, 1.0 - a)) - math.log(math.pi))
    return env - gammaln(k + 1.0)


def _log_coeffs(beta: float, mu: float, k: np.ndarray):
    """log|1/(k! Gamma(mu - beta k))| and its sign (sign 0 at poles)."""
    a = mu - beta * k
    pole = (a <= 0) & (a == np.round(a))
    with np.errstate(divide="ignore", invalid="ignore"):
        pos = a > 0
        logc = np.where(pos, -gammaln(np.where(pos, a, 1.0)),
                        gammaln(np.where(pos, 1.0, 1.0 - a))
                        + np.log(np.abs(np.sin(np.pi * a)) / np.pi))
        sign = np.where(pos, 1.0, np.sign(np.sin(np.pi * a)))
    sign = np.where(pole, 0.0, sign)
    logc = np.where(pole, -np.inf, logc) - gammaln(k + 1.0)
    return logc, sign


@lru_cache(maxsize=256)
def _series_coeffs(beta: float, mu: float) -> np.ndarray:
    """Coefficients c_k of phi(-beta, mu; z) = sum c_k z^k, long enough for the series region."""
    xmax = _SERIES_LAMBDA ** (1.0 - beta) / beta
    n = 64
    while True:
        k = np.arange(n, dtype=float)
        logc, sign = _log_coeffs(beta, mu, k)
        logt = _log_envelope(beta, mu, k) + k * math.log(xmax)
        peak = int(np.argmax(np.where(np.isfinite(logt), logt, -np.inf)))
        small = np.nonzero((logt < -45.0) & (k > peak))[0]
        if small.size >= 4:
            n = int(small[3]) + 1
            break
        n *= 2
    return (sign * np.exp(logc))[:n]


def _series_vec(beta: float, mu: float, z: np.ndarray) -> np.ndarray:
    return npoly.polyval(z, _series_coeffs(beta, mu))


# ---------------------------------------------------------------------------
# steepest-descent contour


@lru_cache(maxsize=512)
def _contour_table(beta: float, level: int, refine: int = 1):
    """Quadrature data on the path w = r(t) e^{it}, t in [0, pi / 2^level].

    Returns nodes, weights, g - g0, log r and r'/r, computed in extended
    precision because g - g0 suffers cancellation near t = 0.
    """
    tc = math.pi / 2**level
    if level == 0:
        # r(t) blows up as t -> pi; grade the panels toward pi.
        edges = [0.0, math.pi / 2] + [math.pi - math.pi / 2**j for j in range(2, 14)] + [math.pi]
    else:
        edges = [0.0, tc / 2, tc]
    edges = np.asarray(edges)
    if refine > 1:
        fine = [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
        edges = np.append(np.concatenate(fine), edges[-1])
    xg, wg = leggauss(_PANEL_NODES)
    half = 0.5 * np.diff(edges)
    nodes = (half[:, None] * xg + (edges[:-1] + half)[:, None]).ravel()
    weights = (half[:, None] * wg).ravel()

    dg = np.empty_like(nodes)
    logr = np.empty_like(nodes)
    dlog = np.empty_like(nodes)
    with mpmath.workdps(40 + 2 * level):
        b = mpmath.mpf(beta)
        g0 = -(1 - b) / b
        for i, t in enumerate(nodes):
            t = mpmath.mpf(t)
            q = mpmath.sin(b * t) / (b * mpmath.sin(t))
            lr = mpmath.log(q) / (1 - b)
            r = mpmath.exp(lr)
            g = -r * mpmath.sin((1 - b) * t) / mpmath.sin(b * t)
            dg[i] = float(g - g0)
            logr[i] = float(lr)
            dlog[i] = float((b * mpmath.cot(b * t) - mpmath.cot(t)) / (1 - b))
        t = mpmath.mpf(tc)
        if level == 0:
            end = -math.inf
        else:
            q = mpmath.sin(b * t) / (b * mpmath.sin(t))
            r = q ** (1 / (1 - b))
            end = float(-r * mpmath.sin((1 - b) * t) / mpmath.sin(b * t) - g0)
    return nodes, weights, dg, logr, dlog, end


def _pick_level(beta: float, lam: float) -> int:
    """Smallest angular window that still captures the integrand to e^-depth."""
    guess = math.sqrt(2.0 * _CONTOUR_DEPTH / ((1.0 - beta) * lam))
    level = max(0, int(math.floor(math.log2(math.pi / guess))) - 1)
    while level > 0 and lam * -_contour_table(beta, level)[5] < _CONTOUR_DEPTH:
        level -= 1
    while lam * -_contour_table(beta, level + 1)[5] >= _CONTOUR_DEPTH:
        level += 1
    return level


def _pick_levels(beta: float, lam: np.ndarray) -> np.ndarray:
    top = _pick_level(beta, float(lam.max()))
    depth = np.array([-_contour_table(beta, lev)[5] for lev in range(1, top + 1)])
    return np.sum(lam[:, None] * depth[None, :] >= _CONTOUR_DEPTH, axis=1)


def _contour_vec(beta: float, mu: float, x: np.ndarray, refine: int = 1) -> np.ndarray:
    lam = _saddle(beta, x)
    g0 = 1.0 - 1.0 / beta
    with np.errstate(divide="ignore"):
        logpre = (1.0 - mu) * np.log(lam) + lam * g0
    out = np.zeros_like(x)
    # The magnitude is at most ~exp(logpre) times a modest factor.
    live = logpre > -800.0
    if not live.any():
        return out
    idx = np.nonzero(live)[0]
    levels = _pick_levels(beta, lam[idx])
    for lev in np.unique(levels):
        sel = idx[levels == lev]
        nodes, w, dg, logr, dlog, _ = _contour_table(beta, int(lev), refine)
        a = (np.cos((1.0 - mu) * nodes) + dlog * np.sin((1.0 - mu) * nodes)) * w / np.pi
        finite = np.isfinite(a) & np.isfinite(logr)
        a, dg, logr = a[finite], dg[finite], logr[finite]
        if lev == 0:
            # Octave bins in lambda; nodes far down the path are dropped once
            # their weight is below e^-_PRUNE for the smallest lambda in the bin.
            octave = np.floor(np.log2(lam[sel])).astype(int)
            groups = [(sel[octave == o], 2.0**o) for o in np.unique(octave)]
        else:
            groups = [(sel, None)]
        for part_all, lam_lo in groups:
            if lam_lo is None:
                aa, dd, ll = a, dg, logr
            else:
                keep = lam_lo * dg + (1.0 - mu) * logr + np.log(np.abs(a) + 1e-300) > -_PRUNE
                aa, dd, ll = a[keep], dg[keep], logr[keep]
            for start in range(0, part_all.size, _CHUNK):
                part = part_all[start:start + _CHUNK]
                expo = np.outer(lam[part], dd) + (1.0 - mu) * ll + logpre[part, None]
                out[part] = np.exp(expo) @ aa
    return out


# ---------------------------------------------------------------------------
# public evaluators


def phi(beta: float, mu: float, z):
    """Vectorised ``phi(-beta, mu; z)`` for real ``z <= 0``.

    Accuracy is close to double precision throughout; values below the
    double range come back as 0.
    """
    _check_beta(beta)
    z = np.asarray(z, dtype=float)
    if np.any(z > 0):
        raise DomainError("phi is implemented for z <= 0 only")
    x = -z.ravel()
    out = np.empty_like(x)
    use_series = _saddle(beta, x) < _SERIES_LAMBDA
    if use_series.any():
        out[use_series] = _series_vec(beta, mu, -x[use_series])
    if (~use_series).any():
        out[~use_series] = _contour_vec(beta, mu, x[~use_series])
    return out.reshape(z.shape) if z.ndim else float(out[0])


def _series_scalar(beta: float, mu: float, z: float, target: float) -> EvalResult:
    """Term-by-term summation with a geometric tail bound."""
    terms = []
    t = 1.0  # z^k / k!
    lz = math.log(abs(z))
    prev = None
    for k in range(MAX_TERMS):
        terms.append(t * rgamma(mu - beta * k))
        # |term_k| <= exp(env); the envelope is smooth, so its ratio is a
        # reliable tail estimate even where individual terms vanish.
        log_env = float(_log_envelope(beta, mu, np.array([float(k)]))[0]) + k * lz
        env = math.exp(log_env)
        if prev is not None and k > 2:
            ratio = math.exp(log_env - prev)
            if ratio < 1.0 and abs(z) < k + 1:
                tail = env * ratio / (1.0 - ratio)
                if env < target and tail < target:
                    value = math.fsum(terms)
                    rounding = 4 * _EPS * math.fsum(abs(v) for v in terms)
                    if rounding > target:
                        return _series_extended(beta, mu, z, target)
                    return EvalResult(value, tail + rounding, k + 1, "standard")
        prev = log_env
        t *= z / (k + 1)
    raise NonConvergence(f"series did not converge within {MAX_TERMS} terms")


def _series_extended(beta: float, mu: float, z: float, target: float) -> EvalResult:
    """Series in multiprecision; working digits cover the peak term and the target."""
    lz = math.log(abs(z))
    logpeak = -math.inf
    k = 0
    while True:
        lt = k * lz + float(_log_envelope(beta, mu, np.array([float(k)]))[0])
        logpeak = max(logpeak, lt)
        if k > abs(z) and lt < math.log(target) - 10:
            break
        k += 1
        if k > MAX_TERMS:
            raise NonConvergence(f"series did not converge within {MAX_TERMS} terms")
    digits = int((logpeak - math.log(target)) / math.log(10)) + 25
    with mpmath.workdps(max(30, digits)):
        zz = mpmath.mpf(z)
        b, m = mpmath.mpf(beta), mpmath.mpf(mu)
        s = mpmath.mpf(0)
        t = mpmath.mpf(1)
        for j in range(k + 1):
            s += t * mpmath.rgamma(m - b * j)
            t = t * zz / (j + 1)
        value = float(s)
    return EvalResult(value, target, k + 1, "extended")


def wright_phi(beta: float, mu: float, z: float, target_abs_err: float = 1e-15,
               method: str = "auto") -> EvalResult:
    """Evaluate ``phi(-beta, mu; z) = sum_k z^k / (k! Gamma(mu - beta k))``.

    Parameters
    ----------
    beta : float
        In (0, 1).
    mu : float
        Second parameter.
    z : float
        Non-positive argument.
    target_abs_err : float
        Absolute accuracy requested from the series routes.
    method : {"auto", "series", "extended", "contour"}
        ``auto`` picks the series for small saddle scale and the contour
        otherwise.

    Returns
    -------
    EvalResult
        Value, error bound, number of terms (or quadrature nodes), and the
        route taken.
    """
    _check_beta(beta)
    if z > 0:
        raise DomainError("wright_phi is implemented for z <= 0 only")
    if target_abs_err <= 0:
        raise DomainError("target_abs_err must be positive")
    if z == 0:
        return EvalResult(gamma_recip(mu), 0.0, 1, "standard")
    if method == "auto":
        method = "series" if _saddle(beta, -z) < _SERIES_LAMBDA else "contour"
    if method == "series":
        return _series_scalar(beta, mu, z, target_abs_err)
    if method == "extended":
        return _series_extended(beta, mu, z, target_abs_err)
    if method != "contour":
        raise DomainError(f"unknown method {method!r}")
    x = np.array([-z])
    coarse = float(_contour_vec(beta, mu, x, refine=1)[0])
    fine = float(_contour_vec(beta, mu, x, refine=2)[0])
    lam = float(_saddle(beta, -z))
    # relative sensitivity of the value to rounding in z is about E / (1 - beta)
    rounding = 8 * _EPS * abs(fine) * (1.0 + lam * (1.0 / beta - 1.0) / (1.0 - beta))
    level = _pick_level(beta, lam)
    nodes = _contour_table(beta, level, 2)[0].size
    return EvalResult(fine, abs(fine - coarse) + rounding, nodes, "contour")


def wright_phi_z_derivative(beta: float, mu: float, z: float, target_abs_err: float = 1e-15,
                            method: str = "auto") -> EvalResult:
    """d/dz phi(-beta, mu; z), which equals phi(-beta, mu - beta; z)."""
    return wright_phi(beta, mu - beta, z, target_abs_err, method)


def kernel(beta: float, theta: float, x, y):
    """Self-similar kernel ``y^(theta-1) phi(-beta, theta; -|x| y^-beta)`` (vectorised, y > 0)."""
    x = np.abs(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    out = np.zeros(x.shape)
    pos = y > 0
    if pos.any():
        yp = y[pos]
        out[pos] = yp ** (theta - 1.0) * phi(beta, theta, -x[pos] * yp ** (-beta))
    return out if out.ndim else float(out)


def fundamental_solution(beta: float, x, y, target_abs_err: float = 1e-15):
    """``Gamma(x, y) = y^(beta-1)/2 * phi(-beta, beta; -|x| y^-beta)`` for y > 0."""
    if np.any(np.asarray(y) <= 0):
        raise DomainError("fundamental_solution requires y > 0")
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        z = -abs(x) * y ** (-beta)
        res = wright_phi(beta, beta, z, target_abs_err)
        return 0.5 * y ** (beta - 1.0) * res.value
    return 0.5 * kernel(beta, beta, x, y)
