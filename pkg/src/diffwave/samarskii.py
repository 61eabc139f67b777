"""Samarskii problem for the diffusion-wave equation on a strip.

Find ``u`` with ``u_xx = D^alpha u`` on ``(0, l) x (0, T]``, prescribed initial
traces ``tau_k``, a two-point boundary combination ``a1 u(0,y) + a2 u(l,y) =
phi(y)`` and the integral condition ``int_0^l u(x, y) dx = mu(y)``.

Integrating the equation in ``x`` turns the integral condition into a flux
condition ``u_x(l,y) - u_x(0,y) = D^alpha mu``.  Together with the necessary
non-local relations this gives a Volterra equation for ``psi = u(0,.) +
u(l,.)``, solved in closed form by an image series.  The boundary traces follow
from a 2x2 system and the solution is the Dirichlet image series built from
them.

Two evaluation routes are provided:

``direct``
    The Dirichlet series applied to the recovered traces (nested: every
    kernel node calls ``psi``).
``green``
    The same series with every operator composed out analytically, so
    ``u`` becomes three single-level integrals (data ``tau_k``, flux,
    boundary datum) against image-summed kernels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (DegenerateCoefficients, DomainError, TruncationBudgetExceeded,
                     ValidationError)
from .frac import extrapolate_to_zero, rl_derivative, rl_limit_at_base, rl_operator
from .func import Func1D, power
from .kernel_ops import _n_multi, _r_multi, make_kernel
from .nonlocal_conditions import manufactured_case, order_count
from .quadrature import integrate

__all__ = [
    "MatchingWarning",
    "ProblemSpec",
    "SolutionField",
    "boundary_residual",
    "build_Phi",
    "derive_flux_condition",
    "evaluate_solution",
    "initial_trace_limit",
    "manufactured_problem",
    "neumann_psi",
    "pde_residual",
    "psi_function",
    "recover_boundary_traces",
    "solve",
    "solve_psi",
    "verify_integral_condition",
    "volterra_residual",
]

M_MAX = 200
DEFAULT_TOL = 1e-10


class MatchingWarning(UserWarning):
    """Data violate a compatibility condition between initial and boundary data."""


@dataclass(frozen=True)
class ProblemSpec:
    """Data of the Samarskii problem.

    ``flux`` optionally supplies ``D^alpha mu`` directly; otherwise the closed
    form attached to ``mu`` is used, and failing that a numerical derivative.
    """

    alpha: float
    l: float
    T: float
    tau: tuple
    phi: Func1D
    mu: Func1D
    a1: float = 1.0
    a2: float = 0.0
    flux: Optional[Func1D] = field(default=None, compare=False)
    closed_form_kernel: bool = True

    @property
    def beta(self) -> float:
        return self.alpha / 2.0

    @property
    def n(self) -> int:
        return order_count(self.alpha)

    def kernel(self):
        # alpha = 1 switches to the Gaussian kernels automatically.
        return make_kernel(self.beta, self.closed_form_kernel)

    def validate(self, strict: bool = False, matching_tol: float = 1e-3) -> list[str]:
        """Check the hypotheses; returns matching-condition messages.

        Structural problems always raise.  Matching-condition violations are
        warnings, or ``ValidationError`` when ``strict``.
        """
        if not 0.0 < self.alpha < 2.0:
            raise ValidationError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.l <= 0 or self.T <= 0:
            raise ValidationError("l and T must be positive")
        if self.a1 == self.a2:
            raise DegenerateCoefficients("a1 == a2")
        if len(self.tau) != self.n:
            raise ValidationError(f"alpha={self.alpha} needs {self.n} initial traces, got {len(self.tau)}")
        problems = []
        # Very small times: kernel-type data must have decayed and power-type
        # corrections (powers of y^beta) are removed by the extrapolation.
        ys = self.T * 1e-8 * np.array([8.0, 4.0, 2.0, 1.0])
        powers = self.beta * np.arange(1, 4)
        n = self.n
        try:
            lim = rl_limit_at_base(self.phi, self.alpha - n, 0, ys, powers=powers)
            want = self.a1 * float(self.tau[n - 1](0.0)) + self.a2 * float(self.tau[n - 1](self.l))
            if abs(lim - want) > matching_tol * max(1.0, abs(want)):
                problems.append(f"boundary datum limit {lim:.6g} != a1*tau_n(0)+a2*tau_n(l) = {want:.6g}")
            for k in range(1, n + 1):
                lim = rl_limit_at_base(self.mu, self.alpha - k, 0, ys, powers=powers)
                want = float(integrate(self.tau[k - 1].eval, 0.0, self.l).value)
                if abs(lim - want) > matching_tol * max(1.0, abs(want)):
                    problems.append(f"integral datum limit (k={k}) {lim:.6g} != int tau_{k} = {want:.6g}")
        except (ArithmeticError, ValueError, RuntimeError) as exc:  # pragma: no cover - diagnostic only
            problems.append(f"matching check failed: {exc}")
        for msg in problems:
            if strict:
                raise ValidationError(msg)
            warnings.warn(msg, MatchingWarning, stacklevel=2)
        return problems


def _flux_function(spec: ProblemSpec) -> Func1D:
    if spec.flux is not None:
        return spec.flux
    closed = spec.mu.closed_frac(spec.alpha)
    if closed is not None:
        return closed
    mu, alpha = spec.mu, spec.alpha
    return Func1D(lambda y: rl_derivative(mu, alpha, np.where(y > 0, y, 1e-300), 1e-12),
                  (0.0, math.inf), 0.0, None, "numerical flux")


def derive_flux_condition(spec: ProblemSpec, y):
    """``D^alpha mu (y)``, the prescribed jump ``u_x(l,y) - u_x(0,y)``."""
    return _flux_function(spec)(y)


# ---------------------------------------------------------------------------
# image bookkeeping


def _reach(spec: ProblemSpec, kern, ymax: float) -> float:
    orders = [spec.beta - k + 1.0 for k in range(1, spec.n + 1)] + [0.0, spec.beta]
    return max(kern.radius(o) for o in orders) * ymax**spec.beta


def _image_count(spec: ProblemSpec, kern, ymax: float) -> int:
    m = int(math.ceil(_reach(spec, kern, ymax) / spec.l)) + 2
    if m > M_MAX:
        raise TruncationBudgetExceeded(
            f"{m} image terms needed (limit {M_MAX}); decrease T or increase l")
    return m


def _merge(offsets, coeffs, scale):
    """Combine coincident offsets (they arise from different image families)."""
    offsets = np.asarray(offsets, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    if offsets.size == 0:
        return offsets, coeffs
    key = np.round(offsets / scale, 11)
    uniq, inv = np.unique(key, return_inverse=True)
    total = np.zeros(uniq.size)
    np.add.at(total, inv, coeffs)
    first = np.zeros(uniq.size, dtype=int)
    first[inv[::-1]] = np.arange(offsets.size)[::-1]
    keep = np.abs(total) > 1e-14
    return offsets[first][keep], total[keep]


def _dirichlet_images(x: float, l: float, m: int):
    """Offsets/weights of the boundary-trace operators at ``x``.

    Returns ``(c, w_l, w_0)``: ``u`` contains ``sum_i w_l[i] R[0, c_i] trace_l +
    w_0[i] R[0, c_i] trace_0``.
    """
    ms = np.arange(1, m + 1)
    c = np.concatenate([(2 * ms - 1) * l - x, (2 * ms - 1) * l + x,
                        2 * (ms - 1) * l + x, 2 * ms * l - x])
    z = np.zeros(m)
    w_l = np.concatenate([2 + z, -2 + z, z, z])
    w_0 = np.concatenate([z, z, 2 + z, -2 + z])
    return c, w_l, w_0


def _initial_images(x: float, l: float, m: int):
    ms = np.arange(-m, m + 1)
    return (np.concatenate([2 * ms * l + x, 2 * ms * l - x]),
            np.concatenate([np.ones(ms.size), -np.ones(ms.size)]))


def _psi_parts(spec: ProblemSpec, kern, ys, tol, m, spatial_offsets, spatial_w, temporal_offsets,
               temporal_w):
    """Evaluate the image-summed integrals against tau_k and the flux."""
    g = _flux_function(spec)
    total = np.zeros(ys.shape)
    for k, tau in enumerate(spec.tau, start=1):
        total += _n_multi(kern, spec.beta - k + 1.0, spatial_offsets, spatial_w, 0.0, spec.l, ys, tau, tol)
    total += _r_multi(kern, spec.beta, temporal_offsets, temporal_w, g, ys, tol)
    return total


def _positive_times(y):
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(ys <= 0):
        raise DomainError("times must be positive")
    return ys


def solve_psi(spec: ProblemSpec, y, tol: float = DEFAULT_TOL):
    """``psi(y) = u(0,y) + u(l,y)`` from the closed-form image series.

    ``psi = 2 sum_k sum_m N[delta_k, m l] tau_k + 4 sum_{m>=1} R[beta, m l] g
    + D^-beta g`` with ``g = D^alpha mu`` and ``delta_k = beta - k + 1``.
    """
    ys = _positive_times(y)
    kern = spec.kernel()
    m = _image_count(spec, kern, ys.max())
    ms = np.arange(-m, m + 1)
    so = ms * spec.l
    sw = np.full(ms.size, 2.0)
    to = np.arange(0, m + 1) * spec.l
    tw = np.where(to == 0, 2.0, 4.0)
    vals = _psi_parts(spec, kern, ys, tol, m, so, sw, to, tw)
    return float(vals[0]) if np.ndim(y) == 0 else vals


def psi_function(spec: ProblemSpec, tol: float = DEFAULT_TOL) -> Func1D:
    """``psi`` as a function handle (singular like ``y^(alpha-n)`` at 0)."""

    def ev(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        pos = s > 0
        if pos.any():
            out[pos] = solve_psi(spec, s[pos], tol)
        return out

    return Func1D(ev, (0.0, math.inf), spec.alpha - spec.n, None, "psi")


def build_Phi(spec: ProblemSpec, y, tol: float = DEFAULT_TOL):
    """Right-hand side of the Volterra equation for ``psi``."""
    ys = _positive_times(y)
    kern = spec.kernel()
    off = np.array([0.0, spec.l])
    vals = _psi_parts(spec, kern, ys, tol, 1, off, [2.0, 2.0], off, [2.0, 2.0])
    return float(vals[0]) if np.ndim(y) == 0 else vals


def _phi_function(spec, tol):
    def ev(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        pos = s > 0
        if pos.any():
            out[pos] = build_Phi(spec, s[pos], tol)
        return out

    return Func1D(ev, (0.0, math.inf), spec.alpha - spec.n, None, "Phi")


def neumann_psi(spec: ProblemSpec, y, tol: float = DEFAULT_TOL):
    """``psi`` from the resolvent series ``Phi + 2 sum_{m>=1} R[0, m l] Phi`` (nested)."""
    ys = _positive_times(y)
    kern = spec.kernel()
    m = _image_count(spec, kern, ys.max())
    off = np.arange(0, m + 1) * spec.l
    vals = _r_multi(kern, 0.0, off, 2.0, _phi_function(spec, tol / 10.0), ys, tol)
    return float(vals[0]) if np.ndim(y) == 0 else vals


def volterra_residual(spec: ProblemSpec, y, tol: float = DEFAULT_TOL, psi: Func1D | None = None):
    """``psi(y) - 2 R[0, l] psi (y) - Phi(y)`` with ``psi`` from the image series."""
    ys = _positive_times(y)
    psi = psi if psi is not None else psi_function(spec, tol / 10.0)
    kern = spec.kernel()
    vals = psi(ys) - _r_multi(kern, 0.0, [spec.l], [2.0], psi, ys, tol) - build_Phi(spec, ys, tol)
    return float(vals[0]) if np.ndim(y) == 0 else vals


def recover_boundary_traces(spec: ProblemSpec, psi: Func1D):
    """Boundary values ``(u(0,.), u(l,.))`` from ``psi`` and the boundary datum.

    Solves ``u0 + ul = psi`` and ``a1 u0 + a2 ul = phi``.
    """
    a1, a2 = spec.a1, spec.a2
    if a1 == a2:
        raise DegenerateCoefficients("a1 == a2")
    phi0 = (psi.scale(a2) - spec.phi).scale(1.0 / (a2 - a1))
    phil = (psi.scale(a1) - spec.phi).scale(1.0 / (a1 - a2))
    return phi0, phil


# ---------------------------------------------------------------------------
# solution


@dataclass
class SolutionField:
    """Evaluable solution; ``method`` selects the evaluation route."""

    spec: ProblemSpec
    psi: Func1D
    phi0: Func1D
    phil: Func1D
    image_terms_used: int
    series_tol: float
    method: str = "green"

    def eval(self, x: float, y):
        return evaluate_solution(self.spec, x, y, self.series_tol, self.method, self)

    def __call__(self, x: float, y):
        return self.eval(x, y)


def solve(spec: ProblemSpec, tol: float = DEFAULT_TOL, method: str = "green",
          strict: bool = False, check: bool = True) -> SolutionField:
    """Validate the data and assemble the solution field."""
    if check:
        spec.validate(strict=strict)
    elif spec.a1 == spec.a2:
        raise DegenerateCoefficients("a1 == a2")
    psi = psi_function(spec, tol)
    phi0, phil = recover_boundary_traces(spec, psi)
    m = _image_count(spec, spec.kernel(), spec.T)
    return SolutionField(spec, psi, phi0, phil, m, tol, method)


def _green_terms(spec: ProblemSpec, x: float, m: int):
    """Image-summed offsets for the single-level representation of ``u(x, .)``."""
    l, a1, a2 = spec.l, spec.a1, spec.a2
    c, w_l, w_0 = _dirichlet_images(x, l, m)
    # Weight of R[0, c] psi and of R[0, c] phi after eliminating the traces.
    w_psi = w_l * a1 / (a1 - a2) + w_0 * a2 / (a2 - a1)
    w_phi = -w_l / (a1 - a2) - w_0 / (a2 - a1)
    # R[0, c] psi = sum_k [sum_{j<=0} N[delta_k, j l - c] + sum_{j>=1} N[delta_k, j l + c]] tau_k
    #             + sum_j R[beta, c + |j| l] g          (c >= 0)
    js = np.arange(-m, m + 1)
    low = js <= 0
    sp_off = np.where(low[None, :], js[None, :] * l - c[:, None], js[None, :] * l + c[:, None])
    sp_w = np.broadcast_to(w_psi[:, None], sp_off.shape)
    ti_off = c[:, None] + np.abs(js)[None, :] * l
    ti_w = np.broadcast_to(w_psi[:, None], ti_off.shape)
    init_off, init_w = _initial_images(x, l, m)
    sp = _merge(np.concatenate([sp_off.ravel(), init_off]), np.concatenate([sp_w.ravel(), init_w]), l)
    ti = _merge(ti_off.ravel(), ti_w.ravel(), l)
    bd = _merge(c, w_phi, l)
    return sp, ti, bd


def evaluate_solution(spec: ProblemSpec, x: float, y, tol: float = DEFAULT_TOL, method: str = "green",
                      solution: SolutionField | None = None):
    """``u(x, y)`` for ``x`` in ``[0, l]`` and an array of ``y`` in ``(0, T]``."""
    if not 0.0 <= x <= spec.l:
        raise DomainError(f"x={x} outside [0, {spec.l}]")
    ys = _positive_times(y)
    if np.any(ys > spec.T * (1 + 1e-12)):
        raise DomainError("y exceeds T")
    kern = spec.kernel()
    m = _image_count(spec, kern, ys.max())
    if method == "green":
        (so, sw), (to, tw), (bo, bw) = _green_terms(spec, x, m)
        vals = (_psi_parts(spec, kern, ys, tol, m, so, sw, to, tw)
                + _r_multi(kern, 0.0, bo, bw, spec.phi, ys, tol))
    elif method == "direct":
        if solution is None:
            solution = solve(spec, tol, method, check=False)
        c, w_l, w_0 = _dirichlet_images(x, spec.l, m)
        io, iw = _merge(*_initial_images(x, spec.l, m), spec.l)
        vals = np.zeros(ys.shape)
        for k, tau in enumerate(spec.tau, start=1):
            vals += _n_multi(kern, spec.beta - k + 1.0, io, iw, 0.0, spec.l, ys, tau, tol)
        vals += _r_multi(kern, 0.0, *_merge(c, w_l, spec.l), solution.phil, ys, tol)
        vals += _r_multi(kern, 0.0, *_merge(c, w_0, spec.l), solution.phi0, ys, tol)
    else:
        raise DomainError(f"unknown evaluation method {method!r}")
    return float(vals[0]) if np.ndim(y) == 0 else vals


# ---------------------------------------------------------------------------
# verification


def verify_integral_condition(spec: ProblemSpec, solution: SolutionField, y_grid, tol: float = 1e-9,
                              return_all: bool = False):
    """``max_y |int_0^l u(x, y) dx - mu(y)|`` with adaptive quadrature in ``x``."""
    ys = _positive_times(y_grid)

    def integrand(xs):
        return np.stack([solution.eval(float(x), ys) for x in xs], axis=-1)

    width = ys.min() ** spec.beta
    breaks = [b for b in (width, spec.l - width) if 0 < b < spec.l]
    total = integrate(integrand, 0.0, spec.l, breaks=breaks, atol=tol * 1e-2, rtol=tol).value
    res = np.atleast_1d(total) - spec.mu(ys)
    return res if return_all else float(np.max(np.abs(res)))


def boundary_residual(spec: ProblemSpec, solution: SolutionField, y_grid):
    """``max_y |a1 u(0,y) + a2 u(l,y) - phi(y)|``."""
    ys = _positive_times(y_grid)
    res = (spec.a1 * solution.eval(0.0, ys) + spec.a2 * solution.eval(spec.l, ys) - spec.phi(ys))
    return float(np.max(np.abs(res)))


def _line(solution, x):
    spec = solution.spec
    return Func1D(lambda s: _line_eval(solution, x, s), (0.0, math.inf),
                  spec.alpha - spec.n, None, "u(x, .)")


def pde_residual(solution: SolutionField, x: float, y: float, h, tol: float = 1e-8):
    """``u_xx - D^alpha u`` at ``(x, y)``: central differences in ``x``, frac in ``y``.

    ``h`` may be a sequence of steps (the fractional derivative is then
    computed once); each needs ``h <= min(x, l - x)``.
    """
    spec = solution.spec
    hs = np.atleast_1d(np.asarray(h, dtype=float))
    if np.any(hs <= 0) or np.any(x - hs < 0) or np.any(x + hs > spec.l):
        raise DomainError("stencil leaves [0, l]")
    dalpha = float(rl_derivative(_line(solution, x), spec.alpha, y, tol))
    centre = solution.eval(x, y)
    out = []
    for step in hs:
        uxx = (solution.eval(x - step, y) - 2.0 * centre + solution.eval(x + step, y)) / step**2
        out.append(uxx - dalpha)
    return float(out[0]) if np.ndim(h) == 0 else np.array(out)


def _line_eval(solution, x, s):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape)
    pos = s > 0
    if pos.any():
        out[pos] = solution.eval(x, s[pos])
    return out


def initial_trace_limit(solution: SolutionField, x: float, k: int, y_sequence=None):
    """Extrapolated ``lim_{y->0} D^(alpha-k) u(x, y)``; compare with ``tau_k(x)``."""
    spec = solution.spec
    ys = np.asarray(y_sequence if y_sequence is not None else spec.T * np.array([0.04, 0.02, 0.01]))
    order = spec.alpha - k
    vals = np.atleast_1d(rl_operator(_line(solution, x), order, ys, 1e-9))
    n = spec.n
    # Near y = 0 the solution expands in y^(j alpha - m), m <= n; the operator
    # maps those terms to y^((j-1) alpha + k - m).
    powers = sorted({round((j - 1) * spec.alpha + k - m, 12) for j in (1, 2, 3) for m in range(1, n + 1)})
    powers = tuple(p for p in powers if p > 0)[:2]
    value, _ = extrapolate_to_zero(ys, vals, powers)
    return value


# ---------------------------------------------------------------------------
# manufactured problems


def manufactured_problem(name: str, alpha: float, l: float = 1.0, T: float = 1.0, a1: float = 1.0,
                         a2: float = 0.0, mismatch: float = 0.0):
    """Samarskii data generated from a builtin exact solution.

    ``mismatch`` adds ``mismatch * y^(alpha-n) / Gamma(alpha-n+1)`` to the
    integral datum: its ``D^alpha`` vanishes, so the solution is unchanged
    while the compatibility limit of order ``alpha - n`` is off by
    ``mismatch``.  Returns ``(spec, exact)`` with ``exact(x, y)``.
    """
    case = manufactured_case(name, alpha, l)
    tr = case.traces
    phi = tr.u0.scale(a1) + tr.ul.scale(a2)
    mu = case.mu
    if mismatch:
        n = order_count(alpha)
        mu = mu + power(alpha - n, mismatch / math.gamma(alpha - n + 1.0))
    spec = ProblemSpec(alpha, l, T, tuple(tr.tau), phi, mu, a1, a2, case.flux)
    return spec, case.solution
