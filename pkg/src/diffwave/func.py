"""Function handles on an interval, optionally carrying closed-form RL derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import rgamma

from . import special

__all__ = [
    "Func1D",
    "constant",
    "cosine",
    "polynomial",
    "power",
    "sine",
    "wright_profile",
    "zero",
]

FracRule = Callable[[float], Optional["Func1D"]]


@dataclass(frozen=True)
class Func1D:
    """Real function on ``domain`` evaluated on numpy arrays.

    ``singular_exponent`` is the gamma in ``f(y) ~ (y - a)^gamma`` as y -> a+;
    quadratures use it as a Jacobi weight.  ``closed_frac_derivs(nu)`` returns
    the Riemann-Liouville derivative of order ``nu`` with base ``a`` (negative
    ``nu`` meaning an integral) when known in closed form, else ``None``.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float] = (0.0, math.inf)
    singular_exponent: float = 0.0
    closed_frac_derivs: Optional[FracRule] = field(default=None, compare=False)
    label: str = ""

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.broadcast_to(np.asarray(self.eval(y), dtype=float), y.shape)
        return float(out) if out.ndim == 0 else np.array(out)

    @property
    def base(self) -> float:
        return self.domain[0]

    def closed_frac(self, nu: float) -> Optional["Func1D"]:
        if nu == 0:
            return self
        if self.closed_frac_derivs is None:
            return None
        return self.closed_frac_derivs(nu)

    # Linear combinations keep closed forms when every part has one.
    def __add__(self, other: "Func1D") -> "Func1D":
        if not isinstance(other, Func1D):
            return NotImplemented
        f, g = self, other

        def rule(nu):
            df, dg = f.closed_frac(nu), g.closed_frac(nu)
            return None if df is None or dg is None else df + dg

        both = f.closed_frac_derivs is not None and g.closed_frac_derivs is not None
        return Func1D(
            lambda y: f.eval(y) + g.eval(y),
            (max(f.domain[0], g.domain[0]), min(f.domain[1], g.domain[1])),
            min(f.singular_exponent, g.singular_exponent),
            rule if both else None,
            f"{f.label} + {g.label}",
        )

    def scale(self, c: float) -> "Func1D":
        f = self

        def rule(nu):
            d = f.closed_frac(nu)
            return None if d is None else d.scale(c)

        return Func1D(
            lambda y: c * f.eval(y),
            f.domain,
            f.singular_exponent,
            rule if f.closed_frac_derivs is not None else None,
            f"{c}*({f.label})",
        )

    def __rmul__(self, c: float) -> "Func1D":
        return self.scale(float(c))

    def __neg__(self) -> "Func1D":
        return self.scale(-1.0)

    def __sub__(self, other: "Func1D") -> "Func1D":
        return self + (-other)


def power(exponent: float, coeff: float = 1.0, domain=(0.0, math.inf)) -> Func1D:
    """``coeff * y^exponent`` with the power rule attached (``exponent > -1``)."""
    p = float(exponent)

    def rule(nu):
        c = coeff * math.gamma(p + 1.0) * float(rgamma(p + 1.0 - nu))
        return power(p - nu, c, domain) if c != 0.0 else zero(domain)

    def ev(y):
        with np.errstate(divide="ignore", invalid="ignore"):
            return coeff * np.where(y > 0, np.abs(y) ** p, 0.0 if p > 0 else (1.0 if p == 0 else np.inf))

    return Func1D(ev, domain, p, rule, f"{coeff}*y^{p}")


def zero(domain=(0.0, math.inf)) -> Func1D:
    return Func1D(lambda y: np.zeros_like(y), domain, 0.0, lambda nu: zero(domain), "0")


def constant(c: float, domain=(0.0, math.inf)) -> Func1D:
    if c == 0:
        return zero(domain)
    f = power(0.0, c, domain)
    return Func1D(lambda y: np.full_like(y, c), domain, 0.0, f.closed_frac_derivs, f"{c}")


def polynomial(coeffs, domain=(0.0, math.inf)) -> Func1D:
    """``sum_j coeffs[j] y^j``."""
    coeffs = [float(c) for c in coeffs]
    parts = [power(j, c, domain) for j, c in enumerate(coeffs) if c != 0.0]

    def rule(nu):
        total = zero(domain)
        for part in parts:
            total = total + part.closed_frac(nu)
        return total

    return Func1D(
        lambda y: np.polynomial.polynomial.polyval(y, coeffs) if coeffs else np.zeros_like(y),
        domain, 0.0, rule, "poly:" + ",".join(repr(c) for c in coeffs),
    )


def _integer_rule(derivs):
    """Closed forms for non-negative integer orders only."""

    def rule(nu):
        if nu >= 0 and float(nu).is_integer():
            return derivs(int(nu))
        return None

    return rule


def sine(freq: float, amp: float = 1.0, domain=(0.0, math.inf)) -> Func1D:
    """``amp * sin(freq * y)``; integer-order derivatives in closed form."""

    def derivs(n):
        shift = n * math.pi / 2
        return Func1D(lambda y: amp * freq**n * np.sin(freq * y + shift), domain, 0.0,
                      None, f"d{n} sin")

    return Func1D(lambda y: amp * np.sin(freq * y), domain, 0.0, _integer_rule(derivs),
                  f"{amp}*sin({freq}y)")


def cosine(freq: float, amp: float = 1.0, domain=(0.0, math.inf)) -> Func1D:
    def derivs(n):
        shift = n * math.pi / 2
        return Func1D(lambda y: amp * freq**n * np.cos(freq * y + shift), domain, 0.0,
                      None, f"d{n} cos")

    return Func1D(lambda y: amp * np.cos(freq * y), domain, 0.0, _integer_rule(derivs),
                  f"{amp}*cos({freq}y)")


def wright_profile(beta: float, theta: float, shift: float, coeff: float = 1.0,
                   domain=(0.0, math.inf)) -> Func1D:
    """``coeff * y^(theta-1) phi(-beta, theta; -shift y^-beta)`` for shift > 0.

    It vanishes faster than any power at y = 0 and its RL derivative of any
    order is the same profile with theta lowered by that order.
    """

    def rule(nu):
        return wright_profile(beta, theta - nu, shift, coeff, domain)

    def ev(y):
        y = np.asarray(y, dtype=float)
        return coeff * special.kernel(beta, theta, shift, np.where(y > 0, y, 1.0)) * (y > 0)

    return Func1D(ev, domain, 0.0, rule, f"{coeff}*wright({beta},{theta},{shift})")
