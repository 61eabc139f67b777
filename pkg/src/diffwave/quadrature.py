"""Adaptive product quadrature for weakly singular integrands.

``integrate`` computes

    int_a^b f(s) (s - a)^left (b - s)^right ds

by global adaptive bisection.  Panels touching a singular endpoint use
Gauss-Jacobi rules carrying that endpoint's weight, so repeated bisection
produces a geometric mesh toward the singularity.  ``f`` receives a 1-D array
of nodes and may return either one value per node or a stack of values
(shape ``(..., n)``); stacked integrands share a single mesh and are refined
against the largest component error.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .errors import QuadratureFailure

__all__ = ["QuadResult", "integrate"]

_HI = 16
_LO = 8


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray | float
    error: float
    evaluations: int


@lru_cache(maxsize=None)
def _rule(n: int, right: float, left: float):
    """Nodes/weights on [-1, 1] for (1 - x)^right (1 + x)^left."""
    if right == 0.0 and left == 0.0:
        x, w = np.polynomial.legendre.leggauss(n)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            x, w = roots_jacobi(n, right, left)
    return np.asarray(x), np.asarray(w)


def _panel_rules(p, q, a, b, left, right, n):
    """Nodes and effective weights for a batch of panels [p_i, q_i]."""
    at_a = (p == a) & (left != 0.0)
    at_b = (q == b) & (right != 0.0)
    nodes = np.empty((p.size, n))
    weights = np.empty((p.size, n))
    for ea in (False, True):
        for eb in (False, True):
            sel = (at_a == ea) & (at_b == eb)
            if not sel.any():
                continue
            ra = left if ea else 0.0
            rb = right if eb else 0.0
            x, w = _rule(n, rb, ra)
            half = 0.5 * (q[sel] - p[sel])
            s = p[sel, None] + half[:, None] * (1.0 + x)
            ww = w * half[:, None] ** (1.0 + ra + rb)
            if left != 0.0 and not ea:
                ww = ww * (s - a) ** left
            if right != 0.0 and not eb:
                ww = ww * (b - s) ** right
            nodes[sel] = s
            weights[sel] = ww
    return nodes, weights


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    left: float = 0.0,
    right: float = 0.0,
    breaks: Sequence[float] = (),
    atol: float = 1e-12,
    rtol: float = 1e-12,
    max_panels: int = 20000,
) -> QuadResult:
    """Integrate ``f(s) (s-a)^left (b-s)^right`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand; returns shape ``(n,)`` or ``(..., n)``.
    a, b : float
        Finite limits, ``a < b`` (``a == b`` gives 0).
    left, right : float
        Endpoint exponents, both ``> -1``.
    breaks : sequence of float
        Interior points used as initial panel edges (kinks, scales).
    atol, rtol : float
        Stop when the summed error estimate is below ``max(atol, rtol*|I|)``.

    Raises
    ------
    QuadratureFailure
        If the panel budget is exhausted before the tolerance is met.
    """
    if left <= -1.0 or right <= -1.0:
        raise QuadratureFailure("endpoint exponents must exceed -1")
    if b <= a:
        probe = np.asarray(f(np.array([a])))
        return QuadResult(np.zeros(probe.shape[:-1]) if probe.ndim > 1 else 0.0, 0.0, 0)

    edges = np.unique(np.clip(np.concatenate([[a], np.asarray(breaks, float), [b]]), a, b))
    p = edges[:-1].copy()
    q = edges[1:].copy()

    done_val = None
    done_err = 0.0
    evaluations = 0
    npanels = p.size
    while True:
        nh, wh = _panel_rules(p, q, a, b, left, right, _HI)
        nl, wl = _panel_rules(p, q, a, b, left, right, _LO)
        s = np.concatenate([nh.ravel(), nl.ravel()])
        vals = np.asarray(f(s), dtype=float)
        evaluations += s.size
        lead = vals.shape[:-1]
        vh = vals[..., : nh.size].reshape(lead + nh.shape)
        vl = vals[..., nh.size:].reshape(lead + nl.shape)
        qh = np.sum(vh * wh, axis=-1)  # (..., panels)
        ql = np.sum(vl * wl, axis=-1)
        diff = np.abs(qh - ql)
        perr = diff.reshape(-1, p.size).max(axis=0) if diff.ndim > 1 else diff
        # Degenerate panels cannot be refined further.
        perr = np.where(q - p <= 1e-15 * max(abs(a), abs(b), 1.0), 0.0, perr)

        if done_val is None:
            done_val = np.zeros(lead)
        total = done_val + qh.sum(axis=-1)
        err = done_err + perr.sum()
        scale = np.max(np.abs(total)) if np.ndim(total) else abs(total)
        tol = max(atol, rtol * scale)
        if err <= tol:
            value = total if np.ndim(total) else float(total)
            return QuadResult(value, float(err), evaluations)

        split = perr > tol / (2.0 * npanels)
        if not split.any():
            split = perr >= perr.max()
        keep = ~split
        done_val = done_val + qh[..., keep].sum(axis=-1)
        done_err += perr[keep].sum()
        mid = 0.5 * (p[split] + q[split])
        p = np.concatenate([p[split], mid])
        q = np.concatenate([mid, q[split]])
        npanels += int(split.sum())
        if npanels > max_panels:
            raise QuadratureFailure(
                f"no convergence on [{a}, {b}] after {npanels} panels (error {err:.3g} > {tol:.3g})"
            )
