"""Plain-text run configuration: ``key = value`` lines and ``#`` comments.

Function values are preset expressions joined with ``+``::

    power:a[,c]        c * s^a
    const:c            c
    poly:c0,c1,...     c0 + c1 s + ...
    sin:k[,c]          c * sin(k s)
    cos:k[,c]          c * cos(k s)
    wright:b,t,x[,c]   c * s^(t-1) phi(-b, t; -x s^-b)
    zero

Numeric arguments accept ``pi`` and products or quotients such as ``pi/2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import ParseError, ValidationError
from .func import Func1D, constant, cosine, polynomial, power, sine, wright_profile, zero

__all__ = [
    "COMMANDS",
    "RunConfig",
    "make_grid",
    "parse_config",
    "parse_function",
    "parse_number",
    "render_config",
]

COMMANDS = ("wright-eval", "frac-apply", "ops-verify", "verify-nonlocal", "solve-samarskii",
            "solve-wave", "convergence")

NUMERIC_KEYS = ("alpha", "l", "T", "a1", "a2", "mismatch", "c", "y_min", "h")
FUNCTION_KEYS = {
    "samarskii": ("tau1", "tau2", "phi", "mu", "flux"),
    "wave": ("tau", "nu", "phi0", "mu", "mu_prime"),
}
OTHER_KEYS = ("problem", "case", "grid", "strict", "tol", "y_ratio")
SAMARSKII_CASES = ("power", "linear", "quadratic", "wright")
WAVE_CASES = ("sine", "linear", "bump")


def parse_number(text: str) -> float:
    """Float, ``pi``, or a product/quotient of those (``2*pi/3``)."""
    text = text.strip()
    if not text:
        raise ValueError("empty number")
    tokens = re.split(r"([*/])", text)
    value, op = None, "*"
    for tok in tokens:
        tok = tok.strip()
        if tok in "*/" and tok:
            op = tok
            continue
        factor = math.pi if tok == "pi" else (-math.pi if tok == "-pi" else float(tok))
        value = factor if value is None else (value * factor if op == "*" else value / factor)
    return float(value)


def _term(text: str) -> Func1D:
    name, _, rest = text.strip().partition(":")
    args = [parse_number(a) for a in rest.split(",")] if rest.strip() else []

    def need(lo, hi):
        if not lo <= len(args) <= hi:
            raise ValueError(f"{name} takes {lo}..{hi} arguments, got {len(args)}")

    if name == "zero":
        need(0, 0)
        return zero((-math.inf, math.inf))
    if name == "const":
        need(1, 1)
        return constant(args[0], (-math.inf, math.inf))
    if name == "power":
        need(1, 2)
        return power(args[0], args[1] if len(args) > 1 else 1.0)
    if name == "poly":
        need(1, 64)
        return polynomial(args, (-math.inf, math.inf))
    if name in ("sin", "cos"):
        need(1, 2)
        maker = sine if name == "sin" else cosine
        return maker(args[0], args[1] if len(args) > 1 else 1.0, (-math.inf, math.inf))
    if name == "wright":
        need(3, 4)
        return wright_profile(*args)
    raise ValueError(f"unknown function preset {name!r}")


def parse_function(text: str) -> Func1D:
    """Parse a ``+``-joined preset expression into a :class:`Func1D`."""
    # Split on '+' that is not part of an exponent such as 1e+3.
    parts = re.split(r"(?<![eE])\+", text)
    if not all(p.strip() for p in parts):
        raise ValueError(f"malformed function expression {text!r}")
    total = None
    for p in parts:
        f = _term(p)
        total = f if total is None else total + f
    return total


@dataclass
class RunConfig:
    """Parsed configuration.

    ``entries`` keeps the canonical key/value text and defines equality;
    ``problem`` is the constructed spec and ``exact`` the closed-form
    solution when a builtin case was named.
    """

    command: str = "solve-samarskii"
    entries: dict = field(default_factory=dict)
    grid: tuple = (11, 11)
    tolerances: dict = field(default_factory=lambda: {"tol": 1e-10})
    output_path: Optional[str] = None
    strict: bool = False
    problem: Any = field(default=None, compare=False)
    exact: Any = field(default=None, compare=False)

    @property
    def kind(self) -> str:
        return self.entries.get("problem", "samarskii")

    def number(self, key: str, default: Optional[float] = None) -> float:
        if key in self.entries:
            return parse_number(self.entries[key])
        if default is None:
            raise ValidationError(f"missing key {key!r}")
        return default


def _parse_grid(text: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError("grid is NX,NY")
    nx, ny = int(parts[0]), int(parts[1])
    if nx < 2 or ny < 2:
        raise ValidationError("grid needs nx, ny >= 2")
    return nx, ny


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str, command: str = "solve-samarskii", build: bool = True) -> RunConfig:
    """Parse config text; with ``build`` the problem spec is constructed and checked."""
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}")
    entries: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, _, value = (s.strip() for s in line.partition("="))
        if not key or not value:
            raise ParseError("empty key or value", lineno)
        if key in entries:
            raise ParseError(f"duplicate key {key!r}", lineno)
        entries[key] = value
        lines[key] = lineno
    kind = entries.get("problem", "wave" if command == "solve-wave" else "samarskii")
    if kind not in FUNCTION_KEYS:
        raise ParseError(f"unknown problem {kind!r}", lines.get("problem"))
    allowed = set(NUMERIC_KEYS) | set(OTHER_KEYS) | set(FUNCTION_KEYS[kind])
    for key, value in entries.items():
        ln = lines[key]
        if key not in allowed:
            raise ParseError(f"unknown key {key!r}", ln)
        try:
            if key in NUMERIC_KEYS or key in ("tol", "y_ratio"):
                parse_number(value)
            elif key in FUNCTION_KEYS[kind]:
                parse_function(value)
            elif key == "grid":
                _parse_grid(value)
            elif key == "strict":
                _parse_bool(value)
        except ValidationError:
            raise
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise ParseError(f"{key}: {exc}", ln) from None
    cfg = RunConfig(command=command, entries=entries)
    if "grid" in entries:
        cfg.grid = _parse_grid(entries["grid"])
    if "tol" in entries:
        cfg.tolerances = {"tol": parse_number(entries["tol"])}
    if cfg.tolerances["tol"] <= 0:
        raise ValidationError("tolerances must be positive")
    cfg.strict = _parse_bool(entries["strict"]) if "strict" in entries else False
    if build:
        build_problem(cfg)
    return cfg


def render_config(cfg: RunConfig) -> str:
    """Canonical text; ``parse_config(render_config(cfg)) == cfg``."""
    return "".join(f"{k} = {v}\n" for k, v in cfg.entries.items())


def build_problem(cfg: RunConfig, strict: Optional[bool] = None):
    """Construct ``cfg.problem`` (and ``cfg.exact`` for builtin cases)."""
    strict = cfg.strict if strict is None else strict
    if cfg.kind == "wave":
        return _build_wave(cfg, strict)
    return _build_samarskii(cfg, strict)


def _build_samarskii(cfg: RunConfig, strict: bool):
    from .samarskii import ProblemSpec, manufactured_problem
    from .nonlocal_conditions import order_count

    e = cfg.entries
    alpha = cfg.number("alpha")
    if not 0.0 < alpha < 2.0:
        raise ValidationError(f"alpha must lie in (0, 2), got {alpha}")
    l, T = cfg.number("l", 1.0), cfg.number("T", 1.0)
    a1, a2 = cfg.number("a1", 1.0), cfg.number("a2", 0.0)
    if a1 == a2:
        raise ValidationError("a1 == a2")
    if "case" in e:
        if e["case"] not in SAMARSKII_CASES:
            raise ValidationError(f"unknown case {e['case']!r}; choose from {SAMARSKII_CASES}")
        clash = [k for k in FUNCTION_KEYS["samarskii"] if k in e]
        if clash:
            raise ValidationError(f"case given together with explicit data {clash}")
        spec, exact = manufactured_problem(e["case"], alpha, l, T, a1, a2, cfg.number("mismatch", 0.0))
    else:
        n = order_count(alpha)
        missing = [k for k in ["phi", "mu"] + [f"tau{k}" for k in range(1, n + 1)] if k not in e]
        if missing:
            raise ValidationError(f"missing keys {missing}")
        if n == 1 and "tau2" in e:
            raise ValidationError("tau2 is only used for alpha > 1")
        taus = tuple(parse_function(e[f"tau{k}"]) for k in range(1, n + 1))
        flux = parse_function(e["flux"]) if "flux" in e else None
        spec = ProblemSpec(alpha, l, T, taus, parse_function(e["phi"]), parse_function(e["mu"]),
                           a1, a2, flux)
        exact = None
    spec.validate(strict=strict)
    cfg.problem, cfg.exact = spec, exact
    return spec


def _build_wave(cfg: RunConfig, strict: bool):
    from .wave import WaveSpec, wave_preset

    e = cfg.entries
    l, T = cfg.number("l", 1.0), cfg.number("T", 0.5)
    if not T < l:
        raise ValidationError("T < l is required")
    if "case" in e:
        if e["case"] not in WAVE_CASES:
            raise ValidationError(f"unknown case {e['case']!r}; choose from {WAVE_CASES}")
        preset = wave_preset(e["case"], l, T, cfg.number("c", 1.0))
        spec, exact = preset.spec, preset.exact
    else:
        missing = [k for k in ("tau", "nu", "phi0", "mu") if k not in e]
        if missing:
            raise ValidationError(f"missing keys {missing}")
        mp = parse_function(e["mu_prime"]) if "mu_prime" in e else None
        spec = WaveSpec(l, T, parse_function(e["tau"]), parse_function(e["nu"]),
                        parse_function(e["phi0"]), parse_function(e["mu"]), mp)
        exact = None
    spec.validate(strict=strict)
    cfg.problem, cfg.exact = spec, exact
    return spec


def make_grid(cfg: RunConfig, l: float, T: float):
    """Uniform lattice over ``[0, l] x [y_min, T]`` with ``y_min > 0``."""
    import numpy as np

    nx, ny = cfg.grid
    y_min = cfg.number("y_min", T / ny)
    if not 0.0 < y_min <= T:
        raise ValidationError("y_min must lie in (0, T]")
    return np.linspace(0.0, l, nx), np.linspace(y_min, T, ny)
