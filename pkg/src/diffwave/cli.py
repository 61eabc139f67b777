"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import special
from .config import RunConfig, build_problem, make_grid, parse_config, parse_function, parse_number
from .errors import InputError, NumericalError

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def fmt(v) -> str:
    """Shortest round-trip text for floats, plain text otherwise."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


class Table:
    """CSV rows plus an optional ``# name,value`` footer."""

    def __init__(self, header):
        self.header = list(header)
        self.rows: list = []
        self.footer: list = []

    def add(self, *row):
        self.rows.append(row)

    def note(self, name, value):
        self.footer.append((name, value))

    def render(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        for name, value in self.footer:
            buf.write(f"# {name},{fmt(value)}\n")
        return buf.getvalue()


def observed_orders(hs, residuals, exact_floor):
    """log2 ratios between successive levels, or ``exact`` at roundoff."""
    out = [""]
    for i in range(1, len(hs)):
        a, b = residuals[i - 1], residuals[i]
        if max(a, b) <= exact_floor:
            out.append("exact")
        elif b == 0 or a == 0:
            out.append("nan")
        else:
            out.append(math.log(a / b) / math.log(hs[i - 1] / hs[i]))
    return out


def _pool_map(fn, items, workers):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# command implementations


def cmd_wright_eval(args) -> Table:
    r = special.wright_phi(args.beta, args.mu, args.z, target_abs_err=args.abs_err)
    t = Table(["value", "abs_error_bound", "terms_used", "precision_mode"])
    t.add(r.value, r.abs_error_bound, r.terms_used, r.precision_mode)
    return t


def cmd_frac_apply(args) -> Table:
    from .frac import rl_operator

    try:
        f = parse_function(args.func)
        ys = [parse_number(v) for v in args.y.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from None
    vals = np.atleast_1d(rl_operator(f, args.nu, np.array(ys), args.tol))
    t = Table(["nu", "y", "value"])
    for y, v in zip(ys, vals):
        t.add(float(args.nu), y, float(v))
    return t


def cmd_ops_verify(args) -> Table:
    from .kernel_ops import verify_property

    checks = verify_property(args.property, args.beta, seed=args.seed, draws=args.draws)
    t = Table(["property", "draw", "lhs", "rhs", "abs_diff"])
    for c in checks:
        t.add(c.property, c.draw, c.lhs, c.rhs, c.abs_diff)
    t.note("max_abs_diff", max(c.abs_diff for c in checks))
    return t


def cmd_verify_nonlocal(args) -> Table:
    from .kernel_ops import HeatKernel
    from .nonlocal_conditions import manufactured_case, residual_x0, residual_xl

    case = manufactured_case(args.case, args.alpha, args.l)
    kernel = None
    if args.kernel == "heat":
        if args.alpha != 1.0:
            raise InputError("the heat kernel needs alpha = 1")
        kernel = HeatKernel()
    ys = np.linspace(args.T / args.grid, args.T, args.grid)
    tol = min(args.tol, 1e-10)
    r0 = np.atleast_1d(residual_x0(case.traces, args.alpha, args.l, ys, tol, kernel))
    rl = np.atleast_1d(residual_xl(case.traces, args.alpha, args.l, ys, tol, kernel))
    t = Table(["y", "residual_x0", "residual_xl"])
    for row in zip(ys, r0, rl):
        t.add(*row)
    dy = ys[1] - ys[0] if ys.size > 1 else ys[0]
    for name, r in (("residual_x0", r0), ("residual_xl", rl)):
        t.note(f"max_{name}", float(np.max(np.abs(r))))
        t.note(f"l2_{name}", float(math.sqrt(dy * np.sum(r * r))))
    return t


def _load_config(args, command: str) -> RunConfig:
    with open(args.config, encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text, command, build=False)
    if args.grid is not None:
        cfg.grid = args.grid
    if args.strict:
        cfg.strict = True
    if args.tol_given:
        cfg.tolerances = {"tol": args.tol}
    build_problem(cfg)
    return cfg


def _samarskii_grid(cfg: RunConfig, workers: int) -> Table:
    from .samarskii import boundary_residual, solve, verify_integral_condition

    spec = cfg.problem
    tol = cfg.tolerances["tol"]
    sol = solve(spec, tol, strict=cfg.strict)
    xs, ys = make_grid(cfg, spec.l, spec.T)
    cols = _pool_map(lambda x: np.atleast_1d(sol.eval(float(x), ys)), xs, workers)
    t = Table(["x", "y", "u"])
    for x, col in zip(xs, cols):
        for y, u in zip(ys, col):
            t.add(float(x), float(y), float(u))
    t.note("integral_condition", verify_integral_condition(spec, sol, ys, tol=max(tol, 1e-9)))
    t.note("boundary_condition", boundary_residual(spec, sol, ys))
    t.note("image_terms", sol.image_terms_used)
    if cfg.exact is not None:
        err = max(float(np.max(np.abs(col - cfg.exact(float(x), ys)))) for x, col in zip(xs, cols))
        t.note("max_abs_error", err)
    return t


def _wave_grid(cfg: RunConfig, workers: int) -> Table:
    from .wave import evaluate_wave_solution, verify_wave_integral_condition

    spec = cfg.problem
    xs, ys = make_grid(cfg, spec.l, spec.T)
    cols = _pool_map(lambda x: np.atleast_1d(evaluate_wave_solution(spec, float(x), ys)), xs, workers)
    t = Table(["x", "y", "u"])
    for x, col in zip(xs, cols):
        for y, u in zip(ys, col):
            t.add(float(x), float(y), float(u))
    t.note("integral_condition", verify_wave_integral_condition(spec, ys))
    t.note("boundary_condition", float(np.max(np.abs(cols[0] - spec.phi0(ys)))))
    if cfg.exact is not None:
        err = max(float(np.max(np.abs(col - cfg.exact(float(x), ys)))) for x, col in zip(xs, cols))
        t.note("max_abs_error", err)
    return t


def cmd_solve(args) -> Table:
    cfg = _load_config(args, "solve-wave" if args.kind == "wave" else "solve-samarskii")
    if cfg.kind != args.kind:
        raise InputError(f"config describes a {cfg.kind} problem")
    return _wave_grid(cfg, args.workers) if args.kind == "wave" else _samarskii_grid(cfg, args.workers)


def _trapezoid(values, h):
    return h * (np.sum(values, axis=0) - 0.5 * (values[0] + values[-1]))


def run_convergence(cfg: RunConfig, levels: int = 3) -> Table:
    """PDE and integral-condition residuals on the ladder ``h, h/2, h/4``.

    Probes are the interior x-nodes of the config grid at each grid time.
    The integral condition uses the trapezoid rule with the same spacing.
    """
    spec = cfg.problem
    l, T = spec.l, spec.T
    xs, ys = make_grid(cfg, l, T)
    probes = xs[1:-1]
    if probes.size == 0:
        raise InputError("convergence needs nx >= 3")
    default_h = min(0.2 * l, float(np.min(np.minimum(probes, l - probes))))
    if cfg.kind == "wave":
        # The y-stencil must fit inside [0, T] at some grid time.
        room = float(np.max(np.minimum(ys, T - ys))) / cfg.number("y_ratio", 1.0)
        default_h = min(default_h, room) if room > 0 else default_h
    h0 = cfg.number("h", default_h)
    hs = [h0 / 2**k for k in range(levels)]
    if cfg.kind == "wave":
        from .wave import evaluate_wave_solution, wave_fd_residual

        ratio = cfg.number("y_ratio", 1.0)
        reach = ratio * hs[0]
        slack = 1e-12 * T
        ts = ys[(ys - reach >= -slack) & (ys + reach <= T + slack)]
        if ts.size == 0:
            raise InputError("no grid time leaves room for the y-stencil; lower h")
        res = np.array([[abs(wave_fd_residual(spec, float(x), float(y), h, ratio))
                         for x in probes for y in ts] for h in hs])
        scale = max(1.0, float(np.max(np.abs(evaluate_wave_solution(spec, probes[:, None], ys[None, :])))))

        def line(x):
            return np.atleast_1d(evaluate_wave_solution(spec, float(x), ys))
    else:
        from .samarskii import pde_residual, solve

        tol = cfg.tolerances["tol"]
        sol = solve(spec, tol, strict=cfg.strict)
        # The numerical y-derivative peeks slightly past the probe time.
        ts = ys[ys * 1.05 <= T]
        if ts.size == 0:
            raise InputError("convergence needs a grid time below 0.95 T (raise ny)")
        # Outer loop over probes so each fractional derivative is computed once.
        per_probe = [np.abs(pde_residual(sol, float(x), float(y), hs, tol=max(tol, 1e-9)))
                     for x in probes for y in ts]
        res = np.array(per_probe).T
        scale = max(1.0, float(np.max([np.max(np.abs(sol.eval(float(x), ys))) for x in probes])))

        def line(x):
            return np.atleast_1d(sol.eval(float(x), ys))

    eps = np.finfo(float).eps
    pmax = res.max(axis=1)
    prms = np.sqrt(np.mean(res * res, axis=1))
    ints = []
    cache: dict = {}
    for h in hs:
        n = max(2, int(round(l / h)))
        xq = np.linspace(0.0, l, n + 1)
        vals = np.array([cache.setdefault(round(float(x), 12), line(x)) for x in xq])
        ints.append(float(np.max(np.abs(_trapezoid(vals, l / n) - spec.mu(ys)))))
    floor_pde = 1e3 * eps * scale / hs[-1] ** 2
    p_ord = observed_orders(hs, list(pmax), floor_pde)
    i_ord = observed_orders(hs, ints, 1e3 * eps * scale)
    t = Table(["h", "pde_residual_max", "pde_residual_rms", "pde_order",
               "integral_residual", "integral_order"])
    for row in zip(hs, pmax, prms, p_ord, ints, i_ord):
        t.add(*row)
    return t


def cmd_convergence(args) -> Table:
    cfg = _load_config(args, "convergence")
    if args.grid is None and "grid" not in cfg.entries:
        cfg.grid = (3, 2)
    return run_convergence(cfg, args.levels)


# ---------------------------------------------------------------------------
# argument parsing


def _grid(text: str):
    try:
        nx, ny = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("grid is NX,NY") from None
    if nx < 2 or ny < 2:
        raise argparse.ArgumentTypeError("grid needs NX, NY >= 2")
    return nx, ny


def _globals(defaults: bool) -> argparse.ArgumentParser:
    # Global flags are accepted before or after the command; the leaf copy
    # suppresses its default so it does not overwrite the top-level value.
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--tol", type=float, default=d(None), help="numerical tolerance (default 1e-10)")
    p.add_argument("--strict", action="store_true", default=d(False),
                   help="treat matching-condition violations as errors")
    p.add_argument("--seed", type=int, default=d(0), help="seed for random draws")
    p.add_argument("--out", default=d(None), help="write CSV here instead of stdout")
    p.add_argument("--workers", type=int, default=d(1), help="threads for grid evaluation")
    return p


def build_parser() -> argparse.ArgumentParser:
    leaf = [_globals(False)]
    parser = argparse.ArgumentParser(prog="diffwave", parents=[_globals(True)],
                                     description="Diffusion-wave operators, boundary relations and solvers.")
    sub = parser.add_subparsers(dest="group", required=True)

    wright = sub.add_parser("wright", help="Wright function").add_subparsers(dest="action", required=True)
    p = wright.add_parser("eval", parents=leaf, help="evaluate phi(-beta, mu; z)")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--abs-err", type=float, default=1e-15)
    p.set_defaults(handler=cmd_wright_eval)

    frac = sub.add_parser("frac", help="fractional calculus").add_subparsers(dest="action", required=True)
    p = frac.add_parser("apply", parents=leaf, help="Riemann-Liouville operator of order nu")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--func", required=True, help="preset expression, e.g. power:0.5")
    p.add_argument("--y", required=True, help="comma-separated evaluation points")
    p.set_defaults(handler=cmd_frac_apply)

    ops = sub.add_parser("ops", help="kernel operators").add_subparsers(dest="action", required=True)
    p = ops.add_parser("verify", parents=leaf, help="check an operator identity on random data")
    p.add_argument("--property", type=int, choices=range(1, 8), required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--draws", type=int, default=3)
    p.set_defaults(handler=cmd_ops_verify)

    verify = sub.add_parser("verify", help="verification drivers").add_subparsers(dest="action", required=True)
    p = verify.add_parser("nonlocal", parents=leaf, help="boundary-relation residuals of a builtin solution")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--case", choices=("power", "linear", "quadratic", "wright"), default="power")
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--kernel", choices=("wright", "heat"), default="wright")
    p.set_defaults(handler=cmd_verify_nonlocal)

    solve = sub.add_parser("solve", help="evaluate a solution on a grid").add_subparsers(dest="action", required=True)
    for kind in ("samarskii", "wave"):
        p = solve.add_parser(kind, parents=leaf, help=f"{kind} problem from a config file")
        p.add_argument("--config", required=True)
        p.add_argument("--grid", type=_grid, default=None)
        p.set_defaults(handler=cmd_solve, kind=kind)

    p = sub.add_parser("convergence", parents=leaf, help="residual orders on a step ladder")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", type=_grid, default=None, help="probe lattice (default from config)")
    p.add_argument("--levels", type=int, default=3)
    p.set_defaults(handler=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol_given = args.tol is not None
    if args.tol is None:
        args.tol = 1e-10
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        table = args.handler(args)
        text = table.render()
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
