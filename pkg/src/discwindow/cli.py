"""Command line entry point: ``discwindow <subcommand> [options]``.

Every subcommand writes CSV (one header line, comma separated, 15
significant digits, LF endings) to stdout, or to ``--out PATH`` in which case
stdout only gets a one-line summary.

Exit codes: 0 success, 2 usage, 3 certificate failure, 4 bracket violation,
5 solver non-convergence.
"""

from __future__ import annotations

import argparse
import io
import math
import sys

from . import bracketing, variational
from .bessel import Multiplicity, bessel_zero, zeros_below
from .fdsolver import Mesh, ReducedProblem, SolverError, solve_lowest
from .geometry import WaveguideGeometry, spectral_window

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CERTIFICATE = 3
EXIT_SANDWICH = 4
EXIT_SOLVER = 5


class UsageError(Exception):
    pass


def fmt(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".15g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(args, text, summary, stdout):
    if args.out:
        with open(args.out, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)
        stdout.write(summary + "\n")
    else:
        stdout.write(text)


def _grid(lo, hi, step, what):
    if step is None or not step > 0:
        raise UsageError(f"{what} step must be positive")
    if not (lo > 0 and hi >= lo):
        raise UsageError(f"{what} range must be positive and ascending")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _positive(x, what):
    if x is None or not (math.isfinite(x) and x > 0):
        raise UsageError(f"{what} must be positive, got {x}")
    return x


def _rules(choice):
    if choice == "both":
        return [Multiplicity.SINGLE, Multiplicity.ANGULAR_DEGENERACY]
    return [Multiplicity(choice)]


# -- subcommands ---------------------------------------------------------------


def cmd_zeros(args, stdout):
    if args.bound is not None:
        _positive(args.bound, "bound")
        zeros = zeros_below(args.bound, "single")
    else:
        if args.n_max is None or args.l_max is None:
            raise UsageError("give either --bound or both --n-max and --l-max")
        if args.n_max < 0 or args.l_max < 1:
            raise UsageError("need --n-max >= 0 and --l-max >= 1")
        zeros = [bessel_zero(n, l) for n in range(args.n_max + 1) for l in range(1, args.l_max + 1)]
    text = _csv(["n", "l", "x"], [(z.order, z.index, z.value) for z in zeros])
    _emit(args, text, f"zeros rows={len(zeros)}", stdout)
    return EXIT_OK


def cmd_fig2(args, stdout):
    d = _positive(args.d, "--d")
    grid = _grid(args.a_min, args.a_max, args.a_step, "a")
    first = zeros_below(12.0)[:3]
    window = spectral_window(WaveguideGeometry(d, 1.0))
    header = ["a"] + [f"curve{i + 1}_x{z.order}_{z.index}" for i, z in enumerate(first)]
    header.append("continuum")
    rows = [
        [a] + [window.lower + (z.value / a) ** 2 for z in first] + [window.upper]
        for a in grid
    ]
    _emit(args, _csv(header, rows), f"fig2 rows={len(rows)}", stdout)
    return EXIT_OK


def cmd_fig3(args, stdout):
    grid = _grid(args.ratio_min, args.ratio_max, args.ratio_step, "ratio")
    rules = _rules(args.mult)
    columns = [bracketing.figure_counts(grid, rule) for rule in rules]
    if len(rules) == 1:
        header = ["ratio", "count"]
    else:
        header = ["ratio"] + [f"count_{rule.value}" for rule in rules]
    rows = [[r] + [col[i][1] for col in columns] for i, r in enumerate(grid)]
    _emit(args, _csv(header, rows), f"fig3 rows={len(rows)}", stdout)
    return EXIT_OK


def cmd_fig4(args, stdout):
    ds = _grid(args.d_min, args.d_max, args.d_step, "d")
    As = _grid(args.a_min, args.a_max, args.a_step, "a")
    rule = Multiplicity(args.mult)
    rows = []
    for d in ds:
        for a in As:
            g = WaveguideGeometry(d, a)
            rows.append([d, a, a / d, bracketing.count_bound_states_upper(g, rule)])
    _emit(args, _csv(["d", "a", "ratio", "count"], rows), f"fig4 rows={len(rows)}", stdout)
    return EXIT_OK


def cmd_bracket(args, stdout):
    g = WaveguideGeometry(_positive(args.d, "--d"), _positive(args.a, "--a"))
    window = spectral_window(g)
    cap = window.upper if args.cap is None else args.cap
    if not cap > window.lower:
        raise UsageError(f"--cap must exceed {window.lower}")
    levels = bracketing.dirichlet_bracket_levels(g, cap, args.mult)
    rows = [(lv.k, lv.zero.order, lv.zero.index, lv.zero.value, lv.value) for lv in levels]
    _emit(args, _csv(["k", "n", "l", "x", "value"], rows), f"bracket rows={len(rows)}", stdout)
    return EXIT_OK


def cmd_certify(args, stdout):
    g = WaveguideGeometry(_positive(args.d, "--d"), _positive(args.a, "--a"))
    try:
        cert = variational.certify_bound_state(g)
    except variational.CertificationFailure as exc:
        stdout.write(f"certified=0 a={fmt(g.a)} d={fmt(g.d)} best_q={fmt(exc.best)}\n")
        return EXIT_CERTIFICATE
    p = cert.params
    summary = (
        f"certified=1 a={fmt(g.a)} d={fmt(g.d)} tau={fmt(p.tau)} epsilon={fmt(p.epsilon)} "
        f"q={fmt(cert.value)} margin={fmt(cert.margin)} delta={fmt(cert.delta)}"
    )
    text = _csv(["step", "tau", "epsilon", "q_closed_form"], cert.trace)
    if args.out:
        _emit(args, text, summary, stdout)
    else:
        stdout.write(summary + "\n" + text)
    return EXIT_OK


def _parse_mesh(spec):
    try:
        nr, nz = (int(v) for v in spec.lower().split("x"))
    except ValueError:
        raise UsageError(f"--mesh must look like NRxNZ, got {spec!r}") from None
    if nr < 2 or nz < 16:
        raise UsageError("--mesh needs NR >= 2 and NZ >= 16")
    return nr, nz


def _parse_modes(spec):
    try:
        modes = [int(v) for v in spec.split(",")]
    except ValueError:
        raise UsageError(f"--n must be a comma separated list of integers, got {spec!r}") from None
    if any(n < 0 for n in modes):
        raise UsageError("angular modes must be >= 0")
    return modes


def _mode_levels(g, n, count):
    """Inner-Dirichlet levels of mode ``n``, ascending, at least ``count`` of them."""
    values = []
    for k in range(count):
        for l in range(1, count + 1):
            x = bessel_zero(n, l).value
            values.append(((2 * k + 1) * math.pi / (2 * g.d)) ** 2 + (x / g.a) ** 2)
    return sorted(values)[:count]


def cmd_solve(args, stdout):
    g = WaveguideGeometry(_positive(args.d, "--d"), _positive(args.a, "--a"))
    nr, nz = _parse_mesh(args.mesh)
    modes = _parse_modes(args.n)
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    _positive(args.R_factor, "--R-factor")
    window = spectral_window(g)
    rows = []
    violated = False
    for n in modes:
        p = ReducedProblem(g, n, R=g.a + args.R_factor * g.d, outer_bc=args.outer)
        mesh = Mesh.for_problem(p, nr, nz)
        try:
            res = solve_lowest(p, mesh, args.count)
            try:
                coarse = solve_lowest(p, mesh.coarsened(), args.count).eigenvalues
                errors = abs(res.eigenvalues - coarse)
            except (ValueError, SolverError):
                errors = [0.0] * args.count
        except SolverError as exc:
            stdout.write(f"solver failed for n={n}: {exc}\n")
            return EXIT_SOLVER
        levels = _mode_levels(g, n, args.count)
        for j, (lam, resid, err, level) in enumerate(
            zip(res.eigenvalues, res.residuals, errors, levels), start=1
        ):
            lo, hi = window.lower, min(level, window.upper)
            if lam < window.upper and not (lo - err <= lam <= hi + err):
                violated = True
            rows.append((n, j, lam, resid, lo, hi))
    text = _csv(["n", "j", "lambda", "residual", "bracket_lo", "bracket_hi"], rows)
    _emit(args, text, f"solve rows={len(rows)} sandwich={'violated' if violated else 'ok'}", stdout)
    return EXIT_SANDWICH if violated else EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    common.add_argument("--format", choices=["csv"], default="csv")

    parser = argparse.ArgumentParser(
        prog="discwindow",
        description="Bound states of a Dirichlet layer with a Neumann disc window.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", parents=[common], help="positive zeros of J_n")
    p.add_argument("--n-max", type=int)
    p.add_argument("--l-max", type=int)
    p.add_argument("--bound", type=float)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("fig2", parents=[common], help="first three bracket curves against a")
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--a-min", type=float, default=0.5)
    p.add_argument("--a-max", type=float, default=10.0)
    p.add_argument("--a-step", type=float, default=0.05)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", parents=[common], help="bound-state count against a/d")
    p.add_argument("--ratio-min", type=float, default=0.1)
    p.add_argument("--ratio-max", type=float, default=4.0)
    p.add_argument("--ratio-step", type=float, default=0.01)
    p.add_argument("--mult", choices=["single", "degenerate", "both"], default="single")
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("fig4", parents=[common], help="bound-state count over (d, a)")
    p.add_argument("--d-min", type=float, default=0.5)
    p.add_argument("--d-max", type=float, default=2.0)
    p.add_argument("--d-step", type=float, default=0.5)
    p.add_argument("--a-min", type=float, default=0.5)
    p.add_argument("--a-max", type=float, default=4.0)
    p.add_argument("--a-step", type=float, default=0.5)
    p.add_argument("--mult", choices=["single", "degenerate"], default="single")
    p.set_defaults(func=cmd_fig4)

    p = sub.add_parser("bracket", parents=[common], help="inner Dirichlet levels below a cap")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--cap", type=float)
    p.add_argument("--mult", choices=["single", "degenerate"], default="single")
    p.set_defaults(func=cmd_bracket)

    p = sub.add_parser("certify", parents=[common], help="variational existence certificate")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--d", type=float, default=1.0)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("solve", parents=[common], help="finite-volume eigenvalues per mode")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--n", default="0", help="comma separated angular modes")
    p.add_argument("--mesh", default="400x40", metavar="NRxNZ")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--R-factor", dest="R_factor", type=float, default=5.0)
    p.add_argument("--outer", choices=["dirichlet", "neumann"], default="dirichlet")
    p.set_defaults(func=cmd_solve)
    return parser


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, stdout)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"discwindow {args.command}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
