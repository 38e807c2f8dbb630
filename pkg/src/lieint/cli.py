"""Command-line driver: named-problem solves, convergence sweeps, timing
benchmarks, and the feedback-control demo.

All commands emit plain CSV (``#``-prefixed comment lines for metadata,
17 significant digits) and can optionally render a matplotlib figure of
the same data next to it.  Exit codes: 0 success, 2 usage error, 3
numerical failure (chart violation), with diagnostics on stderr.
"""

import argparse
import sys
import time

import numpy as np

from .control import (
    constant_control,
    closed_loop_simulate,
    cost_eval,
    feedback_gain,
    riccati_backward_solve,
    vehicle_cost_pair,
    vehicle_problem,
)
from .integrators import GROUP_SCHEMES, TimeGrid, estimate_order
from .liesys import StepFailure, Trajectory, global_error, solve_classical, \
    solve_lie_system, solve_via_group_action_alternate
from .problems import get_problem, problem_names

__all__ = ["main"]

SCHEMES = ("magnus2", "magnus4", "rkmk4", "heun", "rk4",
           "alternate-heun", "alternate-rk4")

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _run_scheme(problem, scheme: str, grid: TimeGrid, x0) -> Trajectory:
    if scheme in GROUP_SCHEMES:
        return solve_lie_system(problem.system, scheme, grid, x0)
    if scheme in ("heun", "rk4"):
        return solve_classical(problem.system.rhs, scheme, grid, x0)
    if scheme.startswith("alternate-"):
        return solve_via_group_action_alternate(
            problem.system, scheme.removeprefix("alternate-"), grid, x0)
    raise UsageError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")


def _get_problem_or_usage(name: str):
    try:
        return get_problem(name)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc


def _make_grid(a: float, b: float, steps, h) -> TimeGrid:
    if (steps is None) == (h is None):
        raise UsageError("give exactly one of --steps or --h")
    if b <= a:
        raise UsageError(f"need b > a, got [{a}, {b}]")
    if steps is not None:
        if steps < 1:
            raise UsageError("--steps must be >= 1")
        return TimeGrid(a, b, steps)
    if h <= 0:
        raise UsageError("--h must be positive")
    return TimeGrid.from_step(a, b, h)


def _parse_x0(text, problem):
    if text is None:
        return problem.x0
    try:
        values = np.array([float(tok) for tok in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad --x0 {text!r}: {exc}") from exc
    if len(values) != problem.system.manifold_dim:
        raise UsageError(
            f"--x0 needs {problem.system.manifold_dim} components, got {len(values)}")
    return values


def _parse_h_list(text: str):
    try:
        hs = [float(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --h-list {text!r}: {exc}") from exc
    if any(h <= 0 for h in hs):
        raise UsageError("all h values must be positive")
    return hs


def _write_lines(path, lines):
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _save_figure(fig, path):
    fig.savefig(path, dpi=150, bbox_inches="tight")


def _plot_ctx():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


# ---------------------------------------------------------------------------
# subcommands

def cmd_solve(args) -> int:
    problem = _get_problem_or_usage(args.problem)
    a = problem.a if args.a is None else args.a
    b = problem.b if args.b is None else args.b
    grid = _make_grid(a, b, args.steps, args.h)
    x0 = _parse_x0(args.x0, problem)
    if args.scheme not in SCHEMES:
        raise UsageError(f"unknown scheme {args.scheme!r}; choose from {', '.join(SCHEMES)}")

    traj = _run_scheme(problem, args.scheme, grid, x0)

    dim = traj.states.shape[1]
    header = ["t"] + [f"x{i + 1}" for i in range(dim)]
    exact = problem.exact
    if exact is not None:
        header += [f"exact{i + 1}" for i in range(dim)]
    lines = [f"# problem={args.problem} scheme={args.scheme} h={_fmt(grid.h)}",
             ",".join(header)]
    for t_k, x_k in zip(grid.nodes, traj.states):
        row = [_fmt(t_k)] + [_fmt(v) for v in x_k]
        if exact is not None:
            row += [_fmt(v) for v in np.atleast_1d(exact(t_k))]
        lines.append(",".join(row))
    _write_lines(args.output, lines)

    if args.plot:
        plt = _plot_ctx()
        fig, ax = plt.subplots()
        for i in range(dim):
            ax.plot(grid.nodes, traj.states[:, i], label=f"x{i + 1} ({args.scheme})")
        if exact is not None:
            ex = np.stack([np.atleast_1d(exact(t)) for t in grid.nodes])
            for i in range(dim):
                ax.plot(grid.nodes, ex[:, i], "--", label=f"exact{i + 1}")
        ax.set_xlabel("t")
        ax.set_title(f"{args.problem} / {args.scheme}, h = {grid.h:g}")
        ax.legend()
        _save_figure(fig, args.plot)
    return 0


def cmd_converge(args) -> int:
    problem = _get_problem_or_usage(args.problem)
    if problem.exact is None:
        raise UsageError(f"problem {args.problem!r} has no exact solution to converge against")
    schemes = args.schemes.split(",")
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise UsageError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    hs = _parse_h_list(args.h_list)
    if len(hs) < 3:
        raise UsageError("need at least 3 h values for a slope fit")
    a = problem.a if args.a is None else args.a
    b = problem.b if args.b is None else args.b
    x0 = _parse_x0(args.x0, problem)

    errors = {scheme: [] for scheme in schemes}
    for h in hs:
        grid = TimeGrid.from_step(a, b, h)
        for scheme in schemes:
            traj = _run_scheme(problem, scheme, grid, x0)
            errors[scheme].append(global_error(traj, problem.exact))

    lines = [f"# problem={args.problem} interval=[{_fmt(a)},{_fmt(b)}]",
             ",".join(["h"] + [f"err_{s}" for s in schemes])]
    for i, h in enumerate(hs):
        lines.append(",".join([_fmt(h)] + [_fmt(errors[s][i]) for s in schemes]))
    slopes = {s: estimate_order(np.array(hs), np.array(errors[s])) for s in schemes}
    for s in schemes:
        lines.append(f"# slope_{s}={_fmt(slopes[s])}")
    _write_lines(args.output, lines)

    if args.plot:
        plt = _plot_ctx()
        fig, ax = plt.subplots()
        for s in schemes:
            ax.loglog(hs, errors[s], "o-", label=f"{s} (slope {slopes[s]:.2f})")
        ax.set_xlabel("h")
        ax.set_ylabel("global error")
        ax.set_title(f"convergence: {args.problem}")
        ax.legend()
        _save_figure(fig, args.plot)
    return 0


def cmd_bench(args) -> int:
    problem = _get_problem_or_usage(args.problem)
    schemes = args.schemes.split(",")
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise UsageError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    hs = _parse_h_list(args.h_list)
    a = problem.a if args.a is None else args.a
    b = problem.b if args.b is None else args.b
    x0 = _parse_x0(args.x0, problem)

    seconds = {scheme: [] for scheme in schemes}
    for h in hs:
        grid = TimeGrid.from_step(a, b, h)
        for scheme in schemes:
            reps = []
            for _ in range(args.repetitions):
                start = time.perf_counter()
                _run_scheme(problem, scheme, grid, x0)
                reps.append(time.perf_counter() - start)
            seconds[scheme].append(float(np.median(reps)))

    lines = [f"# problem={args.problem} repetitions={args.repetitions}",
             ",".join(["h"] + [f"seconds_{s}" for s in schemes])]
    for i, h in enumerate(hs):
        lines.append(",".join([_fmt(h)] + [_fmt(seconds[s][i]) for s in schemes]))
    for s in schemes:
        r = np.corrcoef(np.log(hs), np.log(seconds[s]))[0, 1]
        lines.append(f"# loglog_r_{s}={_fmt(r)}")
    _write_lines(args.output, lines)

    if args.plot:
        plt = _plot_ctx()
        fig, ax = plt.subplots()
        for s in schemes:
            ax.loglog(hs, seconds[s], "o-", label=s)
        ax.set_xlabel("h")
        ax.set_ylabel("median wall-clock seconds")
        ax.set_title(f"timing: {args.problem}")
        ax.legend()
        _save_figure(fig, args.plot)
    return 0


def cmd_lqr(args) -> int:
    try:
        v_bars = [float(tok) for tok in args.v_bars.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --v-bars {args.v_bars!r}: {exc}") from exc
    if args.h <= 0:
        raise UsageError("--h must be positive")
    if args.scheme not in GROUP_SCHEMES and args.scheme not in ("heun", "rk4"):
        raise UsageError(f"unknown backward-solve scheme {args.scheme!r}")

    import os
    outdir = args.output_dir
    os.makedirs(outdir, exist_ok=True)

    prob = vehicle_problem()
    gain_grid = TimeGrid.from_step(prob.t0, prob.tf, args.h)
    law = feedback_gain(riccati_backward_solve(prob, args.scheme, gain_grid), prob)
    sim_grid = TimeGrid(prob.t0, prob.tf, 4 * gain_grid.steps)

    def plant(t, x, u):
        return prob.a @ x + prob.b @ np.atleast_1d(u)

    summary = ["v_bar,J_optimal_x1000,J_constant_x1000"]
    curves = []
    for v_bar in v_bars:
        dv0 = np.array([v_bar - 1.0])
        traj_opt = closed_loop_simulate(plant, law, dv0, sim_grid)
        j_opt = cost_eval(traj_opt, lambda t, x: law.gain(t) @ x, prob)
        du_c = constant_control(v_bar)
        traj_const = closed_loop_simulate(plant, du_c, dv0, sim_grid)
        j_const = cost_eval(traj_const, lambda t, x: np.array([du_c]), prob)
        summary.append(",".join([_fmt(v_bar), _fmt(1000.0 * j_opt), _fmt(1000.0 * j_const)]))

        for label, traj in (("optimal", traj_opt), ("constant", traj_const)):
            lines = [f"# v_bar={_fmt(v_bar)} law={label}", "t,x1"]
            for t_k, x_k in zip(sim_grid.nodes, traj.states):
                lines.append(f"{_fmt(t_k)},{_fmt(x_k[0])}")
            _write_lines(os.path.join(outdir, f"trajectory_vbar{v_bar:g}_{label}.csv"), lines)
            curves.append((v_bar, label, traj.states[:, 0] + 1.0))

    _write_lines(os.path.join(outdir, "costs.csv"), summary)

    if args.plot:
        plt = _plot_ctx()
        fig, ax = plt.subplots()
        for v_bar, label, v in curves:
            style = "-" if label == "optimal" else "--"
            ax.plot(sim_grid.nodes, v, style, label=f"v̄={v_bar:g} {label}")
        ax.axhline(1.0, color="gray", linewidth=0.5)
        ax.set_xlabel("t")
        ax.set_ylabel("v(t)")
        ax.set_title("cruise control: optimal vs constant input")
        ax.legend(fontsize="small")
        _save_figure(fig, args.plot)
    return 0


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # route argparse's own failures through the usage exit code
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lieint", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid_flags(p, need_scheme=True):
        p.add_argument("--problem", required=True,
                       help=f"one of: {', '.join(problem_names())}")
        if need_scheme:
            p.add_argument("--scheme", required=True, help=", ".join(SCHEMES))
        p.add_argument("--a", type=float, default=None, help="interval start (default: problem's)")
        p.add_argument("--b", type=float, default=None, help="interval end (default: problem's)")
        p.add_argument("--x0", default=None, help="comma-separated initial state")
        p.add_argument("--output", default=None, help="CSV path (default: stdout)")
        p.add_argument("--plot", default=None, help="optional figure path (png/pdf)")

    p = sub.add_parser("solve", help="integrate one problem with one scheme")
    add_grid_flags(p)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--h", type=float, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", help="error-vs-h sweep with slope fit")
    add_grid_flags(p, need_scheme=False)
    p.add_argument("--schemes", required=True, help="comma-separated scheme list")
    p.add_argument("--h-list", required=True, help="comma-separated step sizes (>= 3)")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("bench", help="wall-clock-vs-h sweep")
    add_grid_flags(p, need_scheme=False)
    p.add_argument("--schemes", required=True, help="comma-separated scheme list")
    p.add_argument("--h-list", required=True, help="comma-separated step sizes")
    p.add_argument("--repetitions", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("lqr", help="cruise-control demo: gains, trajectories, cost table")
    p.add_argument("--v-bars", default="1.2,1.15,1.1,1.05,1.0",
                   help="comma-separated initial speeds")
    p.add_argument("--h", type=float, default=1e-3, help="backward Riccati step")
    p.add_argument("--scheme", default="rkmk4", help="backward-solve scheme")
    p.add_argument("--output-dir", default="lqr_out", help="directory for the CSV files")
    p.add_argument("--plot", default=None, help="optional figure path (png/pdf)")
    p.set_defaults(func=cmd_lqr)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StepFailure as exc:
        print(f"numerical failure at step {exc.step_index}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
