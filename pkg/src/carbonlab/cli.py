"""Command-line front end.

Subcommands
    simulate     integrate the system, write a t,C,G,F,N CSV
    equilibria   report all four equilibria with conditions and residuals
    stability    spectral + Routh-Hurwitz + global-certificate report
    sweep        re-run the simulation over a list of values of one parameter
    gsa          LHS/PRCC global sensitivity, write the PRCC matrix CSV
    control      solve the optimal-control problem, write solution + baseline
    estimate     growth rates from a historical CSV series

Configuration precedence is flags (--set) > config file (--config) > built-in
defaults.  All numeric output is written with full round-trip precision and
fixed ordering, so identical inputs produce byte-identical files.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .calibration import SERIES_COLUMNS, SeriesError, estimate_growth_rate, load_series
from .control import (
    OcpConfig,
    constant_control_run,
    objective,
    solve_fbs,
)
from .equilibria import (
    RootFindError,
    equilibrium_e1,
    equilibrium_e2,
    equilibrium_e3,
    equilibrium_e4,
)
from .integrate import NonfiniteStateError, integrate_rk4, scenario_sweep
from .model import (
    BASELINE,
    PARAM_NAMES,
    ParameterError,
    Parameters,
    UnboundedRegionError,
    compute_bounds,
    validate_params,
)
from .sensitivity import GSA_DEFAULT_DT, default_parameter_space, run_gsa
from .stability import classify_local, lyapunov_global_check

#: Config-file / --set keys.  K, M and pi_coeff name the capacities and the
#: CO2 mortality coefficient (pi_coeff avoids confusion with the constant pi).
CONFIG_KEYS = {
    "alpha": "alpha",
    "phi": "phi",
    "beta": "beta",
    "epsilon": "epsilon",
    "p": "p",
    "eta": "eta",
    "mu": "mu",
    "omega": "omega",
    "K": "bigK",
    "theta": "theta",
    "sigma": "sigma",
    "s": "s",
    "M": "bigM",
    "nu": "nu",
    "pi_coeff": "pi",
}

DEFAULT_X0 = "130,0.121,1003,80"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fmt(value) -> str:
    return repr(float(value))


def _parse_x0(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(f"--x0 needs 4 comma-separated values C,G,F,N, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise UsageError(f"--x0 has a non-numeric component: {text!r}") from None


def _read_config_file(path) -> dict:
    overrides = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, value = (part.strip() for part in line.partition("="))
            if key not in CONFIG_KEYS:
                raise ValueError(
                    f"{path}:{lineno}: unknown key {key!r}; valid keys: "
                    f"{', '.join(sorted(CONFIG_KEYS))}"
                )
            try:
                overrides[CONFIG_KEYS[key]] = float(value)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad value {value!r} for {key!r}") from None
    return overrides


def _build_params(args) -> Parameters:
    values = dict(zip(PARAM_NAMES, BASELINE.as_tuple()))
    if getattr(args, "config", None):
        values.update(_read_config_file(args.config))
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise UsageError(f"--set needs KEY=VALUE, got {item!r}")
        key, _, value = (part.strip() for part in item.partition("="))
        if key not in CONFIG_KEYS:
            raise UsageError(
                f"--set: unknown key {key!r}; valid keys: {', '.join(sorted(CONFIG_KEYS))}"
            )
        try:
            values[CONFIG_KEYS[key]] = float(value)
        except ValueError:
            raise UsageError(f"--set: bad value {value!r} for {key!r}") from None
    return validate_params(Parameters(**values))


class _Output:
    """File or stdout writer ('-' means stdout)."""

    def __init__(self, target: str):
        self.target = target

    def __enter__(self):
        if self.target == "-":
            self._handle = None
            return sys.stdout
        self._handle = open(self.target, "w", newline="")
        return self._handle

    def __exit__(self, *exc):
        if self._handle is not None:
            self._handle.close()
        return False


def _write_trajectory(handle, traj) -> None:
    handle.write("t,C,G,F,N\n")
    for ti, row in zip(traj.t, traj.states):
        handle.write(",".join([_fmt(ti)] + [_fmt(v) for v in row]) + "\n")


# --- subcommand handlers -----------------------------------------------------


def _safe_equilibria(params):
    """E1-E4 plus the interior solver's error, if it failed to locate a root."""
    eqs = [equilibrium_e1(params), equilibrium_e2(params), equilibrium_e3(params)]
    try:
        eqs.append(equilibrium_e4(params))
        failure = None
    except RootFindError as err:
        failure = str(err)
    return eqs, failure


def _cmd_simulate(args) -> int:
    params = _build_params(args)
    traj = integrate_rk4(params, _parse_x0(args.x0), args.t_end, args.dt)
    with _Output(args.out) as handle:
        _write_trajectory(handle, traj)
    if traj.clamp_events:
        print(f"note: {traj.clamp_events} nonnegativity clamp event(s)", file=sys.stderr)
    return 0


def _equilibrium_lines(eq) -> list[str]:
    lines = [f"[{eq.kind}] exists={eq.exists} residual={_fmt(eq.residual_norm)}"]
    for name, value in zip(("C", "G", "F", "N"), eq.state):
        lines.append(f"  {name} = {_fmt(value)}")
    for cond in eq.conditions:
        lines.append(
            f"  condition {cond.name}: value={_fmt(cond.value)} satisfied={cond.satisfied}"
        )
    return lines


def _cmd_equilibria(args) -> int:
    params = _build_params(args)
    equilibria, failure = _safe_equilibria(params)
    lines = []
    for eq in equilibria:
        lines.extend(_equilibrium_lines(eq))
    if failure is not None:
        lines.append(f"[E4] solver failed: {failure}")
    with _Output(args.out) as handle:
        handle.write("\n".join(lines) + "\n")
    return 0


def _cmd_stability(args) -> int:
    params = _build_params(args)
    equilibria, failure = _safe_equilibria(params)
    lines = [] if failure is None else [f"[E4] solver failed: {failure}"]
    e4 = None
    for eq in equilibria:
        if eq.kind == "E4":
            e4 = eq
        if not eq.exists:
            lines.append(f"[{eq.kind}] does not exist (residual {_fmt(eq.residual_norm)})")
            continue
        report = classify_local(params, eq)
        lines.append(f"[{eq.kind}] locally_stable={report.locally_stable}")
        for z in report.eigenvalues:
            lines.append(f"  eigenvalue = {_fmt(z.real)} + {_fmt(z.imag)}j")
        for check in report.condition_checks:
            lines.append(
                f"  condition {check.name}: lhs={_fmt(check.lhs)} rhs={_fmt(check.rhs)} "
                f"satisfied={check.satisfied}"
            )
        if report.routh is not None:
            r = report.routh
            lines.append(
                f"  routh: A1={_fmt(r.a1)} A2={_fmt(r.a2)} A3={_fmt(r.a3)} "
                f"margin={_fmt(r.margin)}"
            )
    if e4 is not None and e4.exists:
        bounds = compute_bounds(params)
        glob = lyapunov_global_check(params, e4, bounds)
        lines.append(
            f"[global] m1={_fmt(glob.m1)} m2={_fmt(glob.m2)} lhs={_fmt(glob.lhs)} "
            f"rhs={_fmt(glob.rhs)} certified={glob.certified}"
        )
    with _Output(args.out) as handle:
        handle.write("\n".join(lines) + "\n")
    return 0


def _cmd_sweep(args) -> int:
    params = _build_params(args)
    tokens = [tok.strip() for tok in args.values.split(",") if tok.strip()]
    if not tokens:
        raise UsageError("--values must list at least one number")
    try:
        values = [float(tok) for tok in tokens]
    except ValueError:
        raise UsageError(f"--values has a non-numeric entry: {args.values!r}") from None
    runs = scenario_sweep(params, args.param, values, _parse_x0(args.x0), args.t_end, args.dt)
    os.makedirs(args.out_dir, exist_ok=True)
    summary_rows = []
    for token, traj in zip(tokens, runs):
        path = os.path.join(args.out_dir, f"sweep_{args.param}_{token}.csv")
        with open(path, "w", newline="") as handle:
            _write_trajectory(handle, traj)
        summary_rows.append([token] + [_fmt(v) for v in traj.final_state])
    summary_path = os.path.join(args.out_dir, f"sweep_{args.param}_summary.csv")
    with open(summary_path, "w", newline="") as handle:
        handle.write(f"{args.param},C,G,F,N\n")
        for row in summary_rows:
            handle.write(",".join(row) + "\n")
    for row in summary_rows:
        print(" ".join(row))
    return 0


def _cmd_gsa(args) -> int:
    _build_params(args)  # config validation only; the sampling space drives gsa
    report = run_gsa(
        default_parameter_space(),
        args.samples,
        args.t_snap,
        _parse_x0(args.x0),
        dt=args.dt,
        seed=args.seed,
        jobs=args.jobs,
    )
    with _Output(args.out) as handle:
        handle.write(f"# samples={report.n_samples}\n")
        handle.write(f"# seed={report.seed}\n")
        handle.write(f"# t_snap={_fmt(report.t_snap)}\n")
        handle.write(f"# failed={report.n_failed}\n")
        handle.write("parameter," + ",".join(report.compartments) + "\n")
        for i, name in enumerate(report.param_names):
            handle.write(name + "," + ",".join(_fmt(v) for v in report.prcc[i]) + "\n")
    return 0


def _cmd_control(args) -> int:
    params = _build_params(args)
    cfg = OcpConfig(
        weight_A=args.A,
        weight_B=args.B,
        u_max=args.umax,
        t_f=args.tf,
        dt=args.dt,
        relax=args.relax,
        tol=args.tol,
        max_iter=args.max_iter,
    )
    x0 = _parse_x0(args.x0)
    solution = solve_fbs(params, x0, cfg)
    baseline_u = params.epsilon if args.baseline_u is None else args.baseline_u
    baseline = constant_control_run(params, x0, baseline_u, args.tf, args.dt)
    j_baseline = objective(baseline, np.full_like(baseline.t, baseline_u), args.A, args.B)

    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "control_solution.csv"), "w", newline="") as handle:
        handle.write("t,u,C,G,F,N,lam1,lam2,lam3,lam4\n")
        for i in range(len(solution.t)):
            cells = (
                [_fmt(solution.t[i]), _fmt(solution.u[i])]
                + [_fmt(v) for v in solution.states[i]]
                + [_fmt(v) for v in solution.adjoints[i]]
            )
            handle.write(",".join(cells) + "\n")
    with open(os.path.join(args.out_dir, "control_baseline.csv"), "w", newline="") as handle:
        _write_trajectory(handle, baseline)
    summary = [
        f"J_optimal={_fmt(solution.objective)}",
        f"J_baseline={_fmt(j_baseline)}",
        f"baseline_u={_fmt(baseline_u)}",
        f"iterations={solution.iterations}",
        f"converged={solution.converged}",
    ]
    with open(os.path.join(args.out_dir, "control_summary.txt"), "w", newline="") as handle:
        handle.write("\n".join(summary) + "\n")
    print("\n".join(summary))
    if not solution.converged:
        print("control solve did not converge", file=sys.stderr)
        return 2
    return 0


def _cmd_estimate(args) -> int:
    series = load_series(args.data)
    columns = [args.column] if args.column else [
        name for name in SERIES_COLUMNS if name in series.values
    ]
    lines = [f"rows={series.n_rows} absent={','.join(series.absent) or 'none'}"]
    for name in columns:
        rate = estimate_growth_rate(series.column(name), geometric=args.geometric)
        kind = "geometric" if args.geometric else "arithmetic"
        lines.append(f"{name} {kind}_growth_rate_per_year={_fmt(rate)}")
    with _Output(args.out) as handle:
        handle.write("\n".join(lines) + "\n")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="carbonlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="parameter config file (key = value lines)")
    common.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="override one parameter (repeatable); highest precedence",
    )

    sim = sub.add_parser("simulate", parents=[common], help="integrate and write CSV")
    sim.add_argument("--t-end", type=float, default=2000.0)
    sim.add_argument("--dt", type=float, default=0.05)
    sim.add_argument("--x0", default=DEFAULT_X0, help="initial state C,G,F,N")
    sim.add_argument("--out", default="-")
    sim.set_defaults(func=_cmd_simulate)

    eq = sub.add_parser("equilibria", parents=[common], help="report the four equilibria")
    eq.add_argument("--out", default="-")
    eq.set_defaults(func=_cmd_equilibria)

    st = sub.add_parser("stability", parents=[common], help="stability report")
    st.add_argument("--out", default="-")
    st.set_defaults(func=_cmd_stability)

    sw = sub.add_parser("sweep", parents=[common], help="one run per parameter value")
    sw.add_argument("--param", required=True, choices=PARAM_NAMES)
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--t-end", type=float, default=2000.0)
    sw.add_argument("--dt", type=float, default=0.05)
    sw.add_argument("--x0", default=DEFAULT_X0)
    sw.add_argument("--out-dir", default=".")
    sw.set_defaults(func=_cmd_sweep)

    gsa = sub.add_parser("gsa", parents=[common], help="LHS/PRCC sensitivity")
    gsa.add_argument("--samples", type=int, required=True)
    gsa.add_argument("--seed", type=int, default=0)
    gsa.add_argument("--t-snap", type=float, default=4000.0)
    gsa.add_argument("--dt", type=float, default=GSA_DEFAULT_DT)
    gsa.add_argument("--x0", default=DEFAULT_X0)
    gsa.add_argument("--jobs", type=int, default=1)
    gsa.add_argument("--out", default="-")
    gsa.set_defaults(func=_cmd_gsa)

    ctl = sub.add_parser("control", parents=[common], help="optimal control solve")
    ctl.add_argument("--A", type=float, default=0.0001, help="state cost weight")
    ctl.add_argument("--B", type=float, default=10.0, help="control cost weight")
    ctl.add_argument("--umax", type=float, default=0.008)
    ctl.add_argument("--tf", type=float, default=100.0)
    ctl.add_argument("--dt", type=float, default=0.05)
    ctl.add_argument("--relax", type=float, default=0.5)
    ctl.add_argument("--tol", type=float, default=1e-6)
    ctl.add_argument("--max-iter", type=int, default=200)
    ctl.add_argument(
        "--baseline-u",
        type=float,
        default=None,
        help="constant control of the comparison run (default: epsilon)",
    )
    ctl.add_argument("--x0", default=DEFAULT_X0)
    ctl.add_argument("--out-dir", default=".")
    ctl.set_defaults(func=_cmd_control)

    est = sub.add_parser("estimate", parents=[common], help="growth rates from data")
    est.add_argument("--data", required=True)
    est.add_argument("--geometric", action="store_true", help="compound instead of mean rate")
    est.add_argument("--column", choices=SERIES_COLUMNS)
    est.add_argument("--out", default="-")
    est.set_defaults(func=_cmd_estimate)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SystemExit as err:  # --help / --version
        return int(err.code or 0)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ParameterError, UnboundedRegionError, SeriesError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (NonfiniteStateError, RootFindError, RuntimeError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
