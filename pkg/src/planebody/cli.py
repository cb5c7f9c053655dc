"""Command line front end.

Subcommands:

    solve      closed-form trajectory on the sample grid -> <name>_exact.csv
    integrate  adaptive numeric trajectory               -> <name>_numeric.csv
    compare    both routes plus a deviation report       -> *_exact.csv,
               *_numeric.csv, <name>_compare.txt
    classify   spectrum report, period prediction and
               best-effort period detection              -> <name>_classify.txt
    demo       write a built-in scenario file, then run the full pipeline

Exit codes: 0 success, 1 runtime/model failure, 2 configuration or usage
failure.  Failures print a single ``ERROR <code>: <detail>`` line to stderr.
Data files are deterministic; timing goes to stdout only.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import exact, linalg
from .classify import classify, detect_period, rational_period
from .errors import InsufficientSpanError, PlanebodyError, ScenarioError, ValidationError
from .integrate import Trajectory, compare, integrate, trajectory_from_states
from .model import alpha_matrix, rhs_base, rhs_generalized, rhs_pair, to_complex
from .scenario import Scenario, builtin_scenarios, parse_scenario

_NUM = "{:.17g}".format


class _Parser(argparse.ArgumentParser):
    """argparse with the shared one-line error format and exit code 2."""

    def error(self, message):
        print(f"ERROR Usage: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="planebody", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out-dir", default=".", help="directory for output files")
        p.add_argument("--samples", type=int, default=None, help="override sample count")
        p.add_argument("--rtol", type=float, default=None, help="override relative tolerance")
        p.add_argument("--atol", type=float, default=None, help="override absolute tolerance")

    p = sub.add_parser("solve", help="evaluate the closed-form solution")
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("integrate", help="integrate the equations of motion")
    common(p)
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("compare", help="run both routes and report deviations")
    common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("classify", help="classify the coupling spectrum")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("demo", help="write and run a built-in scenario")
    p.add_argument("name", choices=sorted(builtin_scenarios()), help="demo name")
    common(p, scenario=False)
    p.set_defaults(func=_cmd_demo)

    return parser


def _load(args) -> Scenario:
    sc = parse_scenario(args.scenario)
    return _apply_overrides(sc, args)


def _apply_overrides(sc: Scenario, args) -> Scenario:
    changes = {}
    if getattr(args, "samples", None) is not None:
        changes["sample_count"] = args.samples
    if getattr(args, "rtol", None) is not None:
        changes["rtol"] = args.rtol
    if getattr(args, "atol", None) is not None:
        changes["atol"] = args.atol
    if not changes:
        return sc
    try:
        cfg = dataclasses.replace(sc.integrator, **changes)
    except ValueError as exc:
        raise ValidationError("integrator", str(exc)) from exc
    return dataclasses.replace(sc, integrator=cfg)


def _sample_times(sc: Scenario) -> np.ndarray:
    t0, t1 = sc.integrator.t_span
    return np.linspace(t0, t1, sc.integrator.sample_count)


def _exact_trajectory(sc: Scenario) -> Trajectory:
    times = _sample_times(sc)
    if sc.variant == "pair":
        ps = exact.pair_solve(sc.pair, sc.initial)
        states = [exact.eval_pair_solution(ps, float(t)) for t in times]
        return trajectory_from_states(times, states, pair=True)
    sol = exact.spectral_solve(sc.couplings, to_complex(sc.initial))
    states = exact.exact_states(sol, times, g=sc.generalized)
    return trajectory_from_states(times, states)


def _numeric_trajectory(sc: Scenario) -> Trajectory:
    if sc.variant == "pair":
        rhs = lambda t, s: rhs_pair(sc.pair, s)
    elif sc.variant == "generalized":
        rhs = lambda t, s: rhs_generalized(sc.couplings, sc.generalized, t, s)
    else:
        rhs = lambda t, s: rhs_base(sc.couplings, s)
    return integrate(rhs, sc.initial, sc.integrator)


def _out_path(args, filename: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, filename)


def write_trajectory_csv(path: str, traj: Trajectory) -> None:
    """Write t,x_1,y_1,vx_1,vy_1,... rows, one per sample, at full precision."""
    cols = ["t"]
    for j in range(traj.n_particles):
        cols += [f"x_{j + 1}", f"y_{j + 1}", f"vx_{j + 1}", f"vy_{j + 1}"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(len(traj.times)):
            row = [_NUM(traj.times[i])]
            for j in range(traj.n_particles):
                row.append(_NUM(traj.positions[i, j, 0]))
                row.append(_NUM(traj.positions[i, j, 1]))
                row.append(_NUM(traj.velocities[i, j, 0]))
                row.append(_NUM(traj.velocities[i, j, 1]))
            fh.write(",".join(row) + "\n")


def read_trajectory_csv(path: str, pair: bool = False) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    p = (data.shape[1] - 1) // 4
    times = data[:, 0]
    pos = data[:, 1:].reshape(len(times), p, 4)[:, :, 0:2]
    vel = data[:, 1:].reshape(len(times), p, 4)[:, :, 2:4]
    return Trajectory(times=times, positions=pos, velocities=vel, pair=pair)


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_solve(args) -> int:
    sc = _load(args)
    traj = _exact_trajectory(sc)
    path = _out_path(args, f"{sc.name}_exact.csv")
    write_trajectory_csv(path, traj)
    print(f"wrote {path}")
    return 0


def _cmd_integrate(args) -> int:
    sc = _load(args)
    started = time.perf_counter()
    traj = _numeric_trajectory(sc)
    elapsed = time.perf_counter() - started
    path = _out_path(args, f"{sc.name}_numeric.csv")
    write_trajectory_csv(path, traj)
    print(f"wrote {path}")
    stats = traj.metadata.get("stats", {})
    print(f"accepted steps: {stats.get('accepted', '?')}, wall time: {elapsed:.3f}s")
    return 0


def _cmd_compare(args) -> int:
    sc = _load(args)
    _run_compare(sc, args)
    return 0


def _run_compare(sc: Scenario, args):
    exact_traj = _exact_trajectory(sc)
    numeric_traj = _numeric_trajectory(sc)
    exact_path = _out_path(args, f"{sc.name}_exact.csv")
    numeric_path = _out_path(args, f"{sc.name}_numeric.csv")
    write_trajectory_csv(exact_path, exact_traj)
    write_trajectory_csv(numeric_path, numeric_traj)
    report = compare(exact_traj, numeric_traj)
    report_path = _out_path(args, f"{sc.name}_compare.txt")
    _write_lines(report_path, report.lines())
    for path in (exact_path, numeric_path, report_path):
        print(f"wrote {path}")
    print(f"max position deviation: {_NUM(report.max_position_abs)}")
    print(f"max velocity deviation: {_NUM(report.max_velocity_abs)}")
    return report


def _spectrum_for(sc: Scenario) -> np.ndarray:
    w = linalg.eigenvalues(alpha_matrix(sc.couplings))
    if sc.variant == "pair":
        mu = sc.pair.lam + 1j * sc.pair.omega
        w = np.sort_complex(np.concatenate([w, mu]))
    return w


def _classification_lines(sc: Scenario, detected) -> list[str]:
    w = _spectrum_for(sc)
    mc = classify(w)
    rows = [f"scenario: {sc.name}", f"variant: {sc.variant}", f"particles: {sc.n}"]
    for k, wk in enumerate(w):
        rows.append(f"eigenvalue_{k + 1}: {_NUM(wk.real)}{wk.imag:+.17g}i")
    rows += [
        f"all_damped: {str(mc.all_damped).lower()}",
        f"has_imaginary: {str(mc.has_imaginary).lower()}",
        f"all_imaginary: {str(mc.all_imaginary).lower()}",
        f"has_zero_mode: {str(mc.has_zero_mode).lower()}",
        f"has_unstable: {str(mc.has_unstable).lower()}",
        f"row_sums_zero: {str(exact.row_sums_zero(sc.couplings)).lower()}",
    ]
    period = mc.completely_periodic
    rows.append(f"predicted_period: {_NUM(period) if period is not None else 'none'}")
    if detected is None:
        rows.append("detected_period: none")
    elif isinstance(detected, str):
        rows.append(f"detected_period: {detected}")
    else:
        rows.append(f"detected_period: {_NUM(detected)}")
    return rows


def _detect_on_trajectory(sc: Scenario):
    """Best-effort period detection on a numeric run; never fatal."""
    try:
        traj = _numeric_trajectory(sc)
        w = _spectrum_for(sc)
        return detect_period(traj, eigenvalues=w)
    except InsufficientSpanError:
        return "unavailable (time span shorter than twice the candidate period)"
    except PlanebodyError as exc:
        return f"unavailable ({exc.code})"


def _cmd_classify(args) -> int:
    sc = _load(args)
    detected = _detect_on_trajectory(sc)
    lines = _classification_lines(sc, detected)
    path = _out_path(args, f"{sc.name}_classify.txt")
    _write_lines(path, lines)
    for line in lines:
        print(line)
    print(f"wrote {path}")
    return 0


def _cmd_demo(args) -> int:
    data = builtin_scenarios()[args.name]
    scenario_path = _out_path(args, f"{data['name']}_scenario.json")
    with open(scenario_path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")
    print(f"wrote {scenario_path}")

    # Re-read through the parser so the demo exercises the documented format.
    sc = _apply_overrides(parse_scenario(scenario_path), args)
    outputs = set(sc.outputs)
    if "comparison" in outputs:
        _run_compare(sc, args)
    elif "trajectory" in outputs:
        traj = _exact_trajectory(sc)
        path = _out_path(args, f"{sc.name}_exact.csv")
        write_trajectory_csv(path, traj)
        print(f"wrote {path}")
    if "classification" in outputs:
        detected = _detect_on_trajectory(sc)
        lines = _classification_lines(sc, detected)
        path = _out_path(args, f"{sc.name}_classify.txt")
        _write_lines(path, lines)
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 2
    except PlanebodyError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())
