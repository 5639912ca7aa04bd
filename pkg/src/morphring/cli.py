"""Command-line front end: simulate, sweep, steer, inertia-table.

Every subcommand reads an optional TOML config (``--config``), falls back
to the built-in reference scenario otherwise, and writes its artifacts
under ``--out-dir`` (or the config's output directory). Exit codes: 0 on
success, 1 when a run or solve fails, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10: the API-identical backport
    import tomli as tomllib

import numpy as np

from ._version import __version__
from .collocation import SteeringProblem, reintegrate, solve_steering
from .errors import ConfigError, MorphringError
from .geometry import RingParams, inertia_triple, solve_axis_for_perimeter
from .scenarios import (
    SweepSpec,
    _fmt,
    _take,
    config_from_dict,
    default_scenario,
    emit_outputs,
    emit_sweep_outputs,
    run_scenario,
    run_sweep,
    seed_check,
    sweep_from_toml,
    trajectory_csv,
)
from .tumbling import SlopeModel, TumbleState

__all__ = ["main", "build_parser", "steer_problem_from_toml"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphring",
        description="Deformable-ring tumbling simulation and steering toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML scenario config")
    common.add_argument(
        "--out-dir", type=Path, default=None, help="output directory (overrides config)"
    )
    common.add_argument(
        "--seed-check",
        action="store_true",
        help="run the fast invariant suite first; abort on any failure",
    )
    sub = parser.add_subparsers(dest="command")
    sub.add_parser(
        "simulate", parents=[common], help="run one scenario and write its artifacts"
    )
    sub.add_parser(
        "sweep", parents=[common], help="run an impulse parameter grid concurrently"
    )
    sub.add_parser(
        "steer", parents=[common], help="solve the collocation steering problem"
    )
    sub.add_parser(
        "inertia-table", parents=[common], help="tabulate the inertia triple against b"
    )
    return parser


def _read_config_text(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e


def _run_seed_check() -> bool:
    rows = seed_check()
    ok = True
    for name, passed, detail in rows:
        tag = "ok  " if passed else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        print(f"[{tag}] {name}{suffix}")
        ok = ok and passed
    return ok


def _cmd_simulate(args) -> int:
    if args.config is not None:
        from .scenarios import config_from_toml

        cfg = config_from_toml(_read_config_text(args.config))
    else:
        cfg = default_scenario()
    out_dir = args.out_dir if args.out_dir is not None else Path(cfg.outputs.out_dir)
    traj, summary = run_scenario(cfg)
    written = emit_outputs(traj, summary, cfg, out_dir=out_dir)
    print(f"simulated {summary.terminal_time:g} s in {summary.n_steps} steps")
    print(
        f"terminal heading {summary.terminal_heading:.6g} rad, "
        f"lateral {summary.terminal_lateral:.6g} m, "
        f"energy drift {summary.max_energy_drift:.3g}"
    )
    for p in written:
        print(f"wrote {p}")
    return 0


def _default_sweep() -> SweepSpec:
    base = default_scenario()
    return SweepSpec(amplitudes=(0.2, 0.35), sharpnesses=(5.0, 10.0), base=base)


def _cmd_sweep(args) -> int:
    if args.config is not None:
        spec = sweep_from_toml(_read_config_text(args.config))
    else:
        spec = _default_sweep()
    out_dir = (
        args.out_dir if args.out_dir is not None else Path(spec.base.outputs.out_dir)
    )
    result = run_sweep(spec)
    written = emit_sweep_outputs(result, spec.base, out_dir)
    n_fail = sum(1 for r in result.rows if r.status != "completed")
    for row in result.rows:
        if row.status == "completed":
            print(
                f"b'={row.amplitude:g} g={row.sharpness:g}: "
                f"deviation {row.lateral_deviation:.6g} m, "
                f"heading change {row.heading_change:.6g} rad"
            )
        else:
            print(f"b'={row.amplitude:g} g={row.sharpness:g}: FAILED")
    for p in written:
        print(f"wrote {p}")
    return 1 if n_fail else 0


def steer_problem_from_toml(text: str) -> SteeringProblem:
    """Build a steering problem from a scenario config plus a [steer] table.

    [ring] and [initial] define the plant and the fixed initial state;
    [steer] holds the transcription settings. y_bounds is a 3x2 array of
    [min, max] rows; omitted fields fall back to the class defaults.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"TOML parse error: {e}") from e
    if "steer" not in data:
        raise ConfigError("steer config needs a [steer] table")
    base = dict(data)
    steer = base.pop("steer")
    base.setdefault("duration", 6.0)  # unused by the solve; keeps parsing uniform
    cfg = config_from_dict(base)

    def _bounds(v):
        arr = np.asarray(v, dtype=float)
        if arr.shape != (3, 2):
            raise ValueError("y_bounds must be a 3x2 array of [min, max] rows")
        return arr

    fields = _take(
        steer,
        "steer",
        {
            "n": (int, None),
            "theta_d": (float, None),
            "y_bounds": (_bounds, None),
            "cost_mode": (str, "terminal"),
            "perp_slack": (float, 1e-6),
            "t_f_init": (float, 3.0),
            "t_f_bounds": (lambda v: (float(v[0]), float(v[1])), (0.5, 10.0)),
            "max_iter": (int, 200),
        },
    )
    try:
        return SteeringProblem(
            n=fields["n"],
            theta_d=fields["theta_d"],
            x_init=cfg.initial.as_array(),
            y_bounds=fields["y_bounds"],
            params=cfg.ring,
            slope_model=cfg.slope_model,
            cost_mode=fields["cost_mode"],
            perp_slack=fields["perp_slack"],
            t_f_init=fields["t_f_init"],
            t_f_bounds=fields["t_f_bounds"],
            max_iter=fields["max_iter"],
        )
    except ValueError as e:
        raise ConfigError(f"invalid steer config: {e}") from e


def _default_steer() -> SteeringProblem:
    """Small flat-ground steering demo with the mean-radius lever.

    Mean radius keeps each defect evaluation free of axis inversions, so
    the default solve finishes in seconds. The output box is clamped to
    the band of triples an ellipse of this perimeter actually attains
    (semi-axis b between 0.27 and 0.37), keeping every solved command
    invertible to axes when the result is re-simulated.
    """
    from .geometry import RadiusPolicy, solve_axis_for_perimeter

    params = RingParams(
        mass=1.0,
        perimeter=2.0,
        incline=0.0,
        radius_policy=RadiusPolicy.MEAN_RADIUS,
    )
    y_circle = inertia_triple(
        params.perimeter / (2.0 * math.pi),
        params.perimeter / (2.0 * math.pi),
        params,
    )
    band = []
    for b in (0.27, 0.37):
        a = solve_axis_for_perimeter(params.perimeter, b, params.quad_points)
        band.append(inertia_triple(a, b, params))
    lo = np.array(
        [min(t.y1 for t in band), 0.8 * y_circle.y2, min(t.y3 for t in band)]
    )
    hi = np.array(
        [max(t.y1 for t in band), 1.25 * y_circle.y2, max(t.y3 for t in band)]
    )
    x_init = TumbleState(
        heading_rate=0.0,
        lean_rate=0.5,
        spin_rate=2.0 * math.pi,
        heading=0.0,
        lean=math.pi / 2,
        spin=0.0,
        contact_x=0.0,
        contact_y=0.0,
    ).as_array()
    return SteeringProblem(
        n=10,
        theta_d=0.2,
        x_init=x_init,
        y_bounds=np.column_stack([lo, hi]),
        params=params,
        slope_model=SlopeModel.EXTENDED,
        t_f_init=2.1,
        t_f_bounds=(0.5, 6.0),
    )


def _cmd_steer(args) -> int:
    if args.config is not None:
        problem = steer_problem_from_toml(_read_config_text(args.config))
    else:
        problem = _default_steer()
    out_dir = args.out_dir if args.out_dir is not None else Path("runs")
    out_dir.mkdir(parents=True, exist_ok=True)

    report = solve_steering(problem)
    print(
        f"steering solve: {report.status}, cost {report.cost:.6g}, "
        f"violation {report.max_violation:.3g}, "
        f"stationarity {report.stationarity:.3g}, {report.n_iter} iterations"
    )

    payload = {
        "toolkit_version": __version__,
        "status": report.status,
        "converged": report.converged,
        "cost": report.cost,
        "max_violation": report.max_violation,
        "stationarity": report.stationarity,
        "n_iter": report.n_iter,
        "message": report.message,
        "breakdown": report.breakdown,
        "final_time": report.decision.final_time,
        "theta_d": problem.theta_d,
    }
    terminal_heading = None
    if report.converged:
        traj = reintegrate(report.decision, problem)
        terminal_heading = float(traj.states[-1, 3])
        payload["reintegrated_terminal_heading"] = terminal_heading
        (out_dir / "steer_trajectory.csv").write_text(trajectory_csv(traj))
        print(f"reintegrated terminal heading {terminal_heading:.6g} rad")
        print(f"wrote {out_dir / 'steer_trajectory.csv'}")
    (out_dir / "steer_report.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {out_dir / 'steer_report.json'}")
    return 0 if report.converged else 1


def _cmd_inertia_table(args) -> int:
    ring = RingParams(mass=1.0, perimeter=2.0)
    grid_spec = {"b_min": None, "b_max": None, "count": 60}
    if args.config is not None:
        try:
            data = tomllib.loads(_read_config_text(args.config))
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"TOML parse error: {e}") from e
        if "ring" in data:
            cfg = config_from_dict(
                {"ring": data["ring"], "duration": 1.0}
            )
            ring = cfg.ring
        if "inertia_table" in data:
            tbl = _take(
                data["inertia_table"],
                "inertia_table",
                {"b_min": (float, -1.0), "b_max": (float, -1.0), "count": (int, 60)},
            )
            grid_spec["b_min"] = tbl["b_min"] if tbl["b_min"] > 0 else None
            grid_spec["b_max"] = tbl["b_max"] if tbl["b_max"] > 0 else None
            grid_spec["count"] = tbl["count"]
    P = ring.perimeter
    b_min = grid_spec["b_min"] if grid_spec["b_min"] is not None else 0.02 * P
    b_max = grid_spec["b_max"] if grid_spec["b_max"] is not None else 0.24 * P
    if not (0 < b_min < b_max < 0.25 * P):
        raise ConfigError(
            f"inertia table needs 0 < b_min < b_max < P/4 = {0.25 * P:g}"
        )
    if grid_spec["count"] < 2:
        raise ConfigError("inertia table needs at least 2 grid points")

    out_dir = args.out_dir if args.out_dir is not None else Path("runs")
    out_dir.mkdir(parents=True, exist_ok=True)
    bs = np.linspace(b_min, b_max, grid_spec["count"])
    lines = ["b,a,y1,y2,y3"]
    rows = np.empty((bs.size, 3))
    for i, b in enumerate(bs):
        a = solve_axis_for_perimeter(P, float(b), ring.quad_points)
        y = inertia_triple(a, float(b), ring)
        rows[i] = (y.y1, y.y2, y.y3)
        lines.append(
            ",".join([_fmt(b), _fmt(a), _fmt(y.y1), _fmt(y.y2), _fmt(y.y3)])
        )
    csv_path = out_dir / "inertia_table.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    print(f"wrote {csv_path}")

    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "morphring"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for k, label in enumerate(["y1", "y2", "y3"]):
        ax.plot(bs, rows[:, k], label=label, linewidth=1.2)
    ax.set_xlabel("semi-axis b (m)")
    ax.set_ylabel("inertia (kg m^2)")
    ax.set_title(f"inertia triple vs b at perimeter {P:g} m")
    ax.legend()
    fig.tight_layout()
    svg_path = out_dir / "inertia_vs_b.svg"
    fig.savefig(svg_path, metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {svg_path}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "steer": _cmd_steer,
    "inertia-table": _cmd_inertia_table,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return int(e.code or 0)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        if args.seed_check and not _run_seed_check():
            print("seed check failed; aborting", file=sys.stderr)
            return 1
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except MorphringError as e:
        print(f"run failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
