"""Scenario running: configs, sweeps, and file outputs.

A scenario is one cascade simulation: ring constants, an initial tumbling
state, an optional axis impulse, a duration, and integrator settings.
Configs round-trip losslessly through a TOML text form (floats are
written with repr, which TOML parses back bit-exactly), runs are sampled
on a fixed output grid, and every run can emit a CSV, static plots, and
a JSON manifest sufficient to reproduce it byte for byte.
"""

from __future__ import annotations

import json
import math
import traceback

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10: the API-identical backport
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import ConfigError, MorphringError, SimulationError
from .geometry import (
    FrozenAxes,
    ImpulseAxisSchedule,
    ImpulseInput,
    RadiusPolicy,
    RingParams,
)
from .integrators import IntegratorConfig, Trajectory, TumbleCascade, integrate_cascade
from .tumbling import SlopeModel, TumbleState

__all__ = [
    "CSV_HEADER",
    "OutputConfig",
    "ScenarioConfig",
    "SweepSpec",
    "RunSummary",
    "SweepRow",
    "SweepResult",
    "default_scenario",
    "run_scenario",
    "run_sweep",
    "emit_outputs",
    "emit_sweep_outputs",
    "config_to_dict",
    "config_from_dict",
    "config_to_toml",
    "config_from_toml",
    "sweep_from_toml",
    "seed_check",
]

CSV_HEADER = (
    "t,heading,lean,spin,heading_rate,lean_rate,spin_rate,"
    "pc_x,pc_y,a,b,y1,y2,y3,energy"
)


@dataclass(frozen=True)
class OutputConfig:
    out_dir: str = "runs"
    write_csv: bool = True
    write_plots: bool = True
    write_manifest: bool = True

    def __post_init__(self):
        if not self.out_dir:
            raise ValueError("out_dir must be a nonempty path")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one simulation run depends on."""

    ring: RingParams
    initial: TumbleState
    impulse: ImpulseInput | None
    duration: float
    integrator: IntegratorConfig
    slope_model: SlopeModel = SlopeModel.EXTENDED
    outputs: OutputConfig = OutputConfig()
    output_hz: float = 200.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if not self.output_hz > 0:
            raise ValueError("output_hz must be positive")
        if self.impulse is not None:
            self.impulse.check_feasible(self.ring.perimeter)

    @property
    def radius_policy(self) -> RadiusPolicy:
        return self.ring.radius_policy


@dataclass(frozen=True)
class SweepSpec:
    """Amplitude/sharpness grid over a base scenario."""

    amplitudes: tuple[float, ...]
    sharpnesses: tuple[float, ...]
    base: ScenarioConfig

    def __post_init__(self):
        if len(self.amplitudes) == 0 or len(self.sharpnesses) == 0:
            raise ValueError("sweep grids must be nonempty")
        if self.base.impulse is None:
            raise ValueError("sweep base scenario must define an impulse")


@dataclass(frozen=True)
class RunSummary:
    terminal_time: float
    terminal_heading: float
    heading_change: float
    terminal_lateral: float
    max_lateral: float
    max_energy_drift: float
    n_steps: int
    n_rejected: int
    n_rhs: int

    def as_dict(self) -> dict:
        return {
            "terminal_time": self.terminal_time,
            "terminal_heading": self.terminal_heading,
            "heading_change": self.heading_change,
            "terminal_lateral": self.terminal_lateral,
            "max_lateral": self.max_lateral,
            "max_energy_drift": self.max_energy_drift,
            "n_steps": self.n_steps,
            "n_rejected": self.n_rejected,
            "n_rhs": self.n_rhs,
        }


def default_scenario(
    amplitude: float = 0.35,
    sharpness: float = 10.0,
    incline_deg: float = 5.0,
    duration: float = 6.0,
    out_dir: str = "runs",
) -> ScenarioConfig:
    """The reference protocol: downhill roll with a mid-run axis impulse.

    A 2 m ring on a 5 degree incline, rolling at 2 pi rad/s with a
    0.5 rad/s lean wobble, impulse centered at t0 = 2 s on a resting
    full-axis length of P / (2 pi).
    """
    perimeter = 2.0
    ring = RingParams(
        mass=1.0,
        perimeter=perimeter,
        gravity=9.81,
        incline=math.radians(incline_deg),
        quad_points=512,
        radius_policy=RadiusPolicy.SUPPORT_FUNCTION,
    )
    initial = TumbleState(
        heading_rate=0.0,
        lean_rate=0.5,
        spin_rate=2.0 * math.pi,
        heading=0.0,
        lean=math.pi / 2,
        spin=0.0,
        contact_x=0.0,
        contact_y=0.0,
    )
    impulse = ImpulseInput(
        amplitude=amplitude,
        center_time=2.0,
        sharpness=sharpness,
        baseline=perimeter / (2.0 * math.pi),
    )
    return ScenarioConfig(
        ring=ring,
        initial=initial,
        impulse=impulse,
        duration=duration,
        integrator=IntegratorConfig(),
        slope_model=SlopeModel.EXTENDED,
        outputs=OutputConfig(out_dir=out_dir),
    )


def _output_grid(cfg: ScenarioConfig) -> np.ndarray:
    n = int(round(cfg.duration * cfg.output_hz))
    return np.linspace(0.0, cfg.duration, n + 1)


def run_scenario(cfg: ScenarioConfig) -> tuple[Trajectory, RunSummary]:
    """Execute one cascade simulation on the fixed output grid.

    Integration failures come back as SimulationError with the failure
    time and the last accepted state attached.
    """
    if cfg.impulse is not None:
        schedule = ImpulseAxisSchedule(
            cfg.impulse, cfg.ring.perimeter, cfg.ring.quad_points
        )
    else:
        radius = cfg.ring.perimeter / (2.0 * math.pi)
        schedule = FrozenAxes(radius, radius)
    cascade = TumbleCascade(cfg.ring, schedule, cfg.slope_model)

    last = {"t": 0.0, "x": cfg.initial.as_array()}

    def rhs(t, x):
        last["t"], last["x"] = t, x
        return cascade(t, x)

    grid = _output_grid(cfg)
    try:
        traj = integrate_cascade(
            _TrackedCascade(cascade, rhs),
            cfg.initial.as_array(),
            (0.0, cfg.duration),
            cfg.integrator,
            t_eval=grid,
        )
    except MorphringError as e:
        raise SimulationError(
            f"run failed at t={last['t']:.6g} s: {e}",
            time=float(last["t"]),
            state=np.array(last["x"], dtype=float),
        ) from e

    energies = traj.diagnostics.energies
    e0 = energies[0]
    drift = float(np.max(np.abs(energies - e0)) / max(abs(e0), 1e-30))
    summary = RunSummary(
        terminal_time=float(traj.times[-1]),
        terminal_heading=float(traj.states[-1, 3]),
        heading_change=float(traj.states[-1, 3] - traj.states[0, 3]),
        terminal_lateral=float(traj.states[-1, 7]),
        max_lateral=float(np.max(np.abs(traj.states[:, 7]))),
        max_energy_drift=drift,
        n_steps=traj.diagnostics.n_steps,
        n_rejected=traj.diagnostics.n_rejected,
        n_rhs=traj.diagnostics.n_rhs,
    )
    return traj, summary


class _TrackedCascade:
    """Cascade wrapper that lets run_scenario surface the failure point."""

    def __init__(self, cascade: TumbleCascade, rhs):
        self._cascade = cascade
        self._rhs = rhs

    def __call__(self, t, x):
        return self._rhs(t, x)

    def __getattr__(self, name):
        return getattr(self._cascade, name)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepRow:
    amplitude: float
    sharpness: float
    status: str
    lateral_deviation: float | None
    heading_change: float | None
    deflection: np.ndarray | None
    summary: RunSummary | None = None
    csv_text: str | None = field(default=None, repr=False)
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    baseline_summary: RunSummary
    times: np.ndarray


def _sweep_point(cfg: ScenarioConfig):
    try:
        traj, summary = run_scenario(cfg)
        return (
            trajectory_csv(traj),
            traj.states[:, 7].copy(),
            traj.states[:, 3].copy(),
            summary,
            None,
        )
    except Exception:  # noqa: BLE001 - a failed point must not sink the sweep
        return None, None, None, None, traceback.format_exc()


def run_sweep(spec: SweepSpec, max_workers: int | None = None) -> SweepResult:
    """One run per (amplitude, sharpness) grid point, concurrently.

    Deviations are measured against a zero-amplitude baseline run of the
    same base scenario. Individual failures are recorded in their row and
    the sweep continues. Row order is sorted by (amplitude, sharpness)
    no matter how the concurrent runs complete.
    """
    base = spec.base
    quiet = replace(base, impulse=replace(base.impulse, amplitude=0.0))
    base_traj, base_summary = run_scenario(quiet)
    base_lat = base_traj.states[:, 7]
    base_head = base_traj.states[:, 3]

    points = [
        (bp, ga) for bp in sorted(spec.amplitudes) for ga in sorted(spec.sharpnesses)
    ]
    configs = [
        replace(base, impulse=replace(base.impulse, amplitude=bp, sharpness=ga))
        for bp, ga in points
    ]
    if max_workers == 0:
        results = [_sweep_point(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_sweep_point, configs))

    rows = []
    for (bp, ga), (csv_text, lat, head, summary, err) in zip(points, results):
        if err is not None:
            rows.append(
                SweepRow(bp, ga, "failed", None, None, None, error=err)
            )
            continue
        deflection = lat - base_lat
        rows.append(
            SweepRow(
                amplitude=bp,
                sharpness=ga,
                status="completed",
                lateral_deviation=float(abs(deflection[-1])),
                heading_change=float(head[-1] - base_head[-1]),
                deflection=deflection,
                summary=summary,
                csv_text=csv_text,
            )
        )
    return SweepResult(
        rows=tuple(rows), baseline_summary=base_summary, times=base_traj.times.copy()
    )


# ---------------------------------------------------------------------------
# outputs


def _fmt(v: float) -> str:
    return repr(float(v))


def trajectory_csv(traj: Trajectory) -> str:
    """Render a cascade trajectory as CSV text with the fixed 15 columns."""
    if traj.postures is None or traj.inertias is None or traj.diagnostics.energies is None:
        raise ValueError("trajectory lacks cascade samples; run it through run_scenario")
    lines = [CSV_HEADER]
    for i in range(len(traj)):
        x = traj.states[i]
        p = traj.postures[i]
        y = traj.inertias[i]
        lines.append(
            ",".join(
                [
                    _fmt(traj.times[i]),
                    _fmt(x[3]),
                    _fmt(x[4]),
                    _fmt(x[5]),
                    _fmt(x[0]),
                    _fmt(x[1]),
                    _fmt(x[2]),
                    _fmt(x[6]),
                    _fmt(x[7]),
                    _fmt(p.xi5),
                    _fmt(p.xi6),
                    _fmt(y.y1),
                    _fmt(y.y2),
                    _fmt(y.y3),
                    _fmt(traj.diagnostics.energies[i]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def emit_outputs(
    traj: Trajectory, summary: RunSummary, cfg: ScenarioConfig, out_dir: str | Path | None = None
) -> list[Path]:
    """Write the run artifacts: CSV, plots, manifest. Returns written paths."""
    out = Path(out_dir if out_dir is not None else cfg.outputs.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise MorphringError(f"cannot create output directory {out}: {e}") from e
    written: list[Path] = []
    if cfg.outputs.write_csv:
        p = out / "trajectory.csv"
        p.write_text(trajectory_csv(traj))
        written.append(p)
    if cfg.outputs.write_manifest:
        p = out / "manifest.json"
        manifest = {
            "toolkit_version": __version__,
            "config": config_to_dict(cfg),
            "summary": summary.as_dict(),
            "samples": len(traj),
        }
        p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        written.append(p)
    if cfg.outputs.write_plots:
        written.extend(_write_plots(traj, cfg, out))
    return written


def emit_sweep_outputs(result: SweepResult, cfg: ScenarioConfig, out_dir: str | Path) -> list[Path]:
    """Sweep summary CSV, per-run trajectory CSVs, and a deflection overlay."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["amplitude,sharpness,status,lateral_deviation,heading_change"]
    for row in result.rows:
        lines.append(
            ",".join(
                [
                    _fmt(row.amplitude),
                    _fmt(row.sharpness),
                    row.status,
                    _fmt(row.lateral_deviation) if row.lateral_deviation is not None else "",
                    _fmt(row.heading_change) if row.heading_change is not None else "",
                ]
            )
        )
    p = out / "sweep_summary.csv"
    p.write_text("\n".join(lines) + "\n")
    written = [p]
    for row in result.rows:
        run_dir = out / f"run_b{row.amplitude:g}_g{row.sharpness:g}"
        run_dir.mkdir(exist_ok=True)
        if row.csv_text is not None:
            q = run_dir / "trajectory.csv"
            q.write_text(row.csv_text)
        else:
            q = run_dir / "error.txt"
            q.write_text(row.error or "unknown failure\n")
        written.append(q)
    if cfg.outputs.write_plots:
        import matplotlib

        matplotlib.use("Agg")
        matplotlib.rcParams["svg.hashsalt"] = "morphring"
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 4.5))
        for row in result.rows:
            if row.deflection is None:
                continue
            ax.plot(
                result.times,
                row.deflection,
                label=f"b'={row.amplitude:g}, g={row.sharpness:g}",
                linewidth=1.0,
            )
        ax.set_xlabel("time (s)")
        ax.set_ylabel("lateral deflection vs baseline (m)")
        ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        path = out / "deflections.svg"
        fig.savefig(path, metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written


def _write_plots(traj: Trajectory, cfg: ScenarioConfig, out: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "morphring"
    import matplotlib.pyplot as plt

    written = []

    fig, ax = plt.subplots(figsize=(6, 5))
    ax.plot(traj.states[:, 6], traj.states[:, 7], linewidth=1.2)
    ax.set_xlabel("contact x (m)")
    ax.set_ylabel("contact y (m)")
    ax.set_title("center-of-mass ground path")
    ax.axis("equal")
    fig.tight_layout()
    p = out / "com_path.svg"
    fig.savefig(p, metadata={"Date": None})
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(traj.times, traj.states[:, 3], linewidth=1.2)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("heading (rad)")
    ax.set_title("heading response")
    fig.tight_layout()
    p = out / "heading_vs_time.svg"
    fig.savefig(p, metadata={"Date": None})
    plt.close(fig)
    written.append(p)

    # inertia components against the driven semi-axis, at this perimeter
    from .geometry import inertia_triple, solve_axis_for_perimeter

    P = cfg.ring.perimeter
    bs = np.linspace(0.02 * P, 0.24 * P, 60)
    ys = np.empty((bs.size, 3))
    for i, b in enumerate(bs):
        a = solve_axis_for_perimeter(P, float(b), cfg.ring.quad_points)
        t = inertia_triple(a, float(b), cfg.ring)
        ys[i] = (t.y1, t.y2, t.y3)
    fig, ax = plt.subplots(figsize=(7, 4))
    for k, label in enumerate(["y1", "y2", "y3"]):
        ax.plot(bs, ys[:, k], label=label, linewidth=1.2)
    ax.set_xlabel("semi-axis b (m)")
    ax.set_ylabel("inertia (kg m^2)")
    ax.set_title("inertia triple vs b at fixed perimeter")
    ax.legend()
    fig.tight_layout()
    p = out / "inertia_vs_b.svg"
    fig.savefig(p, metadata={"Date": None})
    plt.close(fig)
    written.append(p)
    return written


# ---------------------------------------------------------------------------
# config serialization


def config_to_dict(cfg: ScenarioConfig) -> dict:
    d: dict = {
        "duration": float(cfg.duration),
        "slope_model": cfg.slope_model.value,
        "output_hz": float(cfg.output_hz),
        "ring": {
            "mass": float(cfg.ring.mass),
            "perimeter": float(cfg.ring.perimeter),
            "gravity": float(cfg.ring.gravity),
            "incline": float(cfg.ring.incline),
            "quad_points": int(cfg.ring.quad_points),
            "radius_policy": cfg.ring.radius_policy.value,
        },
        "initial": {
            "heading": float(cfg.initial.heading),
            "lean": float(cfg.initial.lean),
            "spin": float(cfg.initial.spin),
            "heading_rate": float(cfg.initial.heading_rate),
            "lean_rate": float(cfg.initial.lean_rate),
            "spin_rate": float(cfg.initial.spin_rate),
            "contact_x": float(cfg.initial.contact_x),
            "contact_y": float(cfg.initial.contact_y),
        },
        "integrator": {
            "rel_tol": float(cfg.integrator.rel_tol),
            "abs_tol": float(cfg.integrator.abs_tol),
            # the unbounded default serializes as a string so the manifest
            # stays strict JSON; float("inf") reads it back
            "max_step": (
                float(cfg.integrator.max_step)
                if math.isfinite(cfg.integrator.max_step)
                else "inf"
            ),
            "dense_output": bool(cfg.integrator.dense_output),
        },
        "outputs": {
            "out_dir": cfg.outputs.out_dir,
            "write_csv": cfg.outputs.write_csv,
            "write_plots": cfg.outputs.write_plots,
            "write_manifest": cfg.outputs.write_manifest,
        },
    }
    if cfg.impulse is not None:
        d["impulse"] = {
            "amplitude": float(cfg.impulse.amplitude),
            "center_time": float(cfg.impulse.center_time),
            "sharpness": float(cfg.impulse.sharpness),
            "baseline": float(cfg.impulse.baseline),
        }
    return d


def _take(section: dict, name: str, keys: dict) -> dict:
    """Pop known keys with defaults; reject unknown ones."""
    unknown = set(section) - set(keys)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    out = {}
    for k, (conv, default) in keys.items():
        if k in section:
            try:
                out[k] = conv(section[k])
            except (TypeError, ValueError) as e:
                raise ConfigError(f"bad value for {name}.{k}: {e}") from e
        elif default is not None:
            out[k] = default
        else:
            raise ConfigError(f"missing required key {name}.{k}")
    return out


def config_from_dict(d: dict) -> ScenarioConfig:
    d = dict(d)
    known_top = {
        "duration",
        "slope_model",
        "output_hz",
        "ring",
        "initial",
        "integrator",
        "outputs",
        "impulse",
        "sweep",
        "steer",
        "inertia_table",
    }
    unknown = set(d) - known_top
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    try:
        ring = RingParams(
            **_take(
                d.get("ring", {}),
                "ring",
                {
                    "mass": (float, None),
                    "perimeter": (float, None),
                    "gravity": (float, 9.81),
                    "incline": (float, 0.0),
                    "quad_points": (int, 512),
                    "radius_policy": (RadiusPolicy, RadiusPolicy.SUPPORT_FUNCTION),
                },
            )
        )
        initial = TumbleState(
            **_take(
                d.get("initial", {}),
                "initial",
                {
                    "heading": (float, 0.0),
                    "lean": (float, math.pi / 2),
                    "spin": (float, 0.0),
                    "heading_rate": (float, 0.0),
                    "lean_rate": (float, 0.0),
                    "spin_rate": (float, 0.0),
                    "contact_x": (float, 0.0),
                    "contact_y": (float, 0.0),
                },
            )
        )
        impulse = None
        if "impulse" in d:
            impulse = ImpulseInput(
                **_take(
                    d["impulse"],
                    "impulse",
                    {
                        "amplitude": (float, None),
                        "center_time": (float, None),
                        "sharpness": (float, None),
                        "baseline": (float, None),
                    },
                )
            )
        integrator = IntegratorConfig(
            **_take(
                d.get("integrator", {}),
                "integrator",
                {
                    "rel_tol": (float, 1e-8),
                    "abs_tol": (float, 1e-10),
                    "max_step": (float, math.inf),
                    "dense_output": (bool, False),
                },
            )
        )
        outputs = OutputConfig(
            **_take(
                d.get("outputs", {}),
                "outputs",
                {
                    "out_dir": (str, "runs"),
                    "write_csv": (bool, True),
                    "write_plots": (bool, True),
                    "write_manifest": (bool, True),
                },
            )
        )
        if "duration" not in d:
            raise ConfigError("missing required key: duration")
        return ScenarioConfig(
            ring=ring,
            initial=initial,
            impulse=impulse,
            duration=float(d["duration"]),
            integrator=integrator,
            slope_model=SlopeModel(d.get("slope_model", "extended")),
            outputs=outputs,
            output_hz=float(d.get("output_hz", 200.0)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid configuration: {e}") from e
    except MorphringError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def _toml_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        r = repr(v)
        return r if any(c in r for c in ".eE") else r + ".0"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__} to TOML")


def _dict_to_toml(d: dict) -> str:
    lines = []
    tables = []
    for k, v in d.items():
        if isinstance(v, dict):
            tables.append((k, v))
        else:
            lines.append(f"{k} = {_toml_scalar(v)}")
    for name, table in tables:
        lines.append("")
        lines.append(f"[{name}]")
        for k, v in table.items():
            if isinstance(v, dict):
                raise TypeError("nested tables beyond one level are not supported")
            lines.append(f"{k} = {_toml_scalar(v)}")
    return "\n".join(lines) + "\n"


def config_to_toml(cfg: ScenarioConfig) -> str:
    return _dict_to_toml(config_to_dict(cfg))


def config_from_toml(text: str) -> ScenarioConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"TOML parse error: {e}") from e
    return config_from_dict(data)


def sweep_from_toml(text: str) -> SweepSpec:
    """Sweep spec: a scenario config plus a [sweep] table with the grids."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"TOML parse error: {e}") from e
    if "sweep" not in data:
        raise ConfigError("sweep config needs a [sweep] table")
    sw = _take(
        data["sweep"],
        "sweep",
        {
            "amplitudes": (lambda v: tuple(float(x) for x in v), None),
            "sharpnesses": (lambda v: tuple(float(x) for x in v), None),
        },
    )
    base = config_from_dict(data)
    try:
        return SweepSpec(amplitudes=sw["amplitudes"], sharpnesses=sw["sharpnesses"], base=base)
    except ValueError as e:
        raise ConfigError(str(e)) from e


# ---------------------------------------------------------------------------
# self-check battery


def seed_check() -> list[tuple[str, bool, str]]:
    """Fast invariant battery run before CLI work when requested.

    Returns (name, passed, detail) rows; all should pass on a healthy
    install in well under a second.
    """
    from .geometry import (
        ellipse_perimeter,
        impulse_b,
        inertia_triple,
        posture_from_axes,
        posture_rhs,
        solve_axis_for_perimeter,
    )
    from .tumbling import mechanical_energy, tumble_rhs

    checks: list[tuple[str, bool, str]] = []

    R = 1.0 / math.pi
    params = RingParams(mass=1.0, perimeter=2.0)
    y = inertia_triple(R, R, params)
    ok = (
        abs(y.y2 - params.mass * R * R) < 1e-10
        and abs(y.y1 - 0.5 * params.mass * R * R) < 1e-10
    )
    checks.append(("circle inertia closed form", ok, f"y=({y.y1:.6g},{y.y2:.6g},{y.y3:.6g})"))

    a = solve_axis_for_perimeter(2.0, 0.25)
    p = ellipse_perimeter(a, 0.25)
    checks.append(("perimeter round trip", abs(p - 2.0) < 1e-9, f"residual {p - 2.0:.2e}"))

    imp = ImpulseInput(amplitude=0.3, center_time=2.0, sharpness=10.0, baseline=0.3)
    peak = impulse_b(2.0, imp)
    sym = abs(impulse_b(2.7, imp) - impulse_b(1.3, imp))
    checks.append(
        ("impulse peak and symmetry", abs(peak - 0.6) < 1e-12 and sym < 1e-12, f"peak {peak:.6g}")
    )

    x = np.array([0.3, -0.2, 5.0, 0.7, 1.2, 0.4, 0.1, -0.3])
    dx = tumble_rhs(x, y, params, R)
    checks.append(("tumble rhs finite", bool(np.all(np.isfinite(dx))), ""))

    rest = np.array([0.0, 0.0, 0.0, 0.0, math.pi / 2, 0.0, 0.0, 0.0])
    dr = tumble_rhs(rest, y, params, R)
    checks.append(
        ("upright rest equilibrium", float(np.max(np.abs(dr))) < 1e-14, f"max {np.max(np.abs(dr)):.2e}")
    )

    xi = posture_from_axes(0.4, 0.22)
    d = posture_rhs(xi, (0.01, -0.01))
    res = (
        xi.xi1 * d[0] / xi.xi5**2
        + xi.xi2 * d[1] / xi.xi6**2
        - xi.xi1**2 * d[4] / xi.xi5**3
        - xi.xi2**2 * d[5] / xi.xi6**3
    )
    checks.append(("posture constraint residual", abs(res) < 1e-10, f"{res:.2e}"))

    e = mechanical_energy(rest, y, params, R)
    checks.append(
        ("rest energy m g R", abs(e - params.mass * 9.81 * R) < 1e-12, f"E={e:.6g}")
    )
    return checks
