"""Simulation and steering toolkit for a deformable ring tumbling downhill.

The model is a cascade: axis-rate controls morph an elliptical ring at
fixed perimeter, the shape sets a triple of mass moments, and the moments
drive nonholonomic rolling-contact dynamics on an inclined plane. The
package provides the geometry and quadrature layer, the tumbling
equations, a deterministic adaptive integrator, a direct-collocation
steering solver, and a scenario runner with a command-line front end.
"""

from ._version import __version__
from .errors import (
    ConfigError,
    DefectEvaluationError,
    FlatRingError,
    InfeasibleGeometryError,
    MorphringError,
    PostureSingularityError,
    SimulationError,
    StepUnderflowError,
    UnrealizableInertiaError,
)
from .geometry import (
    AxisSchedule,
    FrozenAxes,
    ImpulseAxisSchedule,
    ImpulseInput,
    InertiaTriple,
    PostureState,
    RadiusPolicy,
    RingParams,
    ellipse_perimeter,
    impulse_b,
    impulse_b_rate,
    inertia_triple,
    perimeter_gradient,
    posture_from_axes,
    posture_matrix,
    posture_rhs,
    solve_axis_for_perimeter,
)
from .tumbling import (
    LEAN_SINGULARITY_EPS,
    BodyRates,
    SlopeModel,
    TumbleState,
    body_angular_velocity,
    contact_radius,
    forcing_vector,
    mass_matrix,
    mechanical_energy,
    rotation_world_from_body,
    rotation_zxz,
    tumble_rhs,
)
from .integrators import (
    DenseOutput,
    Diagnostics,
    IntegratorConfig,
    Trajectory,
    TumbleCascade,
    integrate,
    integrate_cascade,
)
from .collocation import (
    CommandedAxes,
    DecisionVector,
    SlsqpBackend,
    SteeringProblem,
    SteeringReport,
    boundary_residuals,
    collocation_defects,
    inequality_bounds,
    inertia_to_axes,
    initial_guess,
    interpolate_output,
    interpolate_state,
    interpolate_state_derivative,
    reintegrate,
    solve_steering,
    steering_cost,
)
from .scenarios import (
    CSV_HEADER,
    OutputConfig,
    RunSummary,
    ScenarioConfig,
    SweepResult,
    SweepRow,
    SweepSpec,
    config_from_dict,
    config_from_toml,
    config_to_dict,
    config_to_toml,
    default_scenario,
    emit_outputs,
    emit_sweep_outputs,
    run_scenario,
    run_sweep,
    seed_check,
    sweep_from_toml,
    trajectory_csv,
)

__all__ = [
    "__version__",
    # errors
    "MorphringError",
    "InfeasibleGeometryError",
    "PostureSingularityError",
    "FlatRingError",
    "StepUnderflowError",
    "DefectEvaluationError",
    "UnrealizableInertiaError",
    "SimulationError",
    "ConfigError",
    # geometry
    "RadiusPolicy",
    "RingParams",
    "PostureState",
    "InertiaTriple",
    "ImpulseInput",
    "AxisSchedule",
    "FrozenAxes",
    "ImpulseAxisSchedule",
    "ellipse_perimeter",
    "perimeter_gradient",
    "solve_axis_for_perimeter",
    "inertia_triple",
    "posture_matrix",
    "posture_rhs",
    "posture_from_axes",
    "impulse_b",
    "impulse_b_rate",
    # tumbling
    "SlopeModel",
    "TumbleState",
    "BodyRates",
    "LEAN_SINGULARITY_EPS",
    "rotation_world_from_body",
    "rotation_zxz",
    "body_angular_velocity",
    "contact_radius",
    "mass_matrix",
    "forcing_vector",
    "tumble_rhs",
    "mechanical_energy",
    # integration
    "IntegratorConfig",
    "Diagnostics",
    "DenseOutput",
    "Trajectory",
    "integrate",
    "TumbleCascade",
    "integrate_cascade",
    # collocation
    "DecisionVector",
    "SteeringProblem",
    "SteeringReport",
    "SlsqpBackend",
    "interpolate_output",
    "interpolate_state",
    "interpolate_state_derivative",
    "collocation_defects",
    "boundary_residuals",
    "inequality_bounds",
    "steering_cost",
    "inertia_to_axes",
    "CommandedAxes",
    "initial_guess",
    "solve_steering",
    "reintegrate",
    # scenarios
    "CSV_HEADER",
    "OutputConfig",
    "ScenarioConfig",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "RunSummary",
    "default_scenario",
    "run_scenario",
    "run_sweep",
    "emit_outputs",
    "emit_sweep_outputs",
    "trajectory_csv",
    "config_to_dict",
    "config_from_dict",
    "config_to_toml",
    "config_from_toml",
    "sweep_from_toml",
    "seed_check",
]
