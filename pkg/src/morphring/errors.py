"""Exception types shared across the toolkit.

Every failure mode that callers are expected to branch on gets its own
class here; modules never raise bare ValueError for domain conditions.
"""

from __future__ import annotations


class MorphringError(Exception):
    """Base class for all toolkit errors."""


class InfeasibleGeometryError(MorphringError):
    """No ellipse with the requested perimeter/axis combination exists."""


class PostureSingularityError(MorphringError):
    """The posture state-space matrix is numerically singular.

    Carries the condition number estimate that triggered the abort.
    """

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class FlatRingError(MorphringError):
    """Tumbling dynamics evaluated too close to the flat-ring singularity.

    The mass matrix loses rank as sin(lean) -> 0; integration must stop
    rather than push through. ``lean`` is the offending angle in radians.
    """

    def __init__(self, lean: float):
        super().__init__(
            f"mass matrix singular: |sin(lean)| too small at lean={lean:.6g} rad"
        )
        self.lean = lean


class StepUnderflowError(MorphringError):
    """Adaptive step size collapsed below the hard floor (stiffness guard).

    ``time`` is where the integrator gave up, ``state`` the last accepted
    sample (copied).
    """

    def __init__(self, time: float, state, step: float):
        super().__init__(
            f"step size underflow ({step:.3e} s) at t={time:.6g} s; "
            "problem is stiff or singular at this state"
        )
        self.time = time
        self.state = state
        self.step = step


class UnrealizableInertiaError(MorphringError):
    """No axis pair at the fixed perimeter attains the requested inertia.

    ``residual`` is the smallest attainable mismatch found while searching.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DefectEvaluationError(MorphringError):
    """Dynamics evaluation failed while assembling collocation defects.

    ``interval`` is the zero-based collocation interval being assembled
    when the underlying dynamics raised.
    """

    def __init__(self, interval: int, cause: Exception):
        super().__init__(f"dynamics failed on collocation interval {interval}: {cause}")
        self.interval = interval


class SimulationError(MorphringError):
    """A scenario run failed mid-integration.

    Wraps the underlying cause and records the failure time and the last
    accepted state snapshot for the run manifest.
    """

    def __init__(self, message: str, time: float | None = None, state=None):
        super().__init__(message)
        self.time = time
        self.state = state


class ConfigError(MorphringError):
    """A scenario configuration file is malformed or inconsistent."""
