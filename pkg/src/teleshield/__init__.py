"""Delay-adaptive safe teleoperation.

A receding-horizon velocity controller keeps a remote robot out of obstacle
keep-out regions while following operator commands over a delayed network
link.  The obstacle margin grows with the measured round-trip time, so the
same controller stays safe when the link degrades.
"""

from .barrier import BarrierParams, barrier_gradient, barrier_value, dcbf_residual
from .channel import (
    ConstantDelay,
    DelayChannel,
    GaussianDelay,
    NoDelay,
    TraceDelay,
    UniformDelay,
    load_trace,
    parse_delay_spec,
)
from .core import (
    InputLimits,
    Obstacle,
    RobotState,
    SafetyParams,
    VelocityCommand,
    circumscribed_radius,
    clamp_input,
    clamp_norm,
    vec3,
)
from .harness import run_matrix, run_task
from .loop import ClosedLoop, RunConfig, RunResult, default_safety
from .mpc import (
    MpcConfig,
    MpcController,
    MpcProblem,
    MpcSolution,
    build_reference,
    first_input,
    predict_state,
    shifted_warm_start,
)
from .plant import ForcePidPlant, IdealPlant
from .rtt import RttSample, RttStats, RttWindow, safety_margin
from .tasks import TaskSpec, format_task, generate_task, parse_task
from .tester import TaskScript, TesterConfig, advance, desired_velocity

__version__ = "0.1.0"
