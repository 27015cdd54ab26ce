"""Closed-loop error learning control (CLELC).

A feedback-linearization controller runs in parallel with a zeroth-order
Takagi-Sugeno-Kang fuzzy network whose parameters adapt through a
sliding-mode law driven by the closed-loop error dynamics.  The learned term
gradually takes over from the feedback term and supplies robustness against
disturbances the nominal model does not know about.

The package ships two simulation scenarios (a third-order chain benchmark and
a unicycle robot tracking analytic trajectories), post-hoc metrics, and the
`sim` command-line interface.
"""

from .analysis import Metrics, compare, compute_metrics, finite_time_bound
from .config import ScenarioConfig, default_benchmark_config, default_robot_config, load_config
from .control import (
    B_MIN_DEFAULT,
    ControlDecomposition,
    ReferenceSignal,
    clelc_law,
    feedback_control,
    feedforward_control,
    flc_law,
    tracking_errors,
    zero_reference,
)
from .errors import (
    ConfigError,
    GuardViolationError,
    LearningDivergedError,
    SimulationFault,
    SingularPlantError,
    VelocitySingularityError,
)
from .fuzzy import (
    SIGMA_MIN_DEFAULT,
    FiringState,
    NeuroFuzzyParams,
    firing_strengths,
    grid_params,
    membership,
    output,
    rule_grid,
)
from .learning import (
    LearningConfig,
    center_rate,
    consequent_rates,
    learning_step,
    width_rate,
)
from .plant import (
    PlantModel,
    SimLog,
    benchmark_plant,
    disturbance_profile,
    dynamics,
    integrate_step,
)
from .robot import (
    RobotCommand,
    RobotSimulator,
    RobotState,
    TrajectoryPoint,
    clelc_robot_law,
    feedback_linearize,
    feedforward_velocities,
    heading_reference,
    linearized_state,
    slip_disturbance,
    trajectory_library,
    unicycle_dynamics,
    wrap_angle,
)
from .runner import run_chain_scenario, run_robot_scenario, run_scenario
from .surface import (
    DELTA_DEFAULT,
    GainVector,
    SlidingSurfaceSpec,
    gain_vector,
    sliding_value,
    smoothed_sign,
)

__version__ = "0.1.0"

__all__ = [
    "B_MIN_DEFAULT",
    "ConfigError",
    "ControlDecomposition",
    "DELTA_DEFAULT",
    "FiringState",
    "GainVector",
    "GuardViolationError",
    "LearningConfig",
    "LearningDivergedError",
    "Metrics",
    "NeuroFuzzyParams",
    "PlantModel",
    "ReferenceSignal",
    "RobotCommand",
    "RobotSimulator",
    "RobotState",
    "SIGMA_MIN_DEFAULT",
    "ScenarioConfig",
    "SimLog",
    "SimulationFault",
    "SingularPlantError",
    "SlidingSurfaceSpec",
    "TrajectoryPoint",
    "VelocitySingularityError",
    "benchmark_plant",
    "center_rate",
    "clelc_law",
    "clelc_robot_law",
    "compare",
    "compute_metrics",
    "consequent_rates",
    "default_benchmark_config",
    "default_robot_config",
    "disturbance_profile",
    "dynamics",
    "feedback_control",
    "feedback_linearize",
    "feedforward_control",
    "feedforward_velocities",
    "finite_time_bound",
    "firing_strengths",
    "flc_law",
    "gain_vector",
    "grid_params",
    "heading_reference",
    "integrate_step",
    "learning_step",
    "linearized_state",
    "load_config",
    "membership",
    "output",
    "rule_grid",
    "run_chain_scenario",
    "run_robot_scenario",
    "run_scenario",
    "slip_disturbance",
    "sliding_value",
    "smoothed_sign",
    "tracking_errors",
    "trajectory_library",
    "unicycle_dynamics",
    "width_rate",
    "wrap_angle",
    "zero_reference",
]
