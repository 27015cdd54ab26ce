"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario configuration or call-level contract is invalid."""


class SimulationFault(RuntimeError):
    """The simulation produced a non-finite or otherwise unusable result."""


class SingularPlantError(SimulationFault):
    """|b(x)| fell below the invertibility guard; the control step is rejected."""


class GuardViolationError(SimulationFault):
    """A learning guard (e.g. the membership width floor) was violated."""


class LearningDivergedError(SimulationFault):
    """An adaptation rate became non-finite; the message names the parameter block."""


class VelocitySingularityError(RuntimeError):
    """Unicycle linear velocity is below the v_min guard, so omega is undefined.

    Recoverable: the scenario runner substitutes omega = 0 and flags the sample.
    """
