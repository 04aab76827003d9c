"""Exception hierarchy.

Every error carries the process exit code the CLI uses for it:
2 for bad configuration, 3 for solver failures, 4 for infeasibility or
capacity overflows.
"""


class SchedError(Exception):
    exit_code = 3


class ConfigError(SchedError):
    exit_code = 2


class DimensionError(ConfigError, ValueError):
    pass


class DomainError(SchedError, ValueError):
    pass


class RiccatiError(SchedError):
    pass


class UnstableSystemError(SchedError):
    """Raised by operations that require a stable system matrix."""


class UnstableAssumptionViolated(SchedError):
    """Raised by bound computations that require an unstable system matrix."""


class AbsentSensorError(SchedError, KeyError):
    def __init__(self, sensor, message=None):
        self.sensor = sensor
        super().__init__(message or f"sensor {sensor} never transmits in the schedule")

    def __str__(self):
        return self.args[0]


class InfiniteCostError(AbsentSensorError):
    pass


class ModelError(SchedError):
    pass


class NoConvergence(SchedError):
    pass


class NoCycleError(SchedError):
    pass


class CapacityError(SchedError):
    exit_code = 4


class BoundSearchOverflow(CapacityError):
    pass


class StateSpaceOverflow(CapacityError):
    pass


class WindowOverflow(CapacityError):
    pass


class EnumerationOverflow(CapacityError, OverflowError):
    pass


class InfeasibleError(SchedError):
    exit_code = 4
