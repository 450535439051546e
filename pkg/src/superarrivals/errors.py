"""Exception hierarchy shared by the simulator and the analysis tools."""


class SuperarrivalsError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SuperarrivalsError, ValueError):
    """Invalid or unparseable simulation configuration."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ScheduleError(SuperarrivalsError, ValueError):
    """Invalid barrier switch-off schedule."""


class NumericalBreakdown(SuperarrivalsError, ArithmeticError):
    """A linear solve or a time step could not be completed."""

    def __init__(self, message, step=None):
        self.step = step
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)


class NotAsymptoticError(SuperarrivalsError):
    """The reflection trace has not flattened out by the end of the run."""


class DetectionError(SuperarrivalsError):
    """Base class for failures while extracting times from a trace pair."""


class NoDeviationError(DetectionError):
    pass


class NoCrossingError(DetectionError):
    pass


class DegenerateWindowError(DetectionError):
    pass


class AcausalInputError(DetectionError, ValueError):
    pass
