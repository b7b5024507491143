"""Exception hierarchy shared by all modules.

Categories map onto the CLI exit codes: "validation" -> 2,
"calibration" -> 3, "numerical" -> 4.
"""


class SimulationError(Exception):
    category = "numerical"


class ValidationError(SimulationError):
    """Bad input values (non-finite, out of range, malformed config)."""

    category = "validation"


class UsageError(ValidationError):
    """Caller misuse (empty cascade list, sweep without S-data)."""


class ConfigError(ValidationError):
    """Config-file problem; carries the offending field path."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message)


class CalibrationError(SimulationError):
    """A calibration target could not be reached inside its bracket."""

    category = "calibration"


class SingularityError(SimulationError):
    """Exact network resonance (zero denominator) at a sampled frequency."""

    category = "numerical"


class AmbiguousResonanceError(SimulationError):
    """No clear single resonance peak in the linewidth search window."""

    category = "numerical"


class PassivityError(SimulationError):
    """Negative real admittance: signals an upstream network bug."""

    category = "numerical"
