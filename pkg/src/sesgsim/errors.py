"""Exception types shared across the package.

The split matters for the command line tool: configuration and parameter
problems are user errors (exit code 1), numerical blow-up of a run that was
not expected to diverge is a runtime failure (exit code 2).
"""


class SimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SimError):
    """Invalid or inconsistent run configuration.

    Carries a list of violations, each naming the offending field path.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ParameterError(SimError):
    """Machine parameters violate a physical relation, named in the message."""


class FitError(SimError):
    """Anchor points do not describe a saturating magnetisation curve."""


class SaturationRangeError(SimError):
    """Flux magnitude at or beyond the Froelich asymptote 1/b.

    The hyperbolic curve cannot represent such a point; reaching it in a run
    signals numerical blow-up.
    """


class NumericalError(SimError):
    """Non-finite value produced during integration.

    ``state`` holds the offending state vector, ``stage`` the integration
    substage index when applicable.
    """

    def __init__(self, message, state=None, stage=None):
        super().__init__(message)
        self.state = state
        self.stage = stage
