"""Exception types raised across the package."""


class NdeVoiError(Exception):
    """Base class for all package errors."""


class NonConvergence(NdeVoiError):
    """Adaptive quadrature ran out of its subdivision budget."""


class NonFiniteIntegrand(NdeVoiError):
    """The integrand returned NaN or an infinity at an interior node."""


class NonFiniteObjective(NdeVoiError):
    """A scalar objective returned NaN or an infinity."""


class DegenerateDesign(NdeVoiError):
    """The experimental design puts (numerically) no mass on one side of x_th."""


class ZeroEvidence(NdeVoiError):
    """The observation has zero marginal probability under the prior."""


class ConfigError(NdeVoiError):
    """A scenario configuration is malformed; the message names the field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnknownScenario(NdeVoiError):
    """No builtin scenario with the requested name."""
