"""Exception hierarchy shared across the package."""


class RirError(Exception):
    """Base class for every error raised by hybridrir."""


class InvalidParameterError(RirError, ValueError):
    """A scalar parameter is outside its admissible range."""


class DegenerateGeometryError(RirError, ValueError):
    """Positions coincide or a direction vector has zero length."""


class InfeasibleRoomError(RirError):
    """The requested T60 cannot be realized in the given room."""


class InfeasibleDrrError(RirError):
    """The target DRR cannot be reached by scaling the stochastic/direct part.

    Attributes
    ----------
    requested : float
        Requested direct-to-reverberant ratio.
    attainable : float
        The bound that limited the solve, e.g. the DRR of the geometric part
        alone.
    """

    def __init__(self, requested, attainable, message=None):
        self.requested = float(requested)
        self.attainable = float(attainable)
        if message is None:
            message = (f"target DRR {self.requested:.6g} is not attainable "
                       f"(bound {self.attainable:.6g})")
        super().__init__(message)


class AnechoicInputError(RirError, ValueError):
    """The response carries no energy outside the direct-path window."""


class EstimationError(RirError):
    """Decay-time estimation failed, usually for lack of dynamic range."""


class SamplerError(RirError):
    """Scene sampling gave up after its retry budget."""


class SignalError(RirError, ValueError):
    """Audio input cannot be used, e.g. silent clip or sample-rate mismatch."""


class ConfigError(RirError, ValueError):
    """Configuration file violates its schema.

    ``path`` names the offending field, e.g. ``sampler.t60``.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
