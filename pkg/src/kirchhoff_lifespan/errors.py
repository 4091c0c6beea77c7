"""Exception hierarchy shared by all modules."""


class KirchhoffError(ValueError):
    """Base class for every error raised by this package."""


class WeightOverflowError(KirchhoffError):
    def __init__(self, index: int, radius: float):
        self.index = index
        self.radius = radius
        super().__init__(f"weight overflow at shell {index} (radius={radius!r})")


class InvalidGridError(KirchhoffError):
    pass


class InvalidProfileError(KirchhoffError):
    pass


class DomainError(KirchhoffError):
    pass


class TrivialDataError(KirchhoffError):
    pass


class EtaBelowThresholdError(KirchhoffError):
    """The Gevrey lower bound requires ``eta > 2 M / nu0``."""


class EtaInadmissibleError(KirchhoffError):
    pass


class HorizonMismatchError(KirchhoffError):
    pass


class StepTooLargeError(KirchhoffError):
    """Raised instead of integrating with an under-resolved time step."""


class NumericalDivergenceError(KirchhoffError):
    def __init__(self, t: float):
        self.t = t
        super().__init__(f"numerical divergence at t={t!r}")


class ConfigError(KirchhoffError):
    pass
