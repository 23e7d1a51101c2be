"""Exception hierarchy.

Every numerical failure the engine can signal derives from
:class:`NumericalError`; the CLI turns these into structured error records.
``kind`` is the stable identifier written into result bundles.
"""


class NHDynError(Exception):
    kind = "error"


class ConfigError(NHDynError, ValueError):
    kind = "config"


class NumericalError(NHDynError, ArithmeticError):
    kind = "numerical"


class ExpmOverflowError(NumericalError, OverflowError):
    kind = "expm-overflow"


class EigenConvergenceError(NumericalError):
    kind = "eig-nonconvergence"


class DefectiveMatrixError(NumericalError):
    """Raised at (or numerically near) an exceptional point."""

    kind = "ep-defective"

    def __init__(self, message, cluster=None):
        super().__init__(message)
        self.cluster = cluster


class VanishingNormError(NumericalError):
    kind = "vanishing-norm"

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class StepSizeUnderflowError(NumericalError):
    kind = "step-underflow"

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class AmbiguousRegimeError(NumericalError):
    kind = "ambiguous-regime"


class NonUniqueSteadyStateError(NumericalError):
    kind = "nonunique-steady-state"


class ZeroGapError(NumericalError):
    kind = "zero-gap"


class InsufficientOscillationsError(NumericalError):
    kind = "insufficient-oscillations"


class NoDecayError(NumericalError):
    kind = "no-decay"


class WindowTooShortError(NumericalError):
    kind = "window-too-short"
