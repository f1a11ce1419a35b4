class BivarfunError(Exception):
    """Base class of every error raised by bivarfun."""


class ArgumentError(BivarfunError, ValueError):
    pass


class ContractError(ArgumentError):
    pass


class DerivativeRequiredError(ArgumentError):
    pass


class FactorizationError(BivarfunError, ArithmeticError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class SingularityError(BivarfunError, ArithmeticError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class PerturbationError(SingularityError):
    pass


class ConsistencyError(BivarfunError, RuntimeError):
    pass


class AnalyticityError(BivarfunError, ArithmeticError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConvergenceError(BivarfunError, ArithmeticError):
    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class PrecisionLimitError(BivarfunError, ArithmeticError):
    pass
