"""Exception types raised across the package."""


class IsoMomentError(Exception):
    """Base class for all package errors."""


class ValidationError(IsoMomentError, ValueError):
    """An input body or configuration failed validation."""


class NotConvex(ValidationError):
    def __init__(self, min_slack, worst_direction):
        self.min_slack = float(min_slack)
        self.worst_direction = worst_direction
        super().__init__(
            f"convexity violated: min slack {self.min_slack:.6g} at direction {worst_direction}"
        )


class NonPositiveSupport(ValidationError):
    def __init__(self, direction, value):
        self.direction = direction
        self.value = float(value)
        super().__init__(
            f"support function {self.value:.6g} <= 0 at direction {direction}; "
            "origin is not interior"
        )


class AliasingSuspected(IsoMomentError):
    def __init__(self, fraction):
        self.fraction = float(fraction)
        super().__init__(f"energy fraction {self.fraction:.3g} beyond the resolved band")


class ZeroMeanViolated(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class MethodMismatch(IsoMomentError):
    def __init__(self, a, b):
        self.a, self.b = float(a), float(b)
        super().__init__(f"quadrature route {a!r} and spectral route {b!r} disagree")


class NonConverged(IsoMomentError):
    def __init__(self, best_value, gap):
        self.best_value, self.gap = float(best_value), float(gap)
        super().__init__(f"not converged: best value {best_value:.12g}, gap bound {gap:.3g}")


class OpenCurve(ValidationError):
    pass


class SelfIntersection(ValidationError):
    pass


class PerturbationTooLarge(ValidationError):
    pass


class GenerationFailed(IsoMomentError):
    pass


class PoorFit(IsoMomentError):
    def __init__(self, result):
        self.result = result
        super().__init__(f"fit R^2 = {result.r2:.6f} below threshold")


class Stalled(IsoMomentError):
    def __init__(self, last_slack):
        self.last_slack = float(last_slack)
        super().__init__(f"convexity projection cancelled progress; last slack {last_slack:.3g}")


class UnknownExample(IsoMomentError, KeyError):
    pass
