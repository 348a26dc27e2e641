class HittingTimeError(Exception):
    pass


class DomainError(HittingTimeError, ValueError):
    """A precondition of an operation does not hold."""


class NearIntegerParameterError(DomainError):
    def __init__(self, b):
        super().__init__(
            f"second Kummer parameter {b} is within 1e-6 of an integer")
        self.b = b


class EmptySampleError(DomainError):
    def __init__(self, label=""):
        super().__init__(
            f"sample set {label} is empty" if label else "sample set is empty")
        self.label = label


class NumericalError(HittingTimeError, ArithmeticError):
    pass


class NonFiniteValueError(NumericalError):
    pass


class ToleranceNotMetError(NumericalError):
    def __init__(self, estimate, error, requested):
        super().__init__(
            f"quadrature error {error:.3e} exceeds requested {requested:.3e}"
            f" (best estimate {estimate})")
        self.estimate = estimate
        self.error = error
        self.requested = requested


class TruncationError(NumericalError):
    def __init__(self, bound, tolerance):
        super().__init__(
            f"contour tail bound {bound:.3e} exceeds "
            f"tolerance {tolerance:.3e}")
        self.bound = bound
        self.tolerance = tolerance


class NormalizationError(NumericalError):
    def __init__(self, mass):
        super().__init__(f"inverted density has total mass {mass:.6f}")
        self.mass = mass
