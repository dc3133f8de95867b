"""Exception types shared across the package."""


class ResourceError(RuntimeError):
    """A requested size exceeds a hard memory/compute bound."""


class NumericalError(ArithmeticError):
    """A quadrature, SVD or limit estimate missed its tolerance."""


class TruncationWarning(UserWarning):
    """A finite truncation was used beyond the range where it is exact."""
