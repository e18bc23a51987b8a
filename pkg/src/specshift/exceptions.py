"""Exception types shared across the package."""

__all__ = [
    "DimensionMismatchError",
    "NonHermitianError",
    "FunctionDomainError",
    "FunctionSpecError",
    "PreimageConsistencyError",
    "TailBoundError",
    "QuadratureWarning",
]


class DimensionMismatchError(ValueError):
    """Operands do not share a common square dimension."""


class NonHermitianError(ValueError):
    """Input matrix violates conjugate symmetry.

    Carries the worst-case violation ``max|M[i,j] - conj(M[j,i])|`` in
    ``violation`` so callers can report how far the input is from Hermitian.
    """

    def __init__(self, violation, threshold):
        self.violation = float(violation)
        self.threshold = float(threshold)
        super().__init__(
            f"matrix is not Hermitian: symmetry violation {self.violation:.3e} "
            f"exceeds threshold {self.threshold:.3e}"
        )


class FunctionDomainError(ValueError):
    """A sampled function was evaluated outside its tabulated range."""


class FunctionSpecError(ValueError):
    """A function-spec string failed to parse.

    ``position`` is the character index of the offending token and
    ``expected`` names what the parser was looking for there.
    """

    def __init__(self, spec, position, expected):
        self.spec = spec
        self.position = int(position)
        self.expected = expected
        super().__init__(
            f"parse error at index {self.position}: expected {expected} in {spec!r}"
        )


class PreimageConsistencyError(ValueError):
    """The right-hand side of a commutator equation has a kernel component."""


class TailBoundError(ValueError):
    """A Fourier transform carries too much weight beyond the truncation time."""


class QuadratureWarning(UserWarning):
    """Quadrature refinement stopped before reaching the requested tolerance."""
