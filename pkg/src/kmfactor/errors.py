"""Exception types shared across the package.

Every error that the library raises deliberately derives from
:class:`KmError`, so callers (in particular the CLI) can distinguish
domain failures from programming errors.
"""

from __future__ import annotations


class KmError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrix(KmError):
    """Matrix input is malformed (wrong types, empty, ragged rows)."""


class NonSquare(InvalidMatrix):
    """Matrix input is not square."""


class AxiomViolation(KmError):
    """A generalized Cartan matrix axiom fails at a specific entry.

    ``axiom`` is one of ``"R1"``, ``"R2"``, ``"R3"``; ``row`` and ``col``
    are 1-based positions of the offending entry.
    """

    def __init__(self, axiom: str, row: int, col: int, detail: str = ""):
        self.axiom = axiom
        self.row = row
        self.col = col
        msg = f"axiom {axiom} fails at entry ({row}, {col})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class IndexOutOfRange(KmError, IndexError):
    """A simple-root index lies outside 0..size-1."""


class DimensionMismatch(KmError, ValueError):
    """A coordinate vector has the wrong length."""


class CapacityExceeded(KmError):
    """An enumeration would exceed its configured entry cap."""


class RootTableTooShallow(KmError):
    """A required root exceeds the height bound of the available table."""


class LengthBoundTooSmall(KmError):
    """A finite parabolic subgroup did not close within the length bound."""


class InsufficientData(KmError):
    """Not enough coefficients to run an estimator."""


class NotAUnit(KmError):
    """Series inversion requested for a non-invertible series."""


class TruncationMismatch(KmError):
    """Binary series operation on operands with different truncations."""


class NotStabilized(KmError):
    """A series coefficient was still moving at the largest length shell.

    ``exponent`` names the offending monomial, ``length_bound`` the bound
    that proved insufficient.
    """

    def __init__(self, exponent: tuple[int, ...], length_bound: int):
        self.exponent = exponent
        self.length_bound = length_bound
        super().__init__(
            f"coefficient of exponent {exponent} not stable within "
            f"length bound {length_bound}"
        )


class NotWFinite(KmError):
    """The parabolic subgroup for the given subset is infinite."""


class DomainError(KmError):
    """Evaluation point lies outside the admissible domain."""


class TBeyondRadius(DomainError):
    """|t| is not safely below the estimated radius of convergence."""


class DenominatorNearZero(KmError):
    """A denominator came within the configured guard of zero."""


class OutsideOmega(DomainError):
    """The imaginary part is not in the interior of the Tits cone."""
