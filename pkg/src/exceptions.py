"""
Laboratory Errors

Every precondition failure raised by the algebra, analysis and experiment
layers derives from :class:`LabError`, which is a ``ValueError`` so callers
that only care about bad input can catch the builtin.
"""
from typing import Optional


class LabError(ValueError):
    """Base class for all laboratory errors."""


class NotPrime(LabError):
    """Characteristic is not a prime number."""


class EvenCharacteristic(LabError):
    """Characteristic 2 has no element 1/2."""


class ReducibleModulus(LabError):
    """Extension modulus factors over the prime field."""


class BadField(LabError):
    """Field order is not an odd prime power (or not prime where required)."""


class DivisionByZero(LabError, ZeroDivisionError):
    """Inverse of the zero element requested."""


class ContextMismatch(LabError):
    """A value does not belong to the context it was passed with."""


class BadAxis(LabError):
    """Axis index outside 1..2n."""


class ZeroScalar(LabError):
    """Dilation by the zero scalar."""


class ArityMismatch(LabError):
    """Wrong number of functions for the multilinear form."""


class WrongDimension(LabError):
    """Operation only defined for a specific n."""


class BadExponent(LabError):
    """Exponent outside the admissible range."""


class EmptySet(LabError):
    """Operation requires a nonempty set."""


class BadRange(LabError):
    """Integer parameter outside its admissible range."""


class DimensionMismatch(LabError):
    """Subspace ambient dimension does not fit the group."""


class Unclassifiable(LabError):
    """Subgroup over a prime field matched neither structural type."""


class NotHomogeneous(LabError):
    """Subgroup is not invariant under dilations."""


class TooLarge(LabError):
    """Requested computation exceeds a capacity guard."""

    def __init__(self, what: str, cost: int, limit: Optional[int] = None):
        self.what = what
        self.cost = cost
        self.limit = limit
        msg = f"{what}: estimated cost {cost}"
        if limit is not None:
            msg += f" exceeds limit {limit}"
        super().__init__(msg)
