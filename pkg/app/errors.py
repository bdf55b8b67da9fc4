# app/errors.py
"""Exception hierarchy shared by the library modules and the CLI."""


class BenfordError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BenfordError, ValueError):
    """An argument lies outside the domain of an operation."""


class DigitParseError(DomainError):
    """A digit string could not be parsed in the requested base."""


class UndefinedRatioError(BenfordError):
    """A density ratio was requested before any term was accumulated."""


class EmptyWindowError(BenfordError):
    """A window I_n contains no index of the sequence."""


class UnsupportedDiscriminantError(DomainError):
    """Only the discriminants -4 and -3 are shipped."""


class BadPrimeError(DomainError):
    """The prime divides the level of the curve."""


class OracleLimitError(DomainError):
    """The brute-force oracle refuses primes above its ceiling."""


class IntegrityError(BenfordError):
    """Computed data contradicts a theorem it must satisfy."""


class HasseBoundError(IntegrityError):
    """|a_p| exceeded 2 p^((k-1)/2)."""


class OracleMismatchError(IntegrityError):
    """A Frobenius trace disagrees with the point-counting oracle."""
