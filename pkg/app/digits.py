# app/digits.py
"""Leading digit strings, exact and scaled term values, and the Benford oracle.

A nonzero real x begins with the base-b string S when
S * b**t <= |x| < (S + 1) * b**t for some integer t.  Exact integers are
tested by base-b digit extraction; scaled floats compare the fractional
part of log_b|x| with [log_b S, log_b (S + 1)) and flag values that land
within a relative 1e-12 of either end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DigitParseError, DomainError

MIN_BASE = 2
MAX_BASE = 64
BOUNDARY_GUARD = 1e-12

ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ+/"


def _check_base(base):
    if isinstance(base, bool) or not isinstance(base, int) or not MIN_BASE <= base <= MAX_BASE:
        raise DigitParseError(f"base must be an integer in [{MIN_BASE}, {MAX_BASE}], got {base!r}")


@dataclass(frozen=True)
class DigitString:
    base: int
    digits: tuple[int, ...]
    value: int = field(init=False, compare=False)

    def __post_init__(self):
        _check_base(self.base)
        digits = tuple(self.digits)
        if not digits:
            raise DigitParseError("digit string is empty")
        if digits[0] == 0:
            raise DigitParseError("leading digit must be nonzero")
        if any(d < 0 or d >= self.base for d in digits):
            raise DigitParseError(f"digit out of range for base {self.base}: {digits}")
        value = 0
        for d in digits:
            value = value * self.base + d
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "value", value)

    @property
    def length(self):
        return len(self.digits)

    @property
    def log_window(self):
        """[lo, hi) inside [0, 1] that the fractional part of log_b|x| must hit."""
        scale = self.base ** (self.length - 1)
        log_b = math.log(self.base)
        lo = math.log(self.value / scale) / log_b
        hi = math.log((self.value + 1) / scale) / log_b
        return lo, hi

    def __str__(self):
        return "".join(ALPHABET[d] for d in self.digits)


def parse_digit_string(text, base):
    _check_base(base)
    if not text:
        raise DigitParseError("digit string is empty")
    lookup = text.lower() if base <= 36 else text
    digits = []
    for ch in lookup:
        d = ALPHABET.find(ch)
        if d < 0 or d >= base:
            raise DigitParseError(f"invalid digit {ch!r} for base {base}")
        digits.append(d)
    return DigitString(base, tuple(digits))


def to_digits(n, base):
    """Base-b digits of a positive integer, most significant first."""
    if n <= 0:
        raise DomainError("to_digits needs a positive integer")
    out = []
    while n:
        n, r = divmod(n, base)
        out.append(r)
    out.reverse()
    return out


class TermKind(str, Enum):
    EXACT = "exact-integer"
    SCALED = "scaled-float"


@dataclass(frozen=True)
class RealTermValue:
    """A sequence term: an arbitrary-precision integer or mantissa * 2**exponent."""

    kind: TermKind
    integer: int | None = None
    mantissa: float = 0.0
    exponent: int = 0

    def __post_init__(self):
        if self.kind is TermKind.EXACT:
            if not isinstance(self.integer, int) or self.integer == 0:
                raise DomainError("exact terms must be nonzero integers")
        elif self.mantissa == 0.0 or not math.isfinite(self.mantissa):
            raise DomainError("scaled terms must be finite and nonzero")

    @classmethod
    def exact(cls, n):
        return cls(TermKind.EXACT, integer=int(n))

    @classmethod
    def scaled(cls, x):
        mantissa, exponent = math.frexp(x)
        return cls(TermKind.SCALED, mantissa=mantissa, exponent=exponent)

    @classmethod
    def from_log2(cls, log2_abs, negative=False):
        """Build |x| = 2**log2_abs without overflowing doubles."""
        exponent = math.floor(log2_abs) + 1
        mantissa = 2.0 ** (log2_abs - exponent)
        return cls(TermKind.SCALED, mantissa=-mantissa if negative else mantissa, exponent=exponent)

    @property
    def negative(self):
        if self.kind is TermKind.EXACT:
            return self.integer < 0
        return self.mantissa < 0

    def log_abs(self, base):
        if self.kind is TermKind.EXACT:
            n = abs(self.integer)
            shift = max(n.bit_length() - 60, 0)
            return (math.log(n >> shift) + shift * math.log(2)) / math.log(base)
        return (math.log2(abs(self.mantissa)) + self.exponent) / math.log2(base)

    def __str__(self):
        if self.kind is TermKind.EXACT:
            return str(self.integer)
        try:
            return repr(math.ldexp(self.mantissa, self.exponent))
        except OverflowError:
            return f"{self.mantissa!r}p{self.exponent}"


def as_term_value(x):
    if isinstance(x, RealTermValue):
        return x
    if isinstance(x, bool):
        raise DomainError("booleans are not sequence terms")
    if isinstance(x, (int, np.integer)):
        if x == 0:
            raise DomainError("zero begins with no digit string")
        return RealTermValue.exact(int(x))
    x = float(x)
    if x == 0.0:
        raise DomainError("zero begins with no digit string")
    return RealTermValue.scaled(x)


@dataclass(frozen=True)
class DigitVerdict:
    matches: bool
    near_boundary: bool = False

    def __bool__(self):
        return self.matches


def _circular_gap(f, edge):
    d = abs(f - edge)
    return min(d, 1.0 - d)


def _locate(frac, event):
    lo, hi = event.log_window
    matches = lo <= frac < hi
    guard = BOUNDARY_GUARD / math.log(event.base)
    near = _circular_gap(frac, lo) < guard or _circular_gap(frac, hi % 1.0) < guard
    return DigitVerdict(matches, near)


def begins_with(x, event):
    """Whether |x| begins with the digit string `event` in its base."""
    x = as_term_value(x)
    if x.kind is TermKind.EXACT:
        head = to_digits(abs(x.integer), event.base)
        if len(head) >= event.length:
            head = head[:event.length]
        else:
            head = head + [0] * (event.length - len(head))
        return DigitVerdict(tuple(head) == event.digits)
    lb = x.log_abs(event.base)
    return _locate(lb - math.floor(lb), event)


def benford_probability(event):
    return math.log1p(1.0 / event.value) / math.log(event.base)


_INT64_CAP = 1 << 62


def _powers(base):
    powers = [1]
    while powers[-1] * base <= _INT64_CAP:
        powers.append(powers[-1] * base)
    return np.array(powers, dtype=np.int64)


def match_integers(values, event):
    """Vectorised `begins_with` for int64 arrays; exact."""
    mags = np.abs(np.asarray(values, dtype=np.int64))
    if mags.size and not mags.all():
        raise DomainError("zero begins with no digit string")
    if event.value * event.base >= _INT64_CAP:
        return np.fromiter((begins_with(int(v), event).matches for v in mags), dtype=bool, count=mags.size)
    powers = _powers(event.base)
    ndigits = np.searchsorted(powers, mags, side="right")
    shift = ndigits - event.length
    prefix = np.empty_like(mags)
    down = shift >= 0
    prefix[down] = mags[down] // powers[shift[down]]
    prefix[~down] = mags[~down] * powers[-shift[~down]]
    return prefix == event.value


def match_log_magnitudes(log_abs, event):
    """Vectorised scaled-float test on log_b|x|; returns (matches, near_boundary)."""
    lb = np.asarray(log_abs, dtype=np.float64)
    frac = lb - np.floor(lb)
    lo, hi = event.log_window
    matches = (frac >= lo) & (frac < hi)
    guard = BOUNDARY_GUARD / math.log(event.base)
    near = np.zeros(frac.shape, dtype=bool)
    for edge in (lo, hi % 1.0):
        d = np.abs(frac - edge)
        near |= np.minimum(d, 1.0 - d) < guard
    return matches, near
