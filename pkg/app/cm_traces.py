# app/cm_traces.py
"""Frobenius traces of two weight-2 CM newforms.

curve-32a  y^2 = x^3 - x   CM by Q(i)         level 32
curve-27a  y^2 + y = x^3   CM by Q(sqrt(-3))  level 27

Traces at split primes come from Cornacchia's algorithm; a brute-force
point count over F_p is the independent oracle that gates both sign
normalisations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from sympy import isprime

from .errors import BadPrimeError, DomainError, HasseBoundError, OracleLimitError
from .primes import iter_prime_segments, split_mask

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 10**6


class CurveId(str, Enum):
    C32A = "32a"
    C27A = "27a"


@dataclass(frozen=True)
class CMCurve:
    id: CurveId
    disc: int
    level: int
    equation: str
    weight: int = 2

    @property
    def cm_field_disc(self):
        return self.disc

    def is_bad(self, p):
        return self.level % p == 0


CURVE_32A = CMCurve(CurveId.C32A, disc=-4, level=32, equation="y^2 = x^3 - x")
CURVE_27A = CMCurve(CurveId.C27A, disc=-3, level=27, equation="y^2 + y = x^3")

CURVES = {c.id: c for c in (CURVE_32A, CURVE_27A)}


def curve_by_id(curve_id):
    try:
        return CURVES[CurveId(str(curve_id).removeprefix("curve-"))]
    except ValueError:
        raise DomainError(f"unknown curve {curve_id!r}") from None


@dataclass(frozen=True)
class TraceRecord:
    p: int
    a_p: int
    cos_theta: float


def legendre(a, p):
    r = a % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def tonelli_shanks(a, p):
    """A square root of a modulo the odd prime p, or None for a nonresidue."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def cornacchia(d, p):
    """Positive (a, b) with a^2 + d b^2 = p, or None when p does not split.

    For d = 1 the solution is returned with a odd.
    """
    if __debug__ and (p % 2 == 0 or not isprime(p)):
        raise DomainError(f"cornacchia needs an odd prime, got {p}")
    if d <= 0 or math.gcd(d, p) != 1:
        raise DomainError(f"cornacchia needs d > 0 coprime to p, got d={d}")
    r = tonelli_shanks(-d, p)
    if r is None:
        return None
    if r <= p // 2:
        r = p - r
    a, b, limit = p, r, math.isqrt(p)
    while b > limit:
        a, b = b, a % b
    rest = p - b * b
    if rest % d:
        return None
    c = math.isqrt(rest // d)
    if c * c != rest // d or c == 0:
        return None
    x, y = b, c
    if d == 1 and x % 2 == 0:
        x, y = y, x
    return x, y


def _trace_32a(p):
    if p % 4 == 3:
        return 0
    a, b = cornacchia(1, p)
    # a odd; choose its sign so that a + b = 1 (mod 4)
    if (a + b) % 4 != 1:
        a = -a
    return 2 * a


def _trace_27a(p):
    if p % 3 == 2:
        return 0
    a, b = cornacchia(3, p)
    # 4p = (2a)^2 + 12 b^2 = (a + 3b)^2 + 3(a - b)^2 = (a - 3b)^2 + 3(a + b)^2
    if b % 3 == 0:
        L = 2 * a
    elif (a - b) % 3 == 0:
        L = a + 3 * b
    else:
        L = a - 3 * b
    # the point count of y^2 + y = x^3 fixes L = 2 (mod 3)
    if L % 3 != 2:
        L = -L
    return L


def trace(curve, p):
    """Exact Frobenius trace a_p of the curve at a good prime p."""
    if curve.is_bad(p):
        raise BadPrimeError(f"p={p} divides the level {curve.level} of curve-{curve.id.value}")
    if curve.id is CurveId.C32A:
        return _trace_32a(p)
    if p == 2:
        return 0
    return _trace_27a(p)


def brute_force_point_count(curve, p, limit=ORACLE_LIMIT):
    """#E(F_p) including the point at infinity, by enumerating x in F_p."""
    if curve.is_bad(p):
        raise BadPrimeError(f"p={p} divides the level {curve.level}")
    if p > limit:
        raise OracleLimitError(f"oracle refuses p={p} > {limit}")
    y = np.arange(p, dtype=np.int64)
    x = np.arange(p, dtype=np.int64)
    cube = (x * x % p) * x % p
    if curve.id is CurveId.C32A:
        lhs, rhs = y * y % p, (cube - x) % p
    else:
        lhs, rhs = (y * y + y) % p, cube
    solutions = np.bincount(lhs, minlength=p)
    return 1 + int(solutions[rhs].sum())


def cos_theta(p, a_p, k=2):
    """a_p / (2 p^((k-1)/2)); a Hasse violation signals a trace bug."""
    if a_p * a_p > 4 * p ** (k - 1):
        raise HasseBoundError(f"|a_{p}| = {abs(a_p)} exceeds 2 p^((k-1)/2)")
    return a_p / (2.0 * p ** ((k - 1) / 2))


def trace_record(curve, p):
    a_p = trace(curve, p)
    return TraceRecord(p, a_p, cos_theta(p, a_p, curve.weight))


def traces(curve, primes):
    """Vector of traces for an array of good primes."""
    return np.fromiter((trace(curve, int(p)) for p in primes), dtype=np.int64, count=len(primes))


def trace_table(curve, limit, split_only=False):
    """TraceRecords for every good prime <= limit, sorted by p."""
    for segment in iter_prime_segments(limit):
        if split_only:
            segment = segment[split_mask(curve.disc, segment)]
        for p in segment.tolist():
            if curve.is_bad(p):
                continue
            yield trace_record(curve, p)


def verify_against_oracle(curve, limit):
    """Primes below `limit` where the trace disagrees with p + 1 - #E(F_p)."""
    mismatches = []
    for segment in iter_prime_segments(limit - 1):
        for p in segment.tolist():
            if curve.is_bad(p):
                continue
            expected = p + 1 - brute_force_point_count(curve, p)
            if trace(curve, p) != expected:
                mismatches.append(p)
    if mismatches:
        logger.error("curve-%s: %d traces disagree with the oracle, first p=%d",
                     curve.id.value, len(mismatches), mismatches[0])
    return mismatches
