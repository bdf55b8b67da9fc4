# app/primes.py
"""Segmented sieve of Eratosthenes and the split-prime filters for Q(i) and Q(sqrt(-3))."""

from __future__ import annotations

import math

import numpy as np

from .errors import UnsupportedDiscriminantError

SEGMENT_SPAN = 1 << 20
SUPPORTED_DISCRIMINANTS = (-4, -3)


def simple_sieve(limit):
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_segment(lo, hi, base):
    """Primes in [lo, hi] given all primes up to sqrt(hi)."""
    mask = np.ones(hi - lo + 1, dtype=bool)
    for p in base:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, -(-lo // p) * p)
        mask[start - lo::p] = False
    if lo < 2:
        mask[:2 - lo] = False
    return np.flatnonzero(mask).astype(np.int64) + lo


def primes_between(lo, hi):
    """All primes p with lo <= p <= hi as an int64 array."""
    lo = max(lo, 2)
    if hi < lo:
        return np.array([], dtype=np.int64)
    base = simple_sieve(math.isqrt(hi))
    return _sieve_segment(lo, hi, base)


def iter_prime_segments(limit, start=2, span=SEGMENT_SPAN):
    """Yield arrays of the primes in [start, limit], one segment at a time.

    Memory stays O(sqrt(limit) + span).
    """
    if limit < 2:
        return
    base = simple_sieve(math.isqrt(limit))
    lo = max(start, 2)
    while lo <= limit:
        hi = min(lo + span - 1, limit)
        yield _sieve_segment(lo, hi, base)
        lo = hi + 1


def sieve_primes(limit):
    """Stream every prime <= limit in increasing order; empty when limit < 2."""
    for segment in iter_prime_segments(limit):
        yield from segment.tolist()


def prime_count(limit, start=2):
    return sum(int(seg.size) for seg in iter_prime_segments(limit, start))


def _check_disc(disc):
    if disc not in SUPPORTED_DISCRIMINANTS:
        raise UnsupportedDiscriminantError(f"discriminant {disc} is not supported; use -4 or -3")


def kronecker(disc, p):
    """Kronecker symbol (disc / p) for a prime p."""
    if p == 2:
        if disc % 2 == 0:
            return 0
        return 1 if disc % 8 in (1, 7) else -1
    r = disc % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


def split_mask(disc, primes):
    """Boolean mask of the primes splitting in the field of discriminant `disc`."""
    _check_disc(disc)
    primes = np.asarray(primes, dtype=np.int64)
    if disc == -4:
        return primes % 4 == 1
    return primes % 3 == 1


def split_primes(disc, limit):
    """Stream primes p <= limit with (disc / p) = +1."""
    _check_disc(disc)
    for segment in iter_prime_segments(limit):
        yield from segment[split_mask(disc, segment)].tolist()
