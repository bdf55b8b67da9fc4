# app/density.py
"""Arithmetic and logarithmic partial densities, and densities over the windows I_n.

Accumulators are mergeable: work is split into fixed index chunks, each
chunk is accumulated on its own, and the per-chunk results are merged left
to right.  Sums use an error-free two-sum so the result does not depend on
how many workers produced the chunks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .digits import begins_with, match_integers, match_log_magnitudes
from .errors import DomainError, EmptyWindowError, UndefinedRatioError
from .models import Checkpoint, WindowDensity
from .sequences import CHUNK_SPAN, IndexKind, index_values, plan_chunks, term_batch
from .workers import run_ordered

logger = logging.getLogger(__name__)

SAMPLE_BLOCKS = 16
# indices stay int64 with room for i + 1
MAX_WINDOW_INDEX = 1 << 62


def _two_sum(u, v):
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)


@dataclass
class CompensatedSum:
    """Running sum carried as an unevaluated pair s + t."""

    s: float = 0.0
    t: float = 0.0

    def add(self, y):
        y, u = _two_sum(float(y), self.t)
        self.s, self.t = _two_sum(y, self.s)
        if self.s == 0.0:
            self.s = u
        else:
            self.t += u
        return self

    def merge(self, other):
        out = CompensatedSum(self.s, self.t)
        out.add(other.s)
        out.add(other.t)
        return out

    @property
    def value(self):
        return self.s + self.t


class DensityMode(str, Enum):
    ARITHMETIC = "arithmetic"
    LOGARITHMIC = "logarithmic"


@dataclass
class DensityAccumulator:
    mode: DensityMode
    hits: CompensatedSum = field(default_factory=CompensatedSum)
    totals: CompensatedSum = field(default_factory=CompensatedSum)
    terms: int = 0
    hit_terms: int = 0
    flagged: int = 0
    skipped: int = 0

    def _weight(self, i):
        return 1.0 if self.mode is DensityMode.ARITHMETIC else 1.0 / i

    def accumulate(self, term, event):
        """Add one term; boundary-flagged verdicts count in totals only."""
        w = self._weight(term.i)
        self.totals.add(w)
        self.terms += 1
        verdict = begins_with(term.a, event)
        if verdict.near_boundary:
            self.flagged += 1
        elif verdict.matches:
            self.hits.add(w)
            self.hit_terms += 1
        return self

    def accumulate_batch(self, batch, event):
        # zero terms begin with no string but still belong to the index set
        self.skipped += batch.skipped
        if self.mode is DensityMode.ARITHMETIC:
            self.totals.add(batch.skipped)
        else:
            self.totals.add(batch.skipped_harmonic)
        if len(batch) == 0:
            return self
        if batch.exact is not None:
            matches = match_integers(batch.exact, event)
            near = np.zeros(matches.shape, dtype=bool)
        else:
            matches, near = match_log_magnitudes(batch.log_abs / math.log(event.base), event)
        hit = matches & ~near
        self.terms += len(batch)
        self.hit_terms += int(hit.sum())
        self.flagged += int(near.sum())
        if self.mode is DensityMode.ARITHMETIC:
            self.totals.add(len(batch))
            self.hits.add(int(hit.sum()))
        else:
            weights = 1.0 / batch.indices.astype(np.float64)
            self.totals.add(math.fsum(weights.tolist()))
            self.hits.add(math.fsum(weights[hit].tolist()))
        return self

    def merge(self, other):
        if other.mode is not self.mode:
            raise DomainError("cannot merge accumulators of different modes")
        return DensityAccumulator(
            self.mode,
            self.hits.merge(other.hits),
            self.totals.merge(other.totals),
            self.terms + other.terms,
            self.hit_terms + other.hit_terms,
            self.flagged + other.flagged,
            self.skipped + other.skipped,
        )

    def ratio(self):
        totals = self.totals.value
        if totals <= 0.0:
            raise UndefinedRatioError("no terms accumulated")
        return min(self.hits.value / totals, 1.0)

    @property
    def flagged_fraction(self):
        count = self.terms + self.skipped
        return self.flagged / count if count else 0.0


def accumulate(acc, term, event):
    return acc.accumulate(term, event)


def ratio(acc):
    return acc.ratio()


def merge(accumulators, mode):
    out = DensityAccumulator(mode)
    for acc in accumulators:
        out = out.merge(acc)
    return out


def _chunk_accumulator(task):
    seq, chunk, event, mode = task
    acc = DensityAccumulator(mode)
    acc.accumulate_batch(term_batch(seq, chunk), event)
    logger.debug("chunk [%d, %d]: %d terms", chunk.lo, chunk.hi, acc.terms)
    return acc


def accumulate_chunks(seq, chunks, event, mode, threads=1):
    """Per-chunk accumulators, in chunk order."""
    tasks = [(seq, chunk, event, mode) for chunk in chunks]
    return run_ordered(_chunk_accumulator, tasks, threads)


def default_ladder(x):
    ladder = []
    step = 1000
    while step < x:
        ladder.append(step)
        step *= 10
    ladder.append(x)
    return ladder


def density_trajectory(seq, event, mode, checkpoints, threads=1):
    """Snapshots of the partial density at each checkpoint x, increasing."""
    xs = sorted(set(int(x) for x in checkpoints))
    if not xs or xs[0] < 1:
        raise DomainError("checkpoints must be positive")
    mode = DensityMode(mode)
    chunks = plan_chunks(seq.index, 1, xs[-1], breaks=xs, ranked=seq.needs_ranks)
    parts = accumulate_chunks(seq, chunks, event, mode, threads)
    out = []
    running = DensityAccumulator(mode)
    pending = list(xs)
    for chunk, part in zip(chunks, parts):
        running = running.merge(part)
        while pending and pending[0] <= chunk.hi:
            x = pending.pop(0)
            out.append(_checkpoint(running, x, event))
    for cp in out:
        logger.info("%s density at x=%d: %.6f", mode.value, cp.x, cp.ratio)
    if running.flagged:
        logger.warning("%d boundary-flagged terms up to x=%d", running.flagged, xs[-1])
    return out


def _checkpoint(acc, x, event):
    try:
        value = acc.ratio()
    except UndefinedRatioError:
        value = float("nan")
    return Checkpoint(
        x=x,
        mode=acc.mode.value,
        base=event.base,
        string=str(event),
        hits=acc.hits.value,
        totals=acc.totals.value,
        ratio=value,
        flagged=acc.flagged,
        skipped=acc.skipped,
        terms=acc.terms,
    )


def consistency_gap(seq, event, x, threads=1):
    """|arithmetic - logarithmic| partial densities at x."""
    arith = density_trajectory(seq, event, DensityMode.ARITHMETIC, [x], threads)[-1]
    log = density_trajectory(seq, event, DensityMode.LOGARITHMIC, [x], threads)[-1]
    return abs(arith.ratio - log.ratio)


class WindowKind(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    B2_LOWER = "b2-lower"
    B2_UPPER = "b2-upper"


# (low, low inclusive, high, high inclusive) as multiples of the window scale
_WINDOW_INEQUALITIES = {
    WindowKind.LOWER: (Fraction(40, 23), True, Fraction(2), False),
    WindowKind.UPPER: (Fraction(5, 2), False, Fraction(8, 3), True),
    WindowKind.B2_LOWER: (Fraction(30, 11), True, Fraction(3), False),
    WindowKind.B2_UPPER: (Fraction(9, 2), True, Fraction(5), False),
}


@dataclass(frozen=True)
class WindowSpec:
    kind: WindowKind
    base: int
    n: int
    c1: float = 2.0
    m: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"window order n must be >= 0, got {self.n}")
        if self.kind in (WindowKind.B2_LOWER, WindowKind.B2_UPPER) and self.base != 2:
            raise DomainError("the 4^n windows belong to base 2")
        if not (self.c1 > 0 and self.m > 0):
            raise DomainError("C1 and m must be positive")

    @property
    def binary(self):
        return self.kind in (WindowKind.B2_LOWER, WindowKind.B2_UPPER)

    @property
    def scale(self):
        return 4 ** self.n if self.binary else self.base ** self.n

    @classmethod
    def pair(cls, base, n, c1=2.0, m=1.0):
        """(lower, upper) windows of order n for the base."""
        if base == 2:
            return cls(WindowKind.B2_LOWER, 2, n, c1, m), cls(WindowKind.B2_UPPER, 2, n, c1, m)
        return cls(WindowKind.LOWER, base, n, c1, m), cls(WindowKind.UPPER, base, n, c1, m)


def _compare(i, bound, c1, m):
    """Sign of C1 * i^m - bound, exact whenever C1 and m are exact rationals."""
    mf = Fraction(m).limit_denominator(1000)
    c = Fraction(c1)
    if float(mf) == m:
        p, q = mf.numerator, mf.denominator
        lhs = c ** q * Fraction(i) ** p
        rhs = bound ** q
    else:
        lhs, rhs = c1 * float(i) ** m, float(bound)
    return (lhs > rhs) - (lhs < rhs)


def _first_index(pred, guess):
    i = max(1, guess)
    while i > 1 and pred(i - 1):
        i -= 1
    while not pred(i):
        i += 1
    return i


def _guess(bound, c1, m):
    return int(math.floor((float(bound) / c1) ** (1.0 / m)))


def window_bounds(w):
    """Integer interval [i_lo, i_hi] of i >= 1 satisfying the window inequality.

    Empty windows come back with i_lo > i_hi.
    """
    low_coef, low_incl, high_coef, high_incl = _WINDOW_INEQUALITIES[w.kind]
    low = low_coef * w.scale
    high = high_coef * w.scale

    def above_low(i):
        sign = _compare(i, low, w.c1, w.m)
        return sign >= 0 if low_incl else sign > 0

    def past_high(i):
        sign = _compare(i, high, w.c1, w.m)
        return sign > 0 if high_incl else sign >= 0

    i_lo = _first_index(above_low, _guess(low, w.c1, w.m))
    i_hi = _first_index(past_high, _guess(high, w.c1, w.m)) - 1
    return i_lo, i_hi


def _sample_ranges(i_lo, i_hi, max_terms):
    width = i_hi - i_lo + 1
    if max_terms is None or width <= max_terms:
        return [(i_lo, i_hi)], False
    block = max(1, max_terms // SAMPLE_BLOCKS)
    stride = (width - block) // (SAMPLE_BLOCKS - 1)
    starts = [i_lo + k * stride for k in range(SAMPLE_BLOCKS)]
    return [(s, s + block - 1) for s in starts], True


def window_density(seq, w, event, max_terms=None, threads=1):
    """Fraction of the members of I in the window whose term begins with `event`.

    Windows wider than `max_terms` indices are evaluated on evenly spaced
    contiguous blocks and reported as sampled.
    """
    i_lo, i_hi = window_bounds(w)
    if i_lo > i_hi:
        raise EmptyWindowError(f"{w.kind.value} window n={w.n} is empty")
    if i_hi > MAX_WINDOW_INDEX:
        raise DomainError(f"{w.kind.value} window n={w.n} reaches i = {i_hi}, past the int64 index range")
    ranges, sampled = _sample_ranges(i_lo, i_hi, max_terms)
    chunks = []
    for lo, hi in ranges:
        chunks.extend(plan_chunks(seq.index, lo, hi, span=CHUNK_SPAN, ranked=seq.needs_ranks))
    acc = merge(accumulate_chunks(seq, chunks, event, DensityMode.ARITHMETIC, threads),
                DensityMode.ARITHMETIC)
    if acc.terms + acc.skipped == 0:
        raise EmptyWindowError(
            f"{w.kind.value} window n={w.n} holds no index of {seq.index.label} in [{i_lo}, {i_hi}]")
    result = WindowDensity(
        kind=w.kind.value,
        n=w.n,
        i_lo=i_lo,
        i_hi=i_hi,
        evaluated=acc.terms + acc.skipped,
        hits=acc.hit_terms,
        density=acc.ratio(),
        flagged=acc.flagged,
        sampled=sampled,
    )
    logger.info("%s window n=%d [%d, %d]: %.4f over %d terms%s", result.kind, w.n, i_lo, i_hi,
                result.density, result.evaluated, " (sampled)" if sampled else "")
    return result


def window_reach(b, n, c1=2.0, m=1.0):
    """Largest index either window of order n can hold."""
    return max(window_bounds(w)[1] for w in WindowSpec.pair(b, n, c1, m))


def window_within(index, w, limit):
    """Whether the window lies inside [1, limit] and holds members of the index set."""
    i_lo, i_hi = window_bounds(w)
    if i_lo > i_hi or i_hi > limit:
        return False
    if index.kind is IndexKind.NATURALS:
        return True
    return index_values(index, i_lo, i_hi).size > 0
