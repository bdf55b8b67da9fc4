# app/sequences.py
"""Index sets, sequence specifications and deterministic term generation.

A sequence is a_i = C1 * i^m * c_i over an index set I.  Measure-sampled
coefficients take the n-th element of I (in increasing order) to
c = inverse_cdf(mu, u_n), u_n being the base-2 van der Corput point of n.
Generation is chunked over fixed index ranges so that any partition of
the work reproduces the same numbers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from . import cm_traces
from .digits import RealTermValue
from .errors import DomainError
from .measures import ARCSINE_CM, MeasureSpec
from .primes import (
    SEGMENT_SPAN,
    iter_prime_segments,
    kronecker,
    prime_count,
    primes_between,
    sieve_primes,
    split_mask,
    split_primes,
)

__all__ = [
    "CHUNK_SPAN", "Chunk", "CoefficientSource", "count_below", "GModel", "HarmonicSum", "IndexKind", "IndexSet",
    "NATURALS", "PRIMES", "SequenceSpec", "Term", "TermBatch", "TermStream", "harmonic_mass", "harmonic_sum",
    "index_values", "iter_terms", "kronecker", "plan_chunks", "prime_count", "radical_inverse",
    "sieve_primes", "split_primes", "split_primes_index", "synthetic_terms", "term_batch",
]

logger = logging.getLogger(__name__)

CHUNK_SPAN = SEGMENT_SPAN


class GModel(str, Enum):
    LOG = "log"
    LOGLOG = "loglog"


class IndexKind(str, Enum):
    NATURALS = "naturals"
    PRIMES = "primes"
    SPLIT_PRIMES = "split-primes"
    EXPLICIT = "explicit"


_DEFAULT_G = {
    IndexKind.NATURALS: (GModel.LOG, 1.0),
    IndexKind.PRIMES: (GModel.LOGLOG, 1.0),
    IndexKind.SPLIT_PRIMES: (GModel.LOGLOG, 0.5),
    IndexKind.EXPLICIT: (GModel.LOG, 1.0),
}


@dataclass(frozen=True)
class IndexSet:
    kind: IndexKind
    disc: int | None = None
    members: tuple[int, ...] = ()
    g_model: GModel | None = None
    c2: float | None = None

    def __post_init__(self):
        g_model, c2 = _DEFAULT_G[self.kind]
        if self.g_model is None:
            object.__setattr__(self, "g_model", g_model)
        if self.c2 is None:
            object.__setattr__(self, "c2", c2)
        if self.kind is IndexKind.SPLIT_PRIMES:
            split_mask(self.disc, [])
        if self.kind is IndexKind.EXPLICIT:
            members = tuple(sorted(set(int(i) for i in self.members)))
            if not members or members[0] < 1:
                raise DomainError("explicit index sets need positive members")
            object.__setattr__(self, "members", members)

    @property
    def label(self):
        if self.kind is IndexKind.SPLIT_PRIMES:
            return f"split-primes({self.disc})"
        return self.kind.value

    def g(self, x):
        if self.g_model is GModel.LOG:
            if x < 2:
                raise DomainError(f"g(x) = log x needs x >= 2, got {x}")
            return math.log(x)
        if x < 3:
            raise DomainError(f"g(x) = log log x needs x >= 3, got {x}")
        return math.log(math.log(x))


NATURALS = IndexSet(IndexKind.NATURALS)
PRIMES = IndexSet(IndexKind.PRIMES)


def split_primes_index(disc):
    return IndexSet(IndexKind.SPLIT_PRIMES, disc=disc)


def index_values(index, lo, hi):
    """Elements of the index set in [lo, hi], increasing, as int64."""
    lo = max(lo, 1)
    if hi < lo:
        return np.array([], dtype=np.int64)
    if index.kind is IndexKind.NATURALS:
        return np.arange(lo, hi + 1, dtype=np.int64)
    if index.kind is IndexKind.EXPLICIT:
        members = np.asarray(index.members, dtype=np.int64)
        return members[(members >= lo) & (members <= hi)]
    primes = primes_between(lo, hi)
    if index.kind is IndexKind.SPLIT_PRIMES:
        primes = primes[split_mask(index.disc, primes)]
    return primes


def count_below(index, x):
    """#{i in I : i < x}."""
    if x <= 1:
        return 0
    if index.kind is IndexKind.NATURALS:
        return x - 1
    if index.kind is IndexKind.EXPLICIT:
        return int(np.searchsorted(np.asarray(index.members, dtype=np.int64), x, side="left"))
    total = 0
    for segment in iter_prime_segments(x - 1):
        if index.kind is IndexKind.SPLIT_PRIMES:
            segment = segment[split_mask(index.disc, segment)]
        total += int(segment.size)
    return total


@dataclass(frozen=True)
class Chunk:
    """Index range [lo, hi] whose first member of I has rank rank_offset + 1."""

    lo: int
    hi: int
    rank_offset: int


def plan_chunks(index, lo, hi, span=CHUNK_SPAN, breaks=(), ranked=True):
    """Split [lo, hi] into fixed chunks; boundaries depend only on lo, hi, span and breaks.

    A chunk never straddles a break point b (it ends at b).  With
    ranked=False the rank offsets are left at zero, which spares a sieve
    for sources that do not use ranks.
    """
    chunks = []
    if hi < lo:
        return chunks
    stops = sorted(b for b in set(breaks) if lo <= b < hi)
    rank = count_below(index, lo) if ranked else 0
    start = lo
    while start <= hi:
        end = min(start + span - 1, hi)
        while stops and stops[0] < start:
            stops.pop(0)
        if stops and stops[0] < end:
            end = stops[0]
        chunks.append(Chunk(start, end, rank))
        if ranked:
            if index.kind is IndexKind.NATURALS:
                rank += end - start + 1
            else:
                rank += int(index_values(index, start, end).size)
        start = end + 1
    return chunks


def radical_inverse(n, base=2):
    """Van der Corput points of the integers n (vectorised, exact for n < 2**53)."""
    n = np.array(n, dtype=np.int64, copy=True)
    out = np.zeros(n.shape, dtype=np.float64)
    scale = 1.0 / base
    while np.any(n > 0):
        n, digit = np.divmod(n, base)
        out += digit * scale
        scale /= base
    return out


class CoefficientSource(str, Enum):
    MEASURE = "measure-sampled"
    CM_TRACE = "cm-trace"
    IDENTITY = "identity"
    BENFORD = "benford"


@dataclass(frozen=True)
class SequenceSpec:
    index: IndexSet
    c1: float
    m: float
    source: CoefficientSource
    measure: MeasureSpec | None = None
    curve: cm_traces.CMCurve | None = None
    benford_base: int | None = None

    def __post_init__(self):
        if not (self.c1 > 0 and self.m > 0):
            raise DomainError("C1 and m must be positive")
        if self.source is CoefficientSource.MEASURE and self.measure is None:
            raise DomainError("measure-sampled sequences need a measure")
        if self.source is CoefficientSource.CM_TRACE:
            curve = self.curve
            if curve is None:
                raise DomainError("cm-trace sequences need a curve")
            if self.index.kind is not IndexKind.SPLIT_PRIMES or self.index.disc != curve.disc:
                raise DomainError(f"curve-{curve.id.value} traces are indexed by split-primes({curve.disc})")
            if self.c1 != 2 or self.m != (curve.weight - 1) / 2:
                raise DomainError("cm-trace sequences use the Hasse normalisation C1 = 2, m = (k-1)/2")
        if self.source is CoefficientSource.IDENTITY and (self.c1 != 1 or self.m != 1):
            raise DomainError("identity sequences have C1 = 1 and m = 1")
        if self.source is CoefficientSource.BENFORD and not (self.benford_base and self.benford_base >= 2):
            raise DomainError("benford controls need a base >= 2")

    @classmethod
    def synthetic(cls, measure, index=NATURALS, c1=2.0, m=1.0):
        return cls(index, float(c1), float(m), CoefficientSource.MEASURE, measure=measure)

    @classmethod
    def cm(cls, curve):
        return cls(split_primes_index(curve.disc), 2.0, (curve.weight - 1) / 2,
                   CoefficientSource.CM_TRACE, curve=curve)

    @classmethod
    def identity(cls, index=NATURALS):
        return cls(index, 1.0, 1.0, CoefficientSource.IDENTITY)

    @classmethod
    def benford(cls, base, index=NATURALS, c1=2.0, m=1.0):
        return cls(index, float(c1), float(m), CoefficientSource.BENFORD, benford_base=base)

    @property
    def coefficient_measure(self):
        """The mu the c_i are equidistributed against, when the sequence has one."""
        if self.source is CoefficientSource.MEASURE:
            return self.measure
        if self.source is CoefficientSource.CM_TRACE:
            return ARCSINE_CM
        return None

    @property
    def exact(self):
        return self.source in (CoefficientSource.CM_TRACE, CoefficientSource.IDENTITY)

    @property
    def needs_ranks(self):
        return self.source in (CoefficientSource.MEASURE, CoefficientSource.BENFORD)

    @property
    def exponent_fraction(self):
        return Fraction(self.m).limit_denominator(1000)

    def describe(self):
        out = {
            "index": self.index.label,
            "c1": self.c1,
            "m": self.m,
            "source": self.source.value,
        }
        if self.measure is not None:
            out["measure"] = self.measure.name
        if self.curve is not None:
            out["curve"] = self.curve.id.value
            out["cm_field_disc"] = self.curve.disc
        if self.benford_base is not None:
            out["benford_base"] = self.benford_base
        return out


@dataclass(frozen=True)
class Term:
    i: int
    c: float
    a: RealTermValue


@dataclass
class TermBatch:
    """Vectorised terms of one chunk.

    `exact` holds integer a_i for exact sources; otherwise `log_abs` holds
    ln|a_i|.  Zero-coefficient indices are already removed; `skipped` counts them and
    `skipped_harmonic` holds their 1/i sum.
    """

    indices: np.ndarray
    coefficients: np.ndarray
    exact: np.ndarray | None = None
    log_abs: np.ndarray | None = None
    negative: np.ndarray | None = None
    skipped: int = 0
    skipped_harmonic: float = 0.0

    def __len__(self):
        return int(self.indices.size)

    def log_abs_base(self, base):
        if self.exact is not None:
            return np.log(np.abs(self.exact).astype(np.float64)) / math.log(base)
        return self.log_abs / math.log(base)

    def terms(self):
        for k in range(len(self)):
            i = int(self.indices[k])
            c = float(self.coefficients[k])
            if self.exact is not None:
                a = RealTermValue.exact(int(self.exact[k]))
            else:
                a = RealTermValue.from_log2(float(self.log_abs[k]) / math.log(2), bool(self.negative[k]))
            yield Term(i, c, a)


def _harmonic(indices):
    return math.fsum((1.0 / indices.astype(np.float64)).tolist())


def term_batch(spec, chunk):
    indices = index_values(spec.index, chunk.lo, chunk.hi)
    ranks = chunk.rank_offset + 1 + np.arange(indices.size, dtype=np.int64)
    source = spec.source

    if source is CoefficientSource.IDENTITY:
        return TermBatch(indices, np.ones(indices.size), exact=indices.copy())

    if source is CoefficientSource.CM_TRACE:
        a = cm_traces.traces(spec.curve, indices)
        c = a / (2.0 * np.power(indices.astype(np.float64), spec.m))
        keep = a != 0
        return TermBatch(indices[keep], c[keep], exact=a[keep], skipped=int((~keep).sum()),
                         skipped_harmonic=_harmonic(indices[~keep]))

    u = radical_inverse(ranks)
    log_scale = math.log(spec.c1) + spec.m * np.log(indices.astype(np.float64))
    if source is CoefficientSource.BENFORD:
        # |c_i| <= 1 chosen so that frac(log_b |a_i|) = u_n
        log_b = math.log(spec.benford_base)
        f = log_scale / log_b
        f = f - np.floor(f)
        d = u - f
        log_c = np.where(d <= 0.0, d, d - 1.0)
        c = np.power(float(spec.benford_base), log_c)
        return TermBatch(indices, c, log_abs=log_scale + log_c * log_b, negative=np.zeros(indices.size, dtype=bool))

    c = spec.measure.inverse_cdf(u)
    c = np.atleast_1d(np.asarray(c, dtype=np.float64))
    keep = c != 0.0
    dropped = indices[~keep]
    indices, c, log_scale = indices[keep], c[keep], log_scale[keep]
    return TermBatch(indices, c, log_abs=log_scale + np.log(np.abs(c)), negative=c < 0.0,
                     skipped=int(dropped.size), skipped_harmonic=_harmonic(dropped))


@dataclass
class TermStream:
    """Single-consumer stream of terms with i <= limit; counts skipped zero terms."""

    spec: SequenceSpec
    limit: int
    skipped: int = field(default=0, init=False)

    def batches(self):
        self.skipped = 0
        for chunk in plan_chunks(self.spec.index, 1, self.limit):
            batch = term_batch(self.spec, chunk)
            self.skipped += batch.skipped
            yield batch

    def __iter__(self):
        for batch in self.batches():
            yield from batch.terms()


def synthetic_terms(spec, limit):
    if spec.source is not CoefficientSource.MEASURE:
        raise DomainError("synthetic_terms needs a measure-sampled sequence")
    return TermStream(spec, limit)


def iter_terms(spec, limit):
    return TermStream(spec, limit)


@dataclass(frozen=True)
class HarmonicSum:
    total: float
    c2_estimate: float
    x: int


def harmonic_mass(index, lo, hi):
    """Sum of 1/i over the members of I in [lo, hi], a chunk at a time."""
    return math.fsum(_harmonic(index_values(index, c.lo, c.hi))
                     for c in plan_chunks(index, max(lo, 1), hi, ranked=False))


def harmonic_sum(index, x):
    """Sum of 1/i over I up to x, and its ratio to g(x)."""
    g = index.g(x)
    total = harmonic_mass(index, 1, x)
    return HarmonicSum(total, total / g, x)
