# tests/test_primes_sequences.py
import math

import numpy as np
import pytest
from sympy import primepi, primerange

from app.cm_traces import CURVE_27A, CURVE_32A
from app.errors import DomainError, UnsupportedDiscriminantError
from app.measures import ARCSINE_CM, UNIFORM
from app.primes import iter_prime_segments, primes_between, split_mask
from app.sequences import (
    NATURALS,
    PRIMES,
    Chunk,
    CoefficientSource,
    GModel,
    IndexKind,
    IndexSet,
    SequenceSpec,
    count_below,
    harmonic_sum,
    index_values,
    iter_terms,
    kronecker,
    plan_chunks,
    prime_count,
    radical_inverse,
    sieve_primes,
    split_primes,
    split_primes_index,
    synthetic_terms,
    term_batch,
)


def test_sieve_matches_sympy():
    assert list(sieve_primes(1000)) == list(primerange(2, 1001))
    assert list(sieve_primes(1)) == []
    assert prime_count(10**5) == int(primepi(10**5))


def test_segments_cover_every_prime():
    segments = list(iter_prime_segments(10**4, span=997))
    assert len(segments) > 1
    assert np.concatenate(segments).tolist() == list(primerange(2, 10**4 + 1))


def test_primes_between_is_inclusive():
    assert primes_between(11, 29).tolist() == [11, 13, 17, 19, 23, 29]
    assert primes_between(30, 20).size == 0


def test_kronecker_symbols():
    assert kronecker(-4, 5) == 1
    assert kronecker(-4, 7) == -1
    assert kronecker(-4, 2) == 0
    assert kronecker(-3, 7) == 1
    assert kronecker(-3, 5) == -1
    assert kronecker(-3, 3) == 0


def test_split_primes():
    assert list(split_primes(-4, 30)) == [5, 13, 17, 29]
    assert list(split_primes(-3, 30)) == [7, 13, 19]
    for p in primerange(3, 2000):
        assert bool(split_mask(-4, [p])[0]) == (kronecker(-4, p) == 1)
        if p != 3:
            assert bool(split_mask(-3, [p])[0]) == (kronecker(-3, p) == 1)


def test_unsupported_discriminant():
    with pytest.raises(UnsupportedDiscriminantError):
        list(split_primes(-7, 100))
    with pytest.raises(DomainError):
        split_primes_index(-8)


def test_index_values_and_counts():
    assert index_values(NATURALS, 3, 6).tolist() == [3, 4, 5, 6]
    assert index_values(PRIMES, 1, 20).tolist() == [2, 3, 5, 7, 11, 13, 17, 19]
    assert index_values(split_primes_index(-4), 1, 30).tolist() == [5, 13, 17, 29]
    assert count_below(PRIMES, 51) == 15
    assert count_below(NATURALS, 1) == 0
    explicit = IndexSet(IndexKind.EXPLICIT, members=(9, 3, 3, 27))
    assert explicit.members == (3, 9, 27)
    assert count_below(explicit, 10) == 2


def test_g_models():
    assert NATURALS.g_model is GModel.LOG and NATURALS.c2 == 1.0
    assert PRIMES.g_model is GModel.LOGLOG
    assert split_primes_index(-3).c2 == 0.5
    assert NATURALS.g(math.e) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        NATURALS.g(1)
    with pytest.raises(DomainError):
        PRIMES.g(2)


def test_plan_chunks_is_fixed():
    assert plan_chunks(NATURALS, 1, 100, span=30) == [
        Chunk(1, 30, 0), Chunk(31, 60, 30), Chunk(61, 90, 60), Chunk(91, 100, 90)]
    assert [(c.lo, c.hi) for c in plan_chunks(NATURALS, 1, 100, span=30, breaks=[45])] == [
        (1, 30), (31, 45), (46, 75), (76, 100)]
    assert plan_chunks(PRIMES, 1, 100, span=50) == [Chunk(1, 50, 0), Chunk(51, 100, 15)]
    assert plan_chunks(NATURALS, 5, 4) == []


def test_radical_inverse():
    assert radical_inverse([1, 2, 3, 4, 5]).tolist() == [0.5, 0.25, 0.75, 0.125, 0.625]
    assert radical_inverse([1, 2], base=3).tolist() == pytest.approx([1 / 3, 2 / 3])


def test_harmonic_sum():
    h = harmonic_sum(NATURALS, 10)
    assert h.total == pytest.approx(2.9289682539682538, abs=1e-15)
    assert h.c2_estimate == pytest.approx(h.total / math.log(10))
    primes = harmonic_sum(PRIMES, 100)
    assert primes.total == pytest.approx(math.fsum(1.0 / p for p in primerange(2, 101)))


def test_sequence_constructors_validate():
    cm = SequenceSpec.cm(CURVE_32A)
    assert cm.index.disc == -4 and cm.c1 == 2.0 and cm.m == 0.5
    assert cm.coefficient_measure == ARCSINE_CM
    assert SequenceSpec.cm(CURVE_27A).index.disc == -3
    with pytest.raises(DomainError):
        SequenceSpec(PRIMES, 2.0, 0.5, CoefficientSource.CM_TRACE, curve=CURVE_32A)
    with pytest.raises(DomainError):
        SequenceSpec(split_primes_index(-4), 3.0, 0.5, CoefficientSource.CM_TRACE, curve=CURVE_32A)
    with pytest.raises(DomainError):
        SequenceSpec(NATURALS, 2.0, 1.0, CoefficientSource.MEASURE)
    with pytest.raises(DomainError):
        SequenceSpec.synthetic(UNIFORM, c1=0.0)


def test_identity_terms_are_exact():
    batch = term_batch(SequenceSpec.identity(), Chunk(1, 50, 0))
    assert batch.exact.tolist() == list(range(1, 51))
    assert batch.skipped == 0


def test_synthetic_first_terms():
    stream = synthetic_terms(SequenceSpec.synthetic(ARCSINE_CM), 10)
    terms = list(stream)
    # u_1 = 1/2 maps to c = 0, which is skipped
    assert stream.skipped == 1
    assert terms[0].i == 2
    assert terms[0].c == pytest.approx(-math.sqrt(0.5))
    assert float(str(terms[0].a)) == pytest.approx(-4.0 * math.sqrt(0.5))


def test_synthetic_terms_need_a_measure():
    with pytest.raises(DomainError):
        synthetic_terms(SequenceSpec.identity(), 10)


def test_generation_does_not_depend_on_chunking():
    spec = SequenceSpec.synthetic(ARCSINE_CM, PRIMES)
    whole = [term_batch(spec, c) for c in plan_chunks(PRIMES, 1, 5000)]
    parts = [term_batch(spec, c) for c in plan_chunks(PRIMES, 1, 5000, span=777)]
    assert np.array_equal(np.concatenate([b.coefficients for b in whole]),
                          np.concatenate([b.coefficients for b in parts]))
    assert np.array_equal(np.concatenate([b.log_abs for b in whole]),
                          np.concatenate([b.log_abs for b in parts]))


def test_benford_control_mantissas_follow_van_der_corput():
    spec = SequenceSpec.benford(10)
    batch = term_batch(spec, Chunk(1, 1000, 0))
    mantissa = batch.log_abs / math.log(10)
    frac = mantissa - np.floor(mantissa)
    u = radical_inverse(np.arange(1, 1001))
    gap = np.abs(frac - u)
    assert np.all(np.minimum(gap, 1.0 - gap) < 1e-9)
    assert np.all(np.abs(batch.coefficients) <= 1.0)


def test_cm_batch_skips_nothing_on_split_primes():
    spec = SequenceSpec.cm(CURVE_32A)
    batch = term_batch(spec, Chunk(1, 1000, 0))
    assert batch.skipped == 0
    assert np.all(np.abs(batch.coefficients) <= 1.0)
    assert batch.exact[0] == -2


def test_iter_terms_counts_skips_per_pass():
    stream = iter_terms(SequenceSpec.synthetic(ARCSINE_CM), 100)
    assert len(list(stream)) == 99
    assert len(list(stream)) == 99
    assert stream.skipped == 1


def test_split_inert_and_ramified_primes_partition_to_1e6():
    primes = set(sieve_primes(10**6))
    for disc, ramified, inert_residue, modulus in ((-4, 2, 3, 4), (-3, 3, 2, 3)):
        split = set(split_primes(disc, 10**6))
        inert = {p for p in primes if kronecker(disc, p) == -1}
        assert {p for p in primes if kronecker(disc, p) == 0} == {ramified}
        assert split == {p for p in primes if kronecker(disc, p) == 1}
        assert inert == {p for p in primes if p % modulus == inert_residue}
        assert split.isdisjoint(inert)
        assert split | inert | {ramified} == primes


@pytest.mark.parametrize("spec", [
    SequenceSpec.synthetic(ARCSINE_CM),
    SequenceSpec.synthetic(UNIFORM, PRIMES, c1=3.0, m=1.5),
    SequenceSpec.benford(10, c1=2.0, m=0.5),
])
def test_emitted_terms_respect_the_growth_bound(spec):
    for chunk in plan_chunks(spec.index, 1, 200_000):
        batch = term_batch(spec, chunk)
        bound = math.log(spec.c1) + spec.m * np.log(batch.indices.astype(np.float64))
        assert np.all(np.abs(batch.coefficients) <= 1.0)
        assert np.all(batch.log_abs <= bound + 1e-12 * np.abs(bound))


def test_trace_terms_respect_the_growth_bound():
    spec = SequenceSpec.cm(CURVE_27A)
    for chunk in plan_chunks(spec.index, 1, 200_000):
        batch = term_batch(spec, chunk)
        # |a_p| <= 2 sqrt(p), compared exactly
        assert np.all(batch.exact * batch.exact <= 4 * batch.indices)
        assert np.all(batch.exact != 0)


def _coefficients_with_weights(x):
    spec = SequenceSpec.synthetic(ARCSINE_CM)
    batches = [term_batch(spec, c) for c in plan_chunks(NATURALS, 1, x)]
    c = np.concatenate([b.coefficients for b in batches])
    i = np.concatenate([b.indices for b in batches])
    order = np.argsort(c, kind="stable")
    return c[order], i[order]


def _random_intervals(count=100, seed=20):
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(-1.0, 1.0, size=(count, 2)), axis=1)


def test_coefficients_are_equidistributed_at_1e6():
    c, _ = _coefficients_with_weights(10**6)
    for a, b in _random_intervals():
        frequency = (np.searchsorted(c, b, side="right") - np.searchsorted(c, a, side="left")) / c.size
        assert abs(frequency - ARCSINE_CM.cdf(b) + ARCSINE_CM.cdf(a)) <= 5e-3


def test_weighted_coefficient_frequencies_at_1e6():
    # the first indices carry a bias that decays only like 1/log x, so weigh from i > 10^3
    c, i = _coefficients_with_weights(10**6)
    keep = i > 1000
    c, w = c[keep], 1.0 / i[keep].astype(np.float64)
    mass = np.concatenate(([0.0], np.cumsum(w)))
    for a, b in _random_intervals(seed=21):
        lo, hi = np.searchsorted(c, a, side="left"), np.searchsorted(c, b, side="right")
        frequency = (mass[hi] - mass[lo]) / mass[-1]
        assert abs(frequency - ARCSINE_CM.cdf(b) + ARCSINE_CM.cdf(a)) <= 1e-2
