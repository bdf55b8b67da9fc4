# app/experiments.py
"""Experiment harness: window separation, logarithmic convergence, the
truncation sandwich, and the equidistribution and splitting checks for the
CM trace sequences."""

from __future__ import annotations

import logging
import math

import numpy as np

from . import cm_traces
from .density import (
    CompensatedSum,
    DensityMode,
    WindowSpec,
    default_ladder,
    density_trajectory,
    window_bounds,
    window_density,
    window_within,
)
from .digits import benford_probability, match_integers, match_log_magnitudes, parse_digit_string
from .errors import DomainError, EmptyWindowError
from .measures import (
    Variant,
    convexity_check,
    interval_mass,
    small_coefficient_mass,
    strictly_greater,
    symmetry_defect,
)
from .models import (
    EpsilonThresholds,
    KSResult,
    LemmaReport,
    SeriesBounds,
    Thm1Report,
    Thm2Report,
    Verdict,
)
from .primes import iter_prime_segments, split_mask
from .sequences import GModel, harmonic_mass, index_values, plan_chunks, radical_inverse, term_batch
from .workers import run_ordered

logger = logging.getLogger(__name__)

SERIES_TAIL = 1e-12
SERIES_MAX_TERMS = 4000
WINDOW_BAND = 0.05
THM2_TOLERANCE = {GModel.LOG: 0.01, GModel.LOGLOG: 0.08}
TREND_SLACK = 1e-3
TREND_FROM = 10**5
K_SAFETY = 2.0
K_SAMPLE_R = (2, 5, 10, 40)
KS_BINS = 10_000


def default_event(base):
    """'1' in base b >= 3; '10' in base 2, where every term begins with '1'."""
    return parse_digit_string("10" if base == 2 else "1", base)


def thm1_series_bounds(mu, b):
    """L = 2 sum_j mu(lower interval * s^-j), U likewise for the upper interval.

    s = b for b >= 3 and s = 4 for b = 2.  Summation stops once both
    increments fall below 1e-12.
    """
    if b < 2:
        raise DomainError(f"base must be >= 2, got {b}")
    variant = Variant.for_base(b)
    (la, lb), (ua, ub) = variant.lower_interval, variant.upper_interval
    s = 4.0 if variant is Variant.BINARY else float(b)
    lower, upper = CompensatedSum(), CompensatedSum()
    j = 0
    while j < SERIES_MAX_TERMS:
        scale = s ** -j
        dl = interval_mass(mu, float(la) * scale, float(lb) * scale)
        du = interval_mass(mu, float(ua) * scale, float(ub) * scale)
        lower.add(dl)
        upper.add(du)
        j += 1
        if dl < SERIES_TAIL and du < SERIES_TAIL:
            break
    return SeriesBounds(base=b, lower=2.0 * lower.value, upper=2.0 * upper.value, terms=j)


def series_separations(mu, bases):
    rows = []
    for b in bases:
        bounds = thm1_series_bounds(mu, b)
        rows.append({"base": b, "L": bounds.lower, "U": bounds.upper,
                     "separation": bounds.lower - bounds.upper})
    return rows


def feasible_window_orders(seq, b, limit, n_max=64):
    """Orders n whose lower and upper windows both lie inside [1, limit]."""
    orders = []
    for n in range(n_max + 1):
        lower, upper = WindowSpec.pair(b, n, seq.c1, seq.m)
        if window_bounds(lower)[0] > limit:
            break
        if window_within(seq.index, lower, limit) and window_within(seq.index, upper, limit):
            orders.append(n)
    return orders


def _measure_of(seq):
    mu = seq.coefficient_measure
    if mu is None:
        raise DomainError(f"{seq.source.value} sequences carry no coefficient measure")
    if symmetry_defect(mu) > 1e-9:
        raise DomainError(f"measure {mu.name} is not symmetric")
    return mu


def run_thm1(seq, b, n_range, event=None, max_terms=None, threads=1, band=WINDOW_BAND):
    """Window densities on both sides of the series bounds, with a verdict.

    The verdict is a contradiction when L > U, the densities of the two
    largest evaluated orders separate (min lower > max upper), and those
    densities sit within `band` of L and U.
    """
    mu = _measure_of(seq)
    event = event or default_event(b)
    bounds = thm1_series_bounds(mu, b)
    L, U = bounds.lower, bounds.upper
    benford = benford_probability(event)
    report = Thm1Report(
        base=b,
        string=str(event),
        sequence=seq.describe(),
        L=L,
        U=U,
        benford_value=benford,
        lower_minus_benford=L - benford,
        upper_minus_benford=U - benford,
    )
    if not convexity_check(mu, 1000):
        report.separations_by_base = series_separations(mu, range(2, 17))

    evaluated = []
    for n in n_range:
        lower_w, upper_w = WindowSpec.pair(b, n, seq.c1, seq.m)
        try:
            lower = window_density(seq, lower_w, event, max_terms, threads)
            upper = window_density(seq, upper_w, event, max_terms, threads)
        except EmptyWindowError as exc:
            logger.warning("skipping n=%d: %s", n, exc)
            continue
        report.lower_windows.append(lower.to_dict())
        report.upper_windows.append(upper.to_dict())
        evaluated.append((lower, upper))

    if not evaluated:
        report.diagnostic = f"every window for n in {list(n_range)} is empty"
        logger.warning("thm1 inconclusive: %s", report.diagnostic)
        return report

    last = evaluated[-2:]
    lowest = min(lo.density for lo, _ in last)
    highest = max(up.density for _, up in last)
    report.separation = lowest - highest
    report.within_bands = all(lo.density >= L - band and up.density <= U + band for lo, up in last)
    if not strictly_greater(L, U):
        report.diagnostic = "series bounds coincide; the window argument does not apply"
    elif report.separation <= 0:
        report.diagnostic = "window densities do not separate"
    elif not report.within_bands:
        report.diagnostic = f"window densities leave the +/-{band} bands around L and U"
    else:
        report.verdict = Verdict.CONTRADICTION
    logger.info("thm1 base %d: L=%.4f U=%.4f separation=%.4f verdict=%s",
                b, L, U, report.separation, report.verdict.value)
    return report


def _g_at_least(index, r):
    return index.g(max(r, 3 if index.g_model is GModel.LOGLOG else 2))


def fit_k(seq, b, event, r, x):
    """Largest small-index prefix sum seen across the sample r values, over g(r), times 2.

    Indices with C1 i^m < (S + 1) b / r' cannot reach the event scale for
    |c| > 1/r', so their 1/i mass is the part the asymptotic bound leaves out.
    """
    k = 0.0
    for r_prime in sorted(set(K_SAMPLE_R) | {r}):
        top = ((event.value + 1) * r_prime / (seq.c1 * b)) ** (1.0 / seq.m)
        top = min(int(math.floor(top)), x)
        if top < 1:
            continue
        prefix = math.fsum((1.0 / index_values(seq.index, 1, top).astype(np.float64)).tolist())
        k = max(k, prefix / _g_at_least(seq.index, r_prime))
    return K_SAFETY * k


def lower_correction(seq, b, event, r, x):
    """Finite-x allowance on the lower side of the sandwich, for this r only.

    p times the 1/i mass of the indices with C1 i^m < S r (terms with
    |c| > 1/r may still sit below the first S-block there), plus p (1 - p)
    times the 1/i mass of the last digit period (x / b^(1/m), x], which is
    the most a partial block can lag its share.
    """
    p = benford_probability(event)
    reach = (event.value * r / seq.c1) ** (1.0 / seq.m)
    head = index_values(seq.index, 1, min(int(math.ceil(reach)), x)).astype(np.float64)
    head = head[seq.c1 * head ** seq.m < event.value * r]
    bottom = math.fsum((1.0 / head).tolist())
    top = harmonic_mass(seq.index, int(math.floor(x / b ** (1.0 / seq.m))) + 1, x)
    return p * bottom + p * (1.0 - p) * top


def _lemma_chunk(task):
    seq, chunk, event, r = task
    batch = term_batch(seq, chunk)
    total = batch.skipped_harmonic
    if len(batch) == 0:
        return total, 0.0, 0.0
    if batch.exact is not None:
        hit = match_integers(batch.exact, event)
    else:
        matches, near = match_log_magnitudes(batch.log_abs / math.log(event.base), event)
        hit = matches & ~near
    w = 1.0 / batch.indices.astype(np.float64)
    big = np.abs(batch.coefficients) > 1.0 / r
    total += math.fsum(w.tolist())
    return total, math.fsum(w[hit & big].tolist()), math.fsum(w[hit & ~big].tolist())


def lemma_bound_check(seq, b, S, r, x, threads=1):
    """Sandwich the 1/i-sum over terms with |c_i| > 1/r that begin with S."""
    if r < 2:
        raise DomainError(f"r must be >= 2, got {r}")
    if x < 3:
        raise DomainError(f"x must be >= 3, got {x}")
    event = S if not isinstance(S, str) else parse_digit_string(S, b)
    chunks = plan_chunks(seq.index, 1, x, ranked=seq.needs_ranks)
    parts = run_ordered(_lemma_chunk, [(seq, c, event, r) for c in chunks], threads)
    total, middle, small = CompensatedSum(), CompensatedSum(), CompensatedSum()
    for t, m, s in parts:
        total.add(t)
        middle.add(m)
        small.add(s)
    T, mid, small_sum = total.value, middle.value, small.value

    p = benford_probability(event)
    ell = math.log1p(1.0 / r) / math.log(b)
    k = fit_k(seq, b, event, r, x)
    correction = lower_correction(seq, b, event, r, x)
    raw_lower, raw_upper = (p - ell) * T, (p + ell) * T
    lower, upper = raw_lower - correction, raw_upper + k * _g_at_least(seq.index, r)
    lower_holds, upper_holds = lower <= mid, mid <= upper

    mu = seq.coefficient_measure
    small_bound = small_coefficient_mass(mu, r) * T if mu is not None else None
    full = mid + small_sum
    full_upper = upper + (small_bound if small_bound is not None else small_sum)

    report = LemmaReport(
        base=b,
        string=str(event),
        r=r,
        x=x,
        sequence=seq.describe(),
        harmonic_total=T,
        c2_g=seq.index.c2 * seq.index.g(x),
        lower=lower,
        middle=mid,
        upper=upper,
        holds=lower_holds and upper_holds,
        lower_holds=lower_holds,
        upper_holds=upper_holds,
        raw_lower=raw_lower,
        raw_upper=raw_upper,
        holds_without_slack=raw_lower <= mid <= raw_upper,
        lower_correction=correction,
        fitted_K=k,
        small_coefficient_sum=small_sum,
        small_coefficient_bound=small_bound,
        full_sum=full,
        full_lower=lower,
        full_upper=full_upper,
    )
    if report.holds:
        logger.info("lemma r=%d x=%d: %.4f <= %.4f <= %.4f holds", r, x, lower, mid, upper)
    else:
        logger.warning("lemma r=%d x=%d: %.4f <= %.4f <= %.4f fails on the %s side", r, x, lower, mid, upper,
                       report.failed_side)
    return report


def _trend(index, checkpoints, deviations):
    points = [(cp.x, d) for cp, d in zip(checkpoints, deviations) if cp.x >= TREND_FROM]
    if index.g_model is GModel.LOG:
        if len(points) < 3:
            return None
        tail = [d for _, d in points[-3:]]
        return all(later <= earlier + TREND_SLACK for earlier, later in zip(tail, tail[1:]))
    if len(points) < 2:
        return None
    return points[-1][1] < points[0][1]


def run_thm2(seq, b, S, checkpoints=None, x=None, threads=1, lemma_r=10):
    """Logarithmic partial densities along the ladder against log_b(1 + 1/S)."""
    event = S if not isinstance(S, str) else parse_digit_string(S, b)
    if checkpoints is None:
        if x is None:
            raise DomainError("run_thm2 needs checkpoints or x")
        checkpoints = default_ladder(x)
    cps = density_trajectory(seq, event, DensityMode.LOGARITHMIC, checkpoints, threads)
    target = benford_probability(event)
    deviations = [abs(cp.ratio - target) for cp in cps]
    final = cps[-1]
    tolerance = THM2_TOLERANCE[seq.index.g_model]
    report = Thm2Report(
        base=b,
        string=str(event),
        sequence=seq.describe(),
        target=target,
        checkpoints=[cp.to_dict() for cp in cps],
        deviations=deviations,
        final_deviation=deviations[-1],
        tolerance=tolerance,
        passed=deviations[-1] <= tolerance,
        trend_decreasing=_trend(seq.index, cps, deviations),
        c2_estimate=final.totals / seq.index.g(final.x),
        lemma_r=lemma_r,
        fitted_K=fit_k(seq, b, event, lemma_r, final.x),
        thresholds=epsilon_thresholds(b, tolerance).to_dict(),
    )
    logger.info("thm2 base %d string %s: deviation %.5f at x=%d (tolerance %.2f)",
                b, event, report.final_deviation, final.x, tolerance)
    return report


def equidistribution_ks(values, mu, bins=KS_BINS):
    """Sup distance between the binned empirical cdf of `values` and mu's cdf."""
    values = np.asarray(values if isinstance(values, np.ndarray) else list(values), dtype=np.float64)
    if values.size == 0:
        raise DomainError("equidistribution test needs at least one value")
    if np.any(np.abs(values) > 1.0):
        raise DomainError("cos theta values must lie in [-1, 1]")
    counts, edges = np.histogram(values, bins=bins, range=(-1.0, 1.0))
    empirical = np.concatenate(([0.0], np.cumsum(counts) / values.size))
    model = mu.cdf(edges)
    distance = float(np.max(np.abs(empirical - model)))
    return KSResult(distance=distance, resolution=1.0 / bins, samples=int(values.size))


def synthetic_cos_theta(mu, count):
    """mu-equidistributed points inverse_cdf(mu, u_n), n = 1..count."""
    return np.asarray(mu.inverse_cdf(radical_inverse(np.arange(1, count + 1))), dtype=np.float64)


def trace_cos_theta(curve, limit):
    """cos theta_p over the split primes p <= limit."""
    return np.fromiter((rec.cos_theta for rec in cm_traces.trace_table(curve, limit, split_only=True)),
                       dtype=np.float64)


def chebotarev_ratio(disc, x):
    """#split primes <= x over #primes <= x."""
    if x < 10:
        raise DomainError(f"x must be >= 10, got {x}")
    split = primes = 0
    for segment in iter_prime_segments(x):
        primes += int(segment.size)
        split += int(split_mask(disc, segment).sum())
    return split / primes


def epsilon_thresholds(b, eps):
    """Smallest r with log_b(1 + 1/r) < eps, and the x beyond which both error terms drop below eps."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {eps}")
    r = max(2, math.floor(1.0 / (b ** eps - 1.0)) + 1)
    log_r = math.log(r)
    log_x = max(log_r / eps, log_r ** (1.0 / eps))
    try:
        x_min = math.exp(log_x)
    except OverflowError:
        x_min = math.inf
    return EpsilonThresholds(base=b, epsilon=eps, r=r, log_x_min=log_x, x_min=x_min)
