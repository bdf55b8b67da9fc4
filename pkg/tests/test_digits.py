# tests/test_digits.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.ntheory import digits as sympy_digits

from app.digits import (
    DigitString,
    RealTermValue,
    TermKind,
    begins_with,
    benford_probability,
    match_integers,
    match_log_magnitudes,
    parse_digit_string,
    to_digits,
)
from app.errors import DigitParseError, DomainError


def test_parse_values():
    assert parse_digit_string("1", 10).value == 1
    assert parse_digit_string("10", 2).value == 2
    assert parse_digit_string("fF", 16).value == 255
    assert parse_digit_string("+/", 64).value == 62 * 64 + 63
    assert str(parse_digit_string("Ab", 16)) == "ab"


@pytest.mark.parametrize("text, base", [("", 10), ("0", 10), ("01", 10), ("a", 10), ("2", 2), ("1", 1), ("1", 65)])
def test_parse_rejects(text, base):
    with pytest.raises(DigitParseError):
        parse_digit_string(text, base)


def test_parse_error_is_a_value_error():
    with pytest.raises(ValueError):
        DigitString(10, (0, 1))


def test_log_window_of_one():
    lo, hi = parse_digit_string("1", 10).log_window
    assert lo == 0.0
    assert hi == pytest.approx(math.log10(2))


def test_begins_with_examples():
    assert begins_with(2, parse_digit_string("1", 2))
    assert not begins_with(9, parse_digit_string("1", 10))
    assert begins_with(-1234, parse_digit_string("12", 10))
    assert begins_with(0.00123, parse_digit_string("12", 10))
    assert begins_with(-7.55e300, parse_digit_string("75", 10))


def test_short_integers_pad_with_zeros():
    assert begins_with(1, parse_digit_string("10", 10))
    assert not begins_with(1, parse_digit_string("12", 10))
    assert begins_with(2, parse_digit_string("10", 2))


def test_zero_and_bool_are_rejected():
    with pytest.raises(DomainError):
        begins_with(0, parse_digit_string("1", 10))
    with pytest.raises(DomainError):
        begins_with(0.0, parse_digit_string("1", 10))
    with pytest.raises(DomainError):
        begins_with(True, parse_digit_string("1", 10))


def test_scaled_value_on_a_boundary_is_flagged():
    verdict = begins_with(2.0, parse_digit_string("1", 10))
    assert verdict.near_boundary


def test_exact_value_is_never_flagged():
    verdict = begins_with(2, parse_digit_string("1", 10))
    assert not verdict.near_boundary
    assert not verdict.matches


def test_term_values():
    assert RealTermValue.exact(-12).negative
    assert RealTermValue.scaled(0.75).kind is TermKind.SCALED
    huge = RealTermValue.from_log2(5000.0)
    assert huge.log_abs(2) == pytest.approx(5000.0)
    assert begins_with(huge, parse_digit_string("1", 2))
    with pytest.raises(DomainError):
        RealTermValue.exact(0)


def test_benford_oracle_sums_to_one():
    for b in range(2, 65):
        total = math.fsum(benford_probability(DigitString(b, (s,))) for s in range(1, b))
        assert abs(total - 1.0) < 1e-12


def test_benford_headline_values():
    assert benford_probability(parse_digit_string("1", 10)) == pytest.approx(0.30103, abs=1e-5)
    assert benford_probability(parse_digit_string("9", 10)) == pytest.approx(0.045757, abs=1e-6)


def _reference(n, event):
    """Prefix test on the rendered digits, padding short numbers with zeros."""
    rendered = sympy_digits(n, event.base)[1:]
    rendered = (rendered + [0] * event.length)[:event.length]
    return tuple(rendered) == event.digits


@settings(max_examples=300, deadline=None)
@given(n=st.integers(min_value=1, max_value=10**30),
       base=st.sampled_from([2, 3, 10, 16]),
       prefix=st.integers(min_value=1, max_value=999))
def test_begins_with_agrees_with_rendered_prefix(n, base, prefix):
    event = DigitString(base, tuple(to_digits(prefix, base)))
    assert begins_with(n, event).matches == _reference(n, event)
    assert begins_with(-n, event).matches == _reference(n, event)


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.integers(min_value=1, max_value=10**15), min_size=1, max_size=200),
       base=st.sampled_from([2, 3, 10, 16]))
def test_match_integers_matches_scalar_test(values, base):
    event = parse_digit_string("1", base) if base != 2 else parse_digit_string("11", 2)
    arr = np.array(values, dtype=np.int64)
    expected = [begins_with(v, event).matches for v in values]
    assert match_integers(arr, event).tolist() == expected
    assert match_integers(-arr, event).tolist() == expected


def test_match_integers_rejects_zero():
    with pytest.raises(DomainError):
        match_integers(np.array([1, 0]), parse_digit_string("1", 10))


def test_match_log_magnitudes_flags_edges():
    event = parse_digit_string("1", 10)
    matches, near = match_log_magnitudes(np.array([math.log10(2.0), 0.1, 3.5, 7.0]), event)
    assert near.tolist() == [True, False, False, True]
    assert matches.tolist()[1:3] == [True, False]


def test_to_digits():
    assert to_digits(255, 16) == [15, 15]
    assert to_digits(5, 2) == [1, 0, 1]
    with pytest.raises(DomainError):
        to_digits(0, 10)
