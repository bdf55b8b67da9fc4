# tests/test_measures.py
import math

import numpy as np
import pytest
from scipy.integrate import quad

from app.errors import DomainError
from app.measures import (
    ARCSINE_CM,
    SEMICIRCLE,
    UNIFORM,
    Variant,
    cdf,
    convexity_check,
    interval_mass,
    inverse_cdf,
    measure_by_name,
    small_coefficient_mass,
    symmetry_defect,
    thm1_interval_inequality,
)

MEASURES = [ARCSINE_CM, SEMICIRCLE, UNIFORM]


@pytest.mark.parametrize("mu", MEASURES)
def test_cdf_endpoints_and_centre(mu):
    assert cdf(mu, -1.0) == pytest.approx(0.0, abs=1e-15)
    assert cdf(mu, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert cdf(mu, 1.0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("mu", MEASURES)
def test_inverse_cdf_inverts(mu):
    t = np.linspace(-0.99, 0.99, 199)
    assert np.allclose(inverse_cdf(mu, cdf(mu, t)), t, atol=1e-9)
    assert inverse_cdf(mu, 0.5) == 0.0


def test_semicircle_cdf_matches_quadrature():
    density = lambda t: 2.0 / math.pi * math.sqrt(1.0 - t * t)
    for t in (-0.7, -0.1, 0.3, 0.95):
        expected, _ = quad(density, -1.0, t)
        assert cdf(SEMICIRCLE, t) == pytest.approx(expected, abs=1e-9)


def test_arcsine_interval_mass_matches_quadrature():
    density = lambda t: 1.0 / (math.pi * math.sqrt(1.0 - t * t))
    expected, _ = quad(density, 0.2, 0.6)
    assert interval_mass(ARCSINE_CM, 0.2, 0.6) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("mu", MEASURES)
def test_symmetry(mu):
    assert symmetry_defect(mu, 10**4) < 1e-12


@pytest.mark.parametrize("gridpoints", [10, 100, 1000, 10**4])
def test_arcsine_half_mass_is_strictly_convex(gridpoints):
    assert convexity_check(ARCSINE_CM, gridpoints)


def test_convexity():
    assert not convexity_check(SEMICIRCLE, 10**4)
    assert not convexity_check(UNIFORM, 10**4)
    with pytest.raises(DomainError):
        convexity_check(ARCSINE_CM, 2)


@pytest.mark.parametrize("variant", [Variant.GENERAL, Variant.BINARY])
def test_interval_inequality_on_sampled_points(variant):
    xs = (np.arange(1, 1001) - 0.5) / 1000.0
    assert all(thm1_interval_inequality(ARCSINE_CM, float(x), variant) for x in xs)


def test_interval_inequality_fails_for_uniform():
    # equal lengths under an affine cdf
    assert not thm1_interval_inequality(UNIFORM, 0.5)


def test_interval_inequality_domain():
    with pytest.raises(DomainError):
        thm1_interval_inequality(ARCSINE_CM, 0.0)
    with pytest.raises(DomainError):
        thm1_interval_inequality(ARCSINE_CM, 1.5)


def test_out_of_domain_arguments():
    with pytest.raises(DomainError):
        cdf(ARCSINE_CM, 1.5)
    with pytest.raises(DomainError):
        inverse_cdf(ARCSINE_CM, -0.1)
    with pytest.raises(DomainError):
        interval_mass(ARCSINE_CM, 0.5, 0.2)


def test_small_coefficient_mass():
    assert small_coefficient_mass(ARCSINE_CM, 2) == pytest.approx(1.0 / 3.0)
    assert small_coefficient_mass(UNIFORM, 4) == pytest.approx(0.25)


def test_variant_for_base():
    assert Variant.for_base(2) is Variant.BINARY
    assert Variant.for_base(10) is Variant.GENERAL


def test_measure_by_name():
    assert measure_by_name("arcsine-cm") == ARCSINE_CM
    with pytest.raises(DomainError):
        measure_by_name("cauchy")
