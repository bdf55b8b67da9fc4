# app/measures.py
"""Symmetric probability measures on [-1, 1] given by closed-form CDFs."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import DomainError

CONVEXITY_EPS = 1e-15
STRICT_RELATIVE = 1e-12
_BISECTION_STEPS = 56


class MeasureKind(str, Enum):
    ARCSINE_CM = "arcsine-cm"
    SEMICIRCLE = "semicircle"
    UNIFORM = "uniform"


_DESCRIPTIONS = {
    MeasureKind.ARCSINE_CM: "dmu = (1/pi) dt / sqrt(1 - t^2)",
    MeasureKind.SEMICIRCLE: "dmu = (2/pi) sqrt(1 - t^2) dt",
    MeasureKind.UNIFORM: "dmu = dt / 2",
}


class Variant(str, Enum):
    """Interval pairs of the window argument: b >= 3 uses b^-j, b = 2 uses 4^-j."""

    GENERAL = "b>=3"
    BINARY = "b=2"

    @property
    def lower_interval(self):
        return (Fraction(23, 40), Fraction(1)) if self is Variant.GENERAL else (Fraction(11, 15), Fraction(1))

    @property
    def upper_interval(self):
        return (Fraction(3, 8), Fraction(4, 5)) if self is Variant.GENERAL else (Fraction(2, 5), Fraction(2, 3))

    @classmethod
    def for_base(cls, base):
        return cls.BINARY if base == 2 else cls.GENERAL


def _as_array(values, lo, hi, what):
    arr = np.asarray(values, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"{what} must lie in [{lo}, {hi}]")
    return arr


def _unwrap(arr):
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class MeasureSpec:
    kind: MeasureKind

    @property
    def density_description(self):
        return _DESCRIPTIONS[self.kind]

    @property
    def name(self):
        return self.kind.value

    def half_mass(self, t):
        """mu([0, t]) for t in [0, 1]; vectorised."""
        t = _as_array(t, 0.0, 1.0, "t")
        if self.kind is MeasureKind.ARCSINE_CM:
            out = np.arcsin(t) / np.pi
        elif self.kind is MeasureKind.SEMICIRCLE:
            out = (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / np.pi
        else:
            out = t / 2.0
        return _unwrap(out)

    def cdf(self, t):
        t = _as_array(t, -1.0, 1.0, "t")
        if self.kind is MeasureKind.ARCSINE_CM:
            out = 0.5 + np.arcsin(t) / np.pi
        elif self.kind is MeasureKind.SEMICIRCLE:
            out = 0.5 + (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / np.pi
        else:
            out = (t + 1.0) / 2.0
        return _unwrap(out)

    def inverse_cdf(self, u):
        u = _as_array(u, 0.0, 1.0, "u")
        if self.kind is MeasureKind.ARCSINE_CM:
            out = np.sin(np.pi * (u - 0.5))
        elif self.kind is MeasureKind.UNIFORM:
            out = 2.0 * u - 1.0
        else:
            out = self._bisect(u)
        return _unwrap(out)

    def _bisect(self, u):
        # solve on [0, 1] for the upper half and reflect: keeps inverse_cdf odd about 1/2
        v = np.maximum(u, 1.0 - u)
        lo = np.zeros_like(v)
        hi = np.ones_like(v)
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < v
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        t = 0.5 * (lo + hi)
        t = np.where(v == 0.5, 0.0, t)
        return np.where(u < 0.5, -t, t)


ARCSINE_CM = MeasureSpec(MeasureKind.ARCSINE_CM)
SEMICIRCLE = MeasureSpec(MeasureKind.SEMICIRCLE)
UNIFORM = MeasureSpec(MeasureKind.UNIFORM)


def measure_by_name(name):
    try:
        return MeasureSpec(MeasureKind(name))
    except ValueError:
        raise DomainError(f"unknown measure {name!r}") from None


def cdf(mu, t):
    return mu.cdf(t)


def inverse_cdf(mu, u):
    return mu.inverse_cdf(u)


def interval_mass(mu, a, b):
    if a > b:
        raise DomainError(f"empty interval [{a}, {b}]")
    return mu.cdf(float(b)) - mu.cdf(float(a))


def symmetry_defect(mu, gridpoints=1000):
    t = np.linspace(0.0, 1.0, gridpoints)
    return float(np.max(np.abs(mu.cdf(-t) + mu.cdf(t) - 1.0)))


def convexity_check(mu, gridpoints):
    """True iff t -> mu([0, t]) has strictly positive second differences on (0, 1)."""
    if gridpoints < 3:
        raise DomainError("convexity check needs at least 3 grid points")
    t = np.arange(1, gridpoints + 1, dtype=np.float64) / (gridpoints + 1)
    f = mu.half_mass(t)
    second = f[2:] - 2.0 * f[1:-1] + f[:-2]
    return bool(np.all(second > CONVEXITY_EPS * float(np.max(np.abs(f)))))


def strictly_greater(left, right):
    return left - right > STRICT_RELATIVE * (abs(left) + abs(right))


def thm1_interval_inequality(mu, x, variant=Variant.GENERAL):
    """mu([l x, x]) > mu([u x, v x]) for the interval pair of `variant`."""
    if not 0.0 < x <= 1.0:
        raise DomainError(f"x must lie in (0, 1], got {x}")
    variant = Variant(variant)
    (la, lb), (ua, ub) = variant.lower_interval, variant.upper_interval
    lower = interval_mass(mu, float(la) * x, float(lb) * x)
    upper = interval_mass(mu, float(ua) * x, float(ub) * x)
    return strictly_greater(lower, upper)


def small_coefficient_mass(mu, r):
    """2 mu([0, 1/r]): mass of |c| <= 1/r under a symmetric measure."""
    return 2.0 * mu.half_mass(1.0 / r)
