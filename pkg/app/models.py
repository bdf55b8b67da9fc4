# app/models.py
"""Result records produced by the density estimators and the experiment harness."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum


class Verdict(str, Enum):
    CONTRADICTION = "contradiction-demonstrated"
    INCONCLUSIVE = "inconclusive"


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


class Record:
    def to_dict(self):
        return _plain(asdict(self))


@dataclass(frozen=True)
class Checkpoint(Record):
    x: int
    mode: str
    base: int
    string: str
    hits: float
    totals: float
    ratio: float
    flagged: int
    skipped: int
    terms: int


@dataclass(frozen=True)
class WindowDensity(Record):
    kind: str
    n: int
    i_lo: int
    i_hi: int
    evaluated: int
    hits: int
    density: float
    flagged: int
    sampled: bool


@dataclass(frozen=True)
class SeriesBounds(Record):
    base: int
    lower: float
    upper: float
    terms: int


@dataclass
class Thm1Report(Record):
    base: int
    string: str
    sequence: dict
    L: float
    U: float
    benford_value: float
    lower_minus_benford: float
    upper_minus_benford: float
    lower_windows: list = field(default_factory=list)
    upper_windows: list = field(default_factory=list)
    separation: float | None = None
    within_bands: bool = False
    verdict: Verdict = Verdict.INCONCLUSIVE
    diagnostic: str = ""
    separations_by_base: list = field(default_factory=list)


@dataclass
class Thm2Report(Record):
    base: int
    string: str
    sequence: dict
    target: float
    checkpoints: list
    deviations: list
    final_deviation: float
    tolerance: float
    passed: bool
    trend_decreasing: bool | None
    c2_estimate: float
    lemma_r: int
    fitted_K: float
    thresholds: dict


@dataclass
class LemmaReport(Record):
    base: int
    string: str
    r: int
    x: int
    sequence: dict
    harmonic_total: float
    c2_g: float
    lower: float
    middle: float
    upper: float
    holds: bool
    lower_holds: bool
    upper_holds: bool
    raw_lower: float
    raw_upper: float
    holds_without_slack: bool
    lower_correction: float
    fitted_K: float
    small_coefficient_sum: float
    small_coefficient_bound: float | None
    full_sum: float
    full_lower: float
    full_upper: float

    @property
    def failed_side(self):
        if self.holds:
            return None
        if not self.lower_holds:
            return "lower" if self.upper_holds else "both"
        return "upper"


@dataclass(frozen=True)
class KSResult(Record):
    distance: float
    resolution: float
    samples: int


@dataclass(frozen=True)
class EpsilonThresholds(Record):
    base: int
    epsilon: float
    r: int
    log_x_min: float
    x_min: float
