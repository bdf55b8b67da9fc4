# app/run_config.py
"""Validated run configuration shared by every command."""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import cm_traces
from .density import MAX_WINDOW_INDEX, window_reach
from .digits import MAX_BASE, MIN_BASE, parse_digit_string
from .errors import DomainError
from .measures import ARCSINE_CM, SEMICIRCLE, UNIFORM
from .sequences import NATURALS, PRIMES, IndexKind, SequenceSpec, split_primes_index

SEQUENCES = (
    'synthetic-cm',
    'synthetic-semicircle',
    'synthetic-uniform',
    'naturals-identity',
    'primes-identity',
    'benford-control',
    'trace-32a',
    'trace-27a',
)
INDEX_SETS = ('naturals', 'primes', 'split-4', 'split-3')
DEFAULT_N_RANGE = (6, 10)

_MEASURES = {
    'synthetic-cm': ARCSINE_CM,
    'synthetic-semicircle': SEMICIRCLE,
    'synthetic-uniform': UNIFORM,
}


def index_set(name):
    if name == 'naturals':
        return NATURALS
    if name == 'primes':
        return PRIMES
    return split_primes_index(-int(name.removeprefix('split-')))


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    command: Literal['traces', 'thm1', 'thm2', 'lemma', 'equidist', 'density']
    sequence: Literal[SEQUENCES] = 'synthetic-cm'
    curve: str | None = None
    index: Literal[INDEX_SETS] = 'naturals'
    c1: float = Field(2.0, gt=0)
    m: float = Field(1.0, gt=0)
    bases: tuple[int, ...] = (10,)
    strings: tuple[str, ...] | None = None
    x: int | None = Field(None, ge=1)
    x_limit_max: int = 10**8
    n_range: tuple[int, int] | None = None
    r_values: tuple[int, ...] = (10,)
    mode: Literal['arithmetic', 'logarithmic'] = 'logarithmic'
    threads: int = Field(1, ge=1)
    out: str = 'out'
    label: str | None = None

    @field_validator('bases')
    @classmethod
    def _bases_in_range(cls, bases):
        if not bases:
            raise ValueError('at least one base is required')
        for b in bases:
            if not MIN_BASE <= b <= MAX_BASE:
                raise ValueError(f'base {b} outside [{MIN_BASE}, {MAX_BASE}]')
        return bases

    @field_validator('r_values')
    @classmethod
    def _r_at_least_two(cls, r_values):
        if any(r < 2 for r in r_values):
            raise ValueError('r must be >= 2')
        return r_values

    @field_validator('n_range')
    @classmethod
    def _ordered_range(cls, n_range):
        if n_range is not None and not 0 <= n_range[0] <= n_range[1]:
            raise ValueError(f'n-range {n_range[0]}..{n_range[1]} is not ordered')
        return n_range

    @field_validator('curve')
    @classmethod
    def _known_curve(cls, curve):
        if curve is not None:
            try:
                cm_traces.curve_by_id(curve)
            except DomainError as exc:
                raise ValueError(str(exc)) from None
        return curve

    @model_validator(mode='after')
    def _check_limits(self):
        if self.x is not None and self.x > self.x_limit_max:
            raise ValueError(f'x = {self.x} exceeds the guardrail {self.x_limit_max}')
        for b in self.bases:
            for s in self.strings or ():
                try:
                    parse_digit_string(s, b)
                except DomainError as exc:
                    raise ValueError(str(exc)) from None
        return self

    @model_validator(mode='after')
    def _check_window_reach(self):
        if self.command != 'thm1':
            return self
        is_trace = self.sequence.startswith('trace-')
        if self.n_range is None and is_trace:
            return self
        n = (self.n_range or DEFAULT_N_RANGE)[1]
        seq = self.sequence_spec()
        # ranks and traces off the naturals need a sieve up to the window
        limit = MAX_WINDOW_INDEX if seq.index.kind is IndexKind.NATURALS else self.x_limit_max
        for b in self.bases:
            try:
                reach = window_reach(b, n, seq.c1, seq.m)
            except OverflowError:
                reach = math.inf
            if reach > limit:
                raise ValueError(f'window order n = {n} in base {b} reaches i = {reach}, past the guardrail {limit}')
        return self

    def events(self, base):
        return [parse_digit_string(s, base) for s in self.strings or ('1',)]

    def sequence_spec(self):
        name = self.sequence
        if name in _MEASURES:
            return SequenceSpec.synthetic(_MEASURES[name], index_set(self.index), self.c1, self.m)
        if name == 'naturals-identity':
            return SequenceSpec.identity(NATURALS)
        if name == 'primes-identity':
            return SequenceSpec.identity(PRIMES)
        if name == 'benford-control':
            return SequenceSpec.benford(self.bases[0], index_set(self.index), self.c1, self.m)
        return SequenceSpec.cm(cm_traces.curve_by_id(name.removeprefix('trace-')))

    def params(self):
        """The configuration as embedded in reports; excludes what may not change results."""
        return self.model_dump(mode='json', exclude={'threads', 'out', 'label', 'x_limit_max'})
