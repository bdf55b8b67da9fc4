# app/commands.py
"""Command-line surface: traces, thm1, thm2, lemma, equidist and density.

Exit codes: 0 success, 1 inconclusive or failed tolerance, 2 bad
configuration, 3 integrity failure (Hasse bound or point-count oracle).
"""

import functools
import logging
import time
from decimal import Decimal, InvalidOperation

import click
from dotenv import dotenv_values
from flask import Blueprint, current_app
from pydantic import ValidationError

from . import cm_traces, experiments, reports
from .density import DensityMode, consistency_gap, default_ladder, density_trajectory
from .errors import DomainError, IntegrityError, OracleMismatchError
from .models import Verdict
from .run_config import DEFAULT_N_RANGE, INDEX_SETS, SEQUENCES, RunConfig

bp = Blueprint('experiments', __name__, cli_group=None)
logger = logging.getLogger(__name__)

KS_TOLERANCE = 0.01
MULTI_KEYS = {'bases', 'strings', 'r_values'}
CONFIG_ALIASES = {'base': 'bases', 'string': 'strings', 'r': 'r_values', 'seq': 'sequence', 'n': 'n_range'}


class SciInt(click.ParamType):
    """Integers written plainly or in scientific notation (1e7)."""

    name = 'integer'

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            return value
        try:
            number = Decimal(str(value).strip())
        except InvalidOperation:
            self.fail(f'{value!r} is not a number', param, ctx)
        if number != number.to_integral_value():
            self.fail(f'{value!r} is not an integer', param, ctx)
        return int(number)


class NRange(click.ParamType):
    """An order range written lo..hi."""

    name = 'range'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        lo, sep, hi = str(value).partition('..')
        try:
            return (int(lo), int(hi)) if sep else (int(lo), int(lo))
        except ValueError:
            self.fail(f'{value!r} is not of the form lo..hi', param, ctx)


def _load_config_file(ctx, param, path):
    if not path:
        return
    values = {}
    for key, raw in dotenv_values(path).items():
        key = key.strip().lower().replace('-', '_')
        key = CONFIG_ALIASES.get(key, key)
        if raw is None:
            continue
        values[key] = [v.strip() for v in raw.split(',')] if key in MULTI_KEYS else raw
    ctx.default_map = {**(ctx.default_map or {}), **values}


def common_options(func):
    options = [
        click.option('--config', type=click.Path(exists=True, dir_okay=False), is_eager=True,
                     expose_value=False, callback=_load_config_file,
                     help='key=value file of option defaults; flags override it.'),
        click.option('--threads', type=int, default=None, help='Worker processes (default: config THREADS).'),
        click.option('--out', type=click.Path(file_okay=False), default=None, help='Output root directory.'),
        click.option('--label', default=None, help='Run directory name (default: UTC timestamp).'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def sequence_options(func):
    options = [
        click.option('--seq', 'sequence', type=click.Choice(SEQUENCES), default='synthetic-cm'),
        click.option('--index', type=click.Choice(INDEX_SETS), default='naturals',
                     help='Index set of synthetic and control sequences.'),
        click.option('--c1', type=float, default=2.0),
        click.option('--m', type=float, default=1.0),
        click.option('--base', 'bases', type=int, multiple=True),
        click.option('--string', 'strings', multiple=True),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def guarded(func):
    """Map library errors onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except ValidationError as exc:
            messages = '; '.join(err['msg'] for err in exc.errors())
            raise click.UsageError(messages, ctx) from None
        except DomainError as exc:
            raise click.UsageError(str(exc), ctx) from None
        except IntegrityError as exc:
            logger.error("integrity failure: %s", exc)
            click.echo(f'integrity failure: {exc}', err=True)
            ctx.exit(3)

    return wrapper


def build_config(command, **values):
    cfg = current_app.config
    values = {k: v for k, v in values.items() if v is not None and v != ()}
    values.setdefault('threads', cfg['THREADS'])
    values.setdefault('out', cfg['OUTPUT_DIR'])
    return RunConfig(command=command, x_limit_max=cfg['X_LIMIT_MAX'], **values)


def _finish(directory, started, code):
    reports.write_timing(directory, time.perf_counter() - started)
    click.echo(f'report: {directory}')
    if code:
        click.get_current_context().exit(code)


@bp.cli.command('traces')
@click.option('--curve', required=True, help='32a or 27a.')
@click.option('--limit', type=SciInt(), default='1e6', show_default=True)
@click.option('--split-only', is_flag=True, help='Skip inert primes (whose trace is 0).')
@common_options
@guarded
def cmd_traces(curve, limit, split_only, threads, out, label):
    """Write the Frobenius trace table of a CM curve."""
    started = time.perf_counter()
    run = build_config('traces', curve=curve, x=limit, threads=threads, out=out, label=label)
    spec = cm_traces.curve_by_id(run.curve)

    cfg = current_app.config
    verify_below = min(cfg['ORACLE_VERIFY_LIMIT'], cfg['ORACLE_LIMIT'], limit + 1)
    mismatches = cm_traces.verify_against_oracle(spec, verify_below)
    if mismatches:
        raise OracleMismatchError(f'curve-{spec.id.value}: traces disagree with point counts at p={mismatches[:5]}')

    directory = reports.run_directory(run.out, 'traces', run.label)
    rows = reports.write_traces(f'{directory}/traces.csv', cm_traces.trace_table(spec, limit, split_only))
    reports.write_report(directory, 'traces', run.params(), {
        'curve': spec.id.value,
        'cm_field_disc': spec.cm_field_disc,
        'level': spec.level,
        'rows': rows,
        'oracle_checked_below': verify_below,
    })
    click.echo(f'curve-{spec.id.value}: {rows} traces up to {limit}')
    _finish(directory, started, 0)


@bp.cli.command('thm1')
@sequence_options
@click.option('--n', 'n_range', type=NRange(), default=None, help='Window orders lo..hi.')
@click.option('--x', type=SciInt(), default=None, help='Index ceiling for trace windows.')
@click.option('--max-window-terms', type=SciInt(), default=None)
@common_options
@guarded
def cmd_thm1(sequence, index, c1, m, bases, strings, n_range, x, max_window_terms, threads, out, label):
    """Window densities against the series bounds L and U."""
    started = time.perf_counter()
    run = build_config('thm1', sequence=sequence, index=index, c1=c1, m=m, bases=bases, strings=strings,
                       n_range=n_range, x=x, threads=threads, out=out, label=label)
    seq = run.sequence_spec()
    max_terms = max_window_terms or current_app.config['MAX_WINDOW_TERMS']
    directory = reports.run_directory(run.out, 'thm1', run.label)

    results = []
    for b in run.bases:
        event = run.events(b)[0] if run.strings else experiments.default_event(b)
        orders = _window_orders(run, seq, b)
        report = experiments.run_thm1(seq, b, orders, event, max_terms, run.threads)
        reports.write_windows(directory, report.lower_windows + report.upper_windows, f'windows-b{b}.csv')
        results.append(report.to_dict())
        click.echo(f'base {b}: L={report.L:.4f} U={report.U:.4f} {report.verdict.value}')

    reports.write_report(directory, 'thm1', run.params(), {'results': results, 'max_window_terms': max_terms})
    demonstrated = all(r['verdict'] == Verdict.CONTRADICTION.value for r in results)
    _finish(directory, started, 0 if demonstrated else 1)


def _window_orders(run, seq, b):
    if run.n_range is not None:
        return range(run.n_range[0], run.n_range[1] + 1)
    if seq.curve is not None:
        limit = run.x or current_app.config['X_LIMIT_MAX']
        return experiments.feasible_window_orders(seq, b, limit)
    return range(DEFAULT_N_RANGE[0], DEFAULT_N_RANGE[1] + 1)


@bp.cli.command('thm2')
@sequence_options
@click.option('--x', type=SciInt(), default='1e6', show_default=True)
@click.option('--lemma-r', type=int, default=10, show_default=True)
@common_options
@guarded
def cmd_thm2(sequence, index, c1, m, bases, strings, x, lemma_r, threads, out, label):
    """Logarithmic partial densities along the checkpoint ladder."""
    started = time.perf_counter()
    run = build_config('thm2', sequence=sequence, index=index, c1=c1, m=m, bases=bases, strings=strings,
                       x=x, r_values=(lemma_r,), threads=threads, out=out, label=label)
    seq = run.sequence_spec()
    directory = reports.run_directory(run.out, 'thm2', run.label)

    results = []
    for b in run.bases:
        for event in run.events(b):
            report = experiments.run_thm2(seq, b, event, default_ladder(run.x), threads=run.threads,
                                          lemma_r=lemma_r)
            reports.write_checkpoints(directory, report.checkpoints, f'checkpoints-b{b}-{event}.csv')
            results.append(report.to_dict())
            click.echo(f'base {b} string {event}: deviation {report.final_deviation:.5f} '
                       f'({"pass" if report.passed else "fail"})')

    reports.write_report(directory, 'thm2', run.params(), {'results': results})
    _finish(directory, started, 0 if all(r['passed'] for r in results) else 1)


@bp.cli.command('lemma')
@sequence_options
@click.option('--r', 'r_values', type=int, multiple=True)
@click.option('--x', type=SciInt(), default='1e6', show_default=True)
@common_options
@guarded
def cmd_lemma(sequence, index, c1, m, bases, strings, r_values, x, threads, out, label):
    """Sandwich check of the truncated 1/i-sums."""
    started = time.perf_counter()
    run = build_config('lemma', sequence=sequence, index=index, c1=c1, m=m, bases=bases, strings=strings,
                       r_values=r_values, x=x, threads=threads, out=out, label=label)
    seq = run.sequence_spec()
    directory = reports.run_directory(run.out, 'lemma', run.label)

    results = []
    for b in run.bases:
        for event in run.events(b):
            for r in run.r_values:
                report = experiments.lemma_bound_check(seq, b, event, r, run.x, run.threads)
                results.append(report.to_dict())
                verdict = 'holds' if report.holds else f'fails ({report.failed_side} bound)'
                click.echo(f'base {b} string {event} r={r}: {report.lower:.4f} <= {report.middle:.4f} '
                           f'<= {report.upper:.4f} K={report.fitted_K:.4f} {verdict}')

    reports.write_report(directory, 'lemma', run.params(), {'results': results})
    _finish(directory, started, 0 if all(r['holds'] for r in results) else 1)


@bp.cli.command('equidist')
@click.option('--seq', 'sequence', type=click.Choice(SEQUENCES), default='trace-32a')
@click.option('--x', type=SciInt(), default='1e6', show_default=True)
@common_options
@guarded
def cmd_equidist(sequence, x, threads, out, label):
    """Sup distance of cos theta against the arcsine law, and the splitting ratios."""
    started = time.perf_counter()
    run = build_config('equidist', sequence=sequence, x=x, threads=threads, out=out, label=label)
    seq = run.sequence_spec()
    if seq.curve is not None:
        values = experiments.trace_cos_theta(seq.curve, run.x)
        mu = seq.coefficient_measure
    elif seq.measure is not None:
        mu = seq.measure
        values = experiments.synthetic_cos_theta(mu, run.x)
    else:
        raise DomainError(f'{sequence} has no cos theta values')
    ks = experiments.equidistribution_ks(values, mu)
    chebotarev = {str(disc): experiments.chebotarev_ratio(disc, max(run.x, 10)) for disc in (-4, -3)}

    directory = reports.run_directory(run.out, 'equidist', run.label)
    reports.write_report(directory, 'equidist', run.params(), {
        'measure': mu.name,
        'ks': ks.to_dict(),
        'tolerance': KS_TOLERANCE,
        'passed': ks.distance <= KS_TOLERANCE,
        'chebotarev': chebotarev,
    })
    click.echo(f'{sequence}: sup distance {ks.distance:.5f} over {ks.samples} values')
    _finish(directory, started, 0 if ks.distance <= KS_TOLERANCE else 1)


@bp.cli.command('density')
@sequence_options
@click.option('--mode', type=click.Choice([m.value for m in DensityMode]), default='logarithmic')
@click.option('--x', type=SciInt(), default='1e6', show_default=True)
@common_options
@guarded
def cmd_density(sequence, index, c1, m, bases, strings, mode, x, threads, out, label):
    """Partial density trajectory of one sequence."""
    started = time.perf_counter()
    run = build_config('density', sequence=sequence, index=index, c1=c1, m=m, bases=bases, strings=strings,
                       mode=mode, x=x, threads=threads, out=out, label=label)
    seq = run.sequence_spec()
    directory = reports.run_directory(run.out, 'density', run.label)

    results = []
    for b in run.bases:
        for event in run.events(b):
            cps = density_trajectory(seq, event, DensityMode(run.mode), default_ladder(run.x), run.threads)
            reports.write_checkpoints(directory, cps, f'checkpoints-b{b}-{event}.csv')
            results.append({
                'base': b,
                'string': str(event),
                'checkpoints': [cp.to_dict() for cp in cps],
                'consistency_gap': consistency_gap(seq, event, run.x, run.threads),
            })
            click.echo(f'base {b} string {event}: {run.mode} density {cps[-1].ratio:.5f} at x={run.x}')

    reports.write_report(directory, 'density', run.params(), {'results': results})
    _finish(directory, started, 0)
