# app/reports.py
"""Report artefacts: report.json, the CSV tables, and timing.json.

Everything that reaches report.json is a pure function of the run
configuration, so equal configurations give byte-identical files.
"""

import json
import logging
import os
from datetime import datetime, timezone

import pandas as pd

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

CHECKPOINT_COLUMNS = ['x', 'mode', 'base', 'string', 'hits', 'totals', 'ratio', 'flagged']
TRACE_COLUMNS = ['p', 'a_p', 'cos_theta']
TERM_COLUMNS = ['i', 'c_i', 'a_i_repr']
WINDOW_COLUMNS = ['kind', 'n', 'i_lo', 'i_hi', 'evaluated', 'hits', 'density', 'flagged', 'sampled']


def run_directory(output_dir, command, label=None):
    """<output_dir>/<command>/<label or UTC timestamp>/, created on demand."""
    label = label or datetime.now(timezone.utc).strftime('%Y%m%dT%H%M%S%fZ')
    path = os.path.join(output_dir, command, label)
    os.makedirs(path, exist_ok=True)
    return path


def write_report(directory, experiment, config, body):
    payload = {
        'experiment': experiment,
        'schema_version': SCHEMA_VERSION,
        'params': config,
        **body,
    }
    path = os.path.join(directory, 'report.json')
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, allow_nan=True)
        fh.write('\n')
    logger.info("wrote %s", path)
    return path


def write_timing(directory, runtime_seconds):
    path = os.path.join(directory, 'timing.json')
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump({'runtime_seconds': round(runtime_seconds, 3)}, fh)
        fh.write('\n')
    return path


def _write_frame(directory, name, rows, columns):
    path = os.path.join(directory, name)
    df = pd.DataFrame(list(rows), columns=columns)
    df.to_csv(path, index=False, float_format='%.12g')
    return path


def write_checkpoints(directory, checkpoints, name='checkpoints.csv'):
    rows = [cp.to_dict() if hasattr(cp, 'to_dict') else cp for cp in checkpoints]
    return _write_frame(directory, name, ([r[c] for c in CHECKPOINT_COLUMNS] for r in rows),
                        CHECKPOINT_COLUMNS)


def write_windows(directory, windows, name='windows.csv'):
    return _write_frame(directory, name, ([w[c] for c in WINDOW_COLUMNS] for w in windows), WINDOW_COLUMNS)


def write_traces(path, records, batch_size=50_000):
    """Stream TraceRecords to CSV in batches; returns the number of rows written."""
    pd.DataFrame(columns=TRACE_COLUMNS).to_csv(path, index=False)
    written = 0
    batch = []
    for rec in records:
        batch.append((rec.p, rec.a_p, rec.cos_theta))
        if len(batch) >= batch_size:
            written += _append(path, batch, TRACE_COLUMNS)
            batch = []
    if batch:
        written += _append(path, batch, TRACE_COLUMNS)
    return written


def write_terms(path, terms):
    rows = [(t.i, t.c, str(t.a)) for t in terms]
    pd.DataFrame(rows, columns=TERM_COLUMNS).to_csv(path, index=False, float_format='%.17g')
    return len(rows)


def _append(path, rows, columns):
    pd.DataFrame(rows, columns=columns).to_csv(path, mode='a', header=False, index=False,
                                               float_format='%.17g')
    return len(rows)
