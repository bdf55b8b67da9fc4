# generate_data.py
import os
import sys

from app.cm_traces import CURVE_27A, CURVE_32A, trace_table
from app.measures import ARCSINE_CM
from app.reports import write_terms, write_traces
from app.sequences import NATURALS, SequenceSpec, iter_terms

# --- Configuration ---
NUM_TERMS = 10_000
TRACE_LIMIT = 100_000


def main(out_dir='.'):
    os.makedirs(out_dir, exist_ok=True)

    # --- Sample terms of the synthetic arcsine sequence a_i = 2 i c_i ---
    synthetic = SequenceSpec.synthetic(ARCSINE_CM, NATURALS)
    terms_path = os.path.join(out_dir, 'terms_synthetic_cm.csv')
    n_terms = write_terms(terms_path, iter_terms(synthetic, NUM_TERMS))

    # --- Trace tables of both CM curves ---
    written = [terms_path]
    for curve in (CURVE_32A, CURVE_27A):
        path = os.path.join(out_dir, f'traces_{curve.id.value}.csv')
        write_traces(path, trace_table(curve, TRACE_LIMIT))
        written.append(path)

    print(f"Successfully generated {n_terms} terms and {len(written) - 1} trace tables: {', '.join(written)}")
    return written


if __name__ == '__main__':
    main(sys.argv[1] if len(sys.argv) > 1 else '.')
