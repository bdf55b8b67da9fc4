# tests/test_generate_data.py
import os

import pandas as pd

import generate_data


def test_generate_sample_files(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(generate_data, 'NUM_TERMS', 100)
    monkeypatch.setattr(generate_data, 'TRACE_LIMIT', 1000)

    written = generate_data.main(str(tmp_path))

    assert [os.path.basename(p) for p in written] == [
        'terms_synthetic_cm.csv', 'traces_32a.csv', 'traces_27a.csv']
    terms = pd.read_csv(tmp_path / 'terms_synthetic_cm.csv')
    # the first index has c = 0 and is skipped
    assert len(terms) == 99
    assert terms['i'].iloc[0] == 2
    assert terms['c_i'].abs().max() <= 1.0
    traces = pd.read_csv(tmp_path / 'traces_32a.csv')
    assert (traces['cos_theta'].abs() <= 1.0).all()
    assert 'Successfully generated 99 terms' in capsys.readouterr().out
