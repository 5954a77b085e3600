## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

import io
import pandas as pd
import pytest
import simplejson as json
from ebrank.cli import main
from ebrank.application import digest
from conftest import data_path

EXTRACT = data_path('extract5.csv')
TINY = data_path('tiny3.csv')
ARTICLES = data_path('extract5_articles.csv')

def read(text):
    return pd.read_csv(io.StringIO(text))

def sidecar(path):
    with open(str(path) + '.json') as stream:
        return json.load(stream)


### score

def test_score_to_stdout(capsys):
    assert main(['score', TINY, '--method', 'pr']) == 0
    frame = read(capsys.readouterr().out)
    assert list(frame.columns) == ['label', 'score', 'rank']
    assert sorted(frame.label) == ['A', 'B', 'C']
    assert frame['rank'].tolist() == [1, 2, 3]
    assert frame.score.sum() == pytest.approx(1.0)

def test_score_with_sidecar(tmp_path):
    out = tmp_path / 'scores.csv'
    assert main([
        'score', EXTRACT, '--method', 'ebef', '--optimizer', 'fp',
        '--out', str(out)
    ]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 5
    data = sidecar(out)
    assert data['method'] == 'ebef'
    assert data['fit']['converged']
    assert data['params']['mask_aware']
    assert data['manifest']['inputs']['matrix'] == digest(EXTRACT)
    assert data['manifest']['parameters']['optimizer'] == 'fp'

def test_score_scaled(capsys):
    assert main(['score', EXTRACT, '--method', 'pr', '--scale', '1000']) == 0
    assert read(capsys.readouterr().out).score.sum() == pytest.approx(1000.0, abs=1e-6)

def test_score_with_articles(capsys):
    assert main(['score', EXTRACT, '--method', 'eifa', '--articles', ARTICLES]) == 0
    frame = read(capsys.readouterr().out)
    assert 'article_influence' in frame.columns

def test_alpha_sweep(capsys):
    assert main(['score', TINY, '--method', 'pr', '--alpha', '0.5,0.85']) == 0
    frame = read(capsys.readouterr().out)
    assert sorted(set(frame.alpha)) == [0.5, 0.85]
    assert len(frame) == 6

def test_alpha_sweep_only_for_pagerank():
    assert main(['score', TINY, '--method', 'ebef', '--alpha', '0.5,0.85']) == 2

def test_reruns_are_identical(tmp_path):
    outputs = []
    for name in ('a.csv', 'b.csv'):
        out = tmp_path / name
        assert main(['score', EXTRACT, '--method', 'pr', '--out', str(out)]) == 0
        outputs.append(out.read_text())
    assert outputs[0] == outputs[1]


### Errors

def test_missing_file(tmp_path):
    assert main(['score', str(tmp_path / 'nothing.csv')]) == 2

def test_malformed_file(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text(',A,B\nA,1,-2\nB,0,0\n')
    assert main(['score', str(path), '--method', 'pr']) == 2

def test_eigenfactor_without_articles():
    assert main(['score', EXTRACT, '--method', 'eifa']) == 2

def test_numerical_failure():
    assert main([
        'score', EXTRACT, '--method', 'ebef', '--optimizer', 'fp',
        '--max-iter', '1'
    ]) == 3

def test_fit_without_finite_maximum(capsys):
    assert main(['fit', TINY]) == 3
    assert capsys.readouterr().out == ''

@pytest.mark.parametrize('args', [
    ['fit', EXTRACT, '--bench', '--max-iter', '0'],
    ['fit', EXTRACT, '--max-iter', '0'],
    ['score', EXTRACT, '--method', 'pr', '--power-max-iter', '0'],
])
def test_zero_iteration_limit(args):
    assert main(args) == 2


### fit

def test_fit(capsys):
    assert main(['fit', EXTRACT]) == 0
    frame = read(capsys.readouterr().out)
    assert list(frame.columns) == [
        'label', 'gamma', 'std_error', 'K_leave', 'alpha', 'flagged'
    ]
    assert (frame.gamma > 0).all()

def test_bench(capsys):
    assert main(['fit', EXTRACT, '--bench']) == 0
    frame = read(capsys.readouterr().out)
    assert len(frame) == 18
    assert set(frame.algorithm) == {'FP', 'INV', 'LM'}


### compare, halfsample, kappa

def test_compare(capsys):
    assert main(['compare', EXTRACT, '--methods', 'pr,ebef']) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out), index_col=0)
    assert list(frame.index) == ['pr', 'ebef']
    assert frame.loc['pr', 'pr'] == 1.0

def test_halfsample_is_deterministic(tmp_path):
    texts = []
    for name in ('a.csv', 'b.csv'):
        out = tmp_path / name
        assert main([
            'halfsample', EXTRACT, '--methods', 'pr', '--m', '4', '--seed', '7',
            '--out', str(out)
        ]) == 0
        texts.append(out.read_text())
    assert texts[0] == texts[1]
    data = sidecar(tmp_path / 'a.csv')
    assert data['replicates'] == 4
    assert data['manifest']['parameters']['seed'] == 7

def test_kappa_without_self_citations(capsys):
    assert main(['kappa', TINY]) == 0
    frame = read(capsys.readouterr().out)
    assert (frame.kappa == 1.0).all()
    assert (frame.rate == 0.0).all()

def test_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv('EBRANK_OUTPUT_DIR', str(tmp_path))
    assert main(['kappa', EXTRACT, '--out', 'kappa.csv']) == 0
    assert (tmp_path / 'kappa.csv').exists()
    assert (tmp_path / 'kappa.csv.json').exists()
