## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from ebrank import interfaces as i
from ebrank.markov import ScoreVector
from ebrank.application import make_method, PageRank
from ebrank.analysis import *
from conftest import square, OVERDISPERSED


### Rank correlation

def test_perfect_agreement():
    assert spearman([1, 2, 3], [10, 20, 30]) == 1.0
    assert kendall_tau([1, 2, 3], [30, 20, 10]) == -1.0

def test_ties_use_tau_b():
    ## Two tied pairs in x: tau-b = 8 / sqrt(8 * 10).
    x = [1, 1, 2, 3, 3]
    y = [1, 2, 3, 4, 5]
    assert kendall_tau(x, y) == pytest.approx(8 / np.sqrt(80.0), abs=1e-12)

def test_accepts_score_vectors():
    a = ScoreVector([0.1, 0.2, 0.7])
    b = ScoreVector([0.2, 0.1, 0.7])
    assert spearman(a, b) == pytest.approx(0.5)

def test_constant_scores():
    with pytest.raises(i.UndefinedCorrelation):
        spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(i.UndefinedCorrelation):
        kendall_tau([1, 2, 3], [4, 4, 4])

def test_too_short():
    with pytest.raises(i.InputError) as info:
        spearman([1], [2])
    assert info.value.condition == 'too-short'

def test_comparison_layout():
    scores = [
        ('pr', [1, 2, 3, 4, 5]),
        ('ebpr', [1, 3, 2, 5, 4]),
        ('ebef', [5, 4, 3, 2, 1])
    ]
    c = compare_rankings(scores)
    table = c.table()
    assert c.methods == ('pr', 'ebpr', 'ebef')
    assert_allclose(table.diagonal(), 1.0)
    assert table[0, 1] == pytest.approx(0.8)
    assert table[1, 0] == pytest.approx(0.6)
    assert table[0, 2] == table[2, 0] == -1.0
    assert_allclose(c.spearman, c.spearman.T)

def test_comparison_from_mapping():
    c = compare_rankings({
        'a': ScoreVector([0.5, 0.3, 0.2], labels='xyz'),
        'b': ScoreVector([0.2, 0.3, 0.5], labels='xyz')
    })
    assert c.labels == ('x', 'y', 'z')
    assert c.kendall[0, 1] == -1.0


### Self-citations

def test_kappa_example():
    profile = self_citation_profile(square([[10, 20], [3, 0]]))
    assert profile.kappa[0] == pytest.approx(0.3)
    assert profile.S_kappa[0] == pytest.approx(6 / 23.0)
    assert profile.rate[0] == pytest.approx(1 / 3.0)
    assert profile.kappa[1] == 1.0
    assert profile.S0[1] == pytest.approx(20 / 3.0)

def test_kappa_is_one_for_moderate_self_citation():
    ## c_ii = 5 with R = 8 and M = 9 exchanged with the other node.
    profile = self_citation_profile(square([[5, 9], [8, 0]]))
    assert profile.kappa[0] == 1.0
    assert profile.S_kappa[0] == pytest.approx(13 / 14.0)
    assert profile.S0[0] == pytest.approx(8 / 9.0)

def test_kappa_ignores_the_mask(extract, extract_diag):
    a = self_citation_profile(extract)
    b = self_citation_profile(extract_diag)
    assert_array_equal(a.kappa, b.kappa)
    assert_array_equal(a.self_citations, [43, 18, 291, 5, 22])

def test_score_is_monotone_in_kappa():
    rng = np.random.default_rng(4)
    grid = np.linspace(0, 1, 21)
    for _ in range(20):
        counts = rng.integers(1, 40, size=(4, 4))
        p = self_citation_profile(square(counts))
        values = np.array([p.S(k) for k in grid])
        steps = np.diff(values, axis=0)
        for j in range(4):
            if p.S0[j] < 1:
                assert (steps[:, j] >= -1e-12).all()
            elif p.S0[j] > 1:
                assert (steps[:, j] <= 1e-12).all()
            else:
                assert_allclose(values[:, j], 1.0)

def test_kappa_bounds(extract):
    p = self_citation_profile(extract)
    assert ((p.kappa >= 0) & (p.kappa <= 1)).all()
    assert len(p.rows()) == 5

def test_zero_row():
    with pytest.raises(i.InputError) as info:
        self_citation_profile(square([[0, 0], [1, 1]]))
    assert info.value.condition == 'zero-row'

def test_apply_kappa(extract):
    p = self_citation_profile(extract)
    shrunk = apply_kappa(extract, p.kappa)
    expected = np.floor(p.kappa * [43, 18, 291, 5, 22] + 0.5)
    assert_array_equal(shrunk.full_counts().diagonal(), expected)
    off = ~np.eye(5, dtype=bool)
    assert_array_equal(shrunk.full_counts()[off], extract.full_counts()[off])

def test_apply_kappa_endpoints(extract):
    assert_array_equal(apply_kappa(extract, 1.0).full_counts(), extract.full_counts())
    none = apply_kappa(extract, 0.0).full_counts()
    assert (none.diagonal() == 0).all()
    off = ~np.eye(5, dtype=bool)
    assert_array_equal(none[off], extract.full_counts()[off])

def test_apply_kappa_bounds(extract):
    with pytest.raises(i.InputError):
        apply_kappa(extract, 1.5)


### Half sampling

def test_config_checks():
    for bad in (dict(a=0), dict(m=0), dict(mode='poisson'), dict(delta=1.0)):
        with pytest.raises(i.InputError):
            HalfSampleConfig(**bad)
    assert HalfSampleConfig(a=10, b=10).rho == pytest.approx(1 / 21.0)

def test_halves_add_up(extract_diag):
    cfg = HalfSampleConfig(seed=7)
    (training, complement) = half_sample(extract_diag, cfg, 3)
    assert_array_equal(
        training.full_counts() + complement.full_counts(),
        extract_diag.full_counts()
    )
    assert (training.full_counts() >= 0).all()
    assert training.mask_policy == 'diagonal'

def test_halves_are_reproducible(extract):
    cfg = HalfSampleConfig(seed=11)
    (a, _) = half_sample(extract, cfg, 5)
    (b, _) = half_sample(extract, cfg, 5)
    (c, _) = half_sample(extract, cfg, 6)
    assert_array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)

def test_beta_bernoulli_moments():
    m = square(np.full((100, 100), 100))
    (training, _) = half_sample(m, HalfSampleConfig(seed=1))
    cells = training.counts.ravel()
    assert abs(cells.mean() - 50.0) < 1.5
    ## 100 * 1/4 * (1 + 99 / 21)
    assert cells.var() == pytest.approx(142.857, rel=0.10)

def test_bernoulli_moments():
    m = square(np.full((100, 100), 100))
    (training, _) = half_sample(m, HalfSampleConfig(seed=1, mode='bernoulli'))
    cells = training.counts.ravel()
    assert abs(cells.mean() - 50.0) < 1.5
    assert cells.var() == pytest.approx(25.0, rel=0.10)

def test_single_replicate_is_the_complement_score(extract):
    cfg = HalfSampleConfig(m=1, seed=3)
    method = make_method('pr', {})
    result = half_sampling_study(extract, [method], cfg)
    (_, complement) = half_sample(extract, cfg, 0)
    expected = method.score(method.prepare(complement))
    assert_array_equal(result.scores['pr'].values, expected.values)
    assert result.replicates == 1
    assert result.mean_K['pr'] is None

def test_study_is_deterministic(extract):
    cfg = HalfSampleConfig(m=5, seed=2)
    methods = [make_method('pr', {})]
    a = half_sampling_study(extract, methods, cfg)
    b = half_sampling_study(extract, methods, cfg)
    assert_array_equal(a.scores['pr'].values, b.scores['pr'].values)

def test_workers_match_serial(extract):
    cfg = HalfSampleConfig(m=6, seed=9)
    methods = [make_method('pr', {})]
    serial = half_sampling_study(extract, methods, cfg)
    pooled = half_sampling_study(extract, methods, cfg, workers=2)
    assert_array_equal(serial.scores['pr'].values, pooled.scores['pr'].values)

def test_symmetric_data_scores_evenly():
    m = square(np.full((5, 5), 200))
    result = half_sampling_study(m, [make_method('pr', {})], HalfSampleConfig(m=20))
    assert_allclose(result.scores['pr'].values, 0.2, atol=0.01)

def test_fitted_method_reports_concentration():
    m = square(10 * np.array(OVERDISPERSED), mask='diagonal')
    result = half_sampling_study(
        m, [make_method('ebef', {})], HalfSampleConfig(m=3, seed=5)
    )
    assert result.mean_K['ebef'] > 0
    assert result.scores['ebef'].values.sum() == pytest.approx(1.0)

def test_influence_needs_articles(extract_articles):
    result = half_sampling_study(
        extract_articles, [make_method('pr', {})], HalfSampleConfig(m=2)
    )
    assert result.influence['pr'].normalization == 'per_article'
    assert result.to_dict()['rho'] == pytest.approx(1 / 21.0)

class Flaky(PageRank):

    def __init__(self, settings, failures):
        super(Flaky, self).__init__(settings)
        self.failures = failures

    def fit(self, matrix):
        if self.failures > 0:
            self.failures -= 1
            raise i.ConvergenceError('max-iter', 'simulated failure')
        return None

def test_some_failures_are_tolerated(extract):
    method = Flaky(make_method('pr', {}).settings, 2)
    result = half_sampling_study(extract, [method], HalfSampleConfig(m=20))
    assert result.failures == 2
    assert result.replicates == 18

def test_too_many_failures(extract):
    method = Flaky(make_method('pr', {}).settings, 3)
    with pytest.raises(i.ConvergenceError) as info:
        half_sampling_study(extract, [method], HalfSampleConfig(m=20))
    assert info.value.condition == 'half-sampling'
