## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""analysis -- rank comparison, self-citation weights and half sampling"""

from __future__ import absolute_import
from concurrent import futures
import numpy as np
from scipy import stats
from . import interfaces as i
from .markov import ScoreVector, article_influence
from .prelude import *

__all__ = (
    'spearman', 'kendall_tau', 'RankComparison', 'compare_rankings',
    'SelfCitationProfile', 'self_citation_profile', 'apply_kappa',
    'HalfSampleConfig', 'half_sample', 'replicate_generator',
    'HalfSampleResult', 'half_sampling_study', 'SAMPLING_MODES',
    'MAX_FAILURE_SHARE'
)


### Rank correlation

def paired(x, y):
    x = np.asarray(getattr(x, 'values', x), dtype=float)
    y = np.asarray(getattr(y, 'values', y), dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise i.InputError(
            'label-mismatch', 'Cannot correlate %r with %r.' % (x.shape, y.shape)
        )
    if x.size < 2:
        raise i.InputError('too-short', 'Need at least two scores to correlate.')
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise i.UndefinedCorrelation()
    return (x, y)

def spearman(x, y):
    """Pearson correlation of average ranks.

        >>> spearman([1, 2, 3, 4, 5], [1, 3, 2, 5, 4])
        0.8
    """

    (x, y) = paired(x, y)
    return round_unit(stats.spearmanr(x, y)[0])

def kendall_tau(x, y):
    """Kendall's tau-b (tie-corrected).

        >>> kendall_tau([1, 2, 3, 4, 5], [1, 3, 2, 5, 4])
        0.6
    """

    (x, y) = paired(x, y)
    return round_unit(stats.kendalltau(x, y, variant='b')[0])

def round_unit(value):
    ## Keep the result inside [-1, 1] and free of float noise.
    return float(np.clip(round(float(value), 12), -1.0, 1.0))

class RankComparison(object):
    """Pairwise correlations between the scores of several methods."""

    __slots__ = ('methods', 'scores', 'labels', 'spearman', 'kendall')

    def __init__(self, methods, scores, labels=None):
        self.methods = tuple(methods)
        self.scores = np.array(scores, dtype=float)
        self.labels = tuple(labels) if labels is not None else None

        size = len(self.methods)
        self.spearman = np.eye(size)
        self.kendall = np.eye(size)
        for a in range(size):
            for b in range(a + 1, size):
                (x, y) = (self.scores[a], self.scores[b])
                self.spearman[a, b] = self.spearman[b, a] = spearman(x, y)
                self.kendall[a, b] = self.kendall[b, a] = kendall_tau(x, y)

    def __repr__(self):
        return '<%s %s>' % (type(self).__name__, ','.join(self.methods))

    def table(self):
        """Kendall below the diagonal, Spearman above, ones on it."""

        lower = np.tril(self.kendall, -1)
        upper = np.triu(self.spearman, 1)
        return lower + upper + np.eye(len(self.methods))

def compare_rankings(scores):
    """scores is a sequence of (method, ScoreVector) pairs."""

    scores = list(scores.items() if hasattr(scores, 'items') else scores)
    return RankComparison(
        [name for (name, _) in scores],
        [np.asarray(getattr(s, 'values', s)) for (_, s) in scores],
        getattr(first(s for (_, s) in scores), 'labels', None)
    )


### Self-citations

class SelfCitationProfile(object):
    """Self-citation statistics of every node.

    R is the external citations a node receives and M the external
    references it makes.  The simple score S(k) = (k c_ii + R) / (k c_ii + M)
    is monotone in k: increasing toward 1 when S(0) < 1, decreasing
    toward 1 when S(0) > 1 and constant when S(0) = 1.  kappa only
    shrinks c_ii for nodes that cite themselves more than they exchange
    citations with others.
    """

    __slots__ = (
        'labels', 'self_citations', 'received', 'made', 'rate', 'kappa',
        'S0', 'S_kappa'
    )

    def __init__(self, labels, self_citations, received, made):
        self.labels = tuple(labels)
        self.self_citations = c = np.asarray(self_citations, dtype=float)
        self.received = R = np.asarray(received, dtype=float)
        self.made = M = np.asarray(made, dtype=float)
        self.rate = c / (c + M)

        ratio = np.divide(np.minimum(R, M), c, out=np.ones_like(c), where=c > 0)
        self.kappa = np.minimum(ratio, 1.0)
        self.S0 = self.S(0.0)
        self.S_kappa = self.S(self.kappa)

    def __len__(self):
        return len(self.labels)

    def S(self, kappa):
        kc = np.asarray(kappa, dtype=float) * self.self_citations
        top = kc + self.received
        bottom = kc + self.made
        return np.divide(
            top, bottom, out=np.full_like(top, np.nan), where=bottom > 0
        )

    def rows(self):
        return [
            {
                'label': label,
                'self_citations': int(self.self_citations[k]),
                'received': int(self.received[k]),
                'made': int(self.made[k]),
                'rate': float(self.rate[k]),
                'kappa': float(self.kappa[k]),
                'S0': float(self.S0[k]),
                'S_kappa': float(self.S_kappa[k])
            }
            for (k, label) in enumerate(self.labels)
        ]

def self_citation_profile(matrix):
    full = matrix.full_counts()
    diag = full.diagonal()
    citing = full.sum(axis=1)
    if (citing == 0).any():
        raise i.InputError(
            'zero-row',
            'Node %s makes no references.' % matrix.labels[int(np.argmax(citing == 0))]
        )
    return SelfCitationProfile(
        matrix.labels, diag, full.sum(axis=0) - diag, citing - diag
    )

def apply_kappa(matrix, kappa):
    """Replace every c_ii by kappa_i * c_ii rounded half up to a count.

        >>> from .matrix import CitationMatrix
        >>> m = apply_kappa(CitationMatrix(['a'], [[9]]), [0.442])
        >>> m.counts.tolist()
        [[4]]
    """

    kappa = np.broadcast_to(np.asarray(kappa, dtype=float), (matrix.size,))
    if not ((kappa >= 0) & (kappa <= 1)).all():
        raise i.InputError('bad-kappa', 'kappa must lie in [0, 1].')
    full = matrix.full_counts()
    np.fill_diagonal(full, np.floor(kappa * full.diagonal() + 0.5).astype(np.int64))
    return matrix.with_counts(full)


### Half sampling

SAMPLING_MODES = ('bernoulli', 'beta_bernoulli')
MAX_FAILURE_SHARE = 0.10

class HalfSampleConfig(namedtuple('HalfSampleConfig', 'a b m seed mode delta')):
    """Thinning parameters.  In beta_bernoulli mode every cell draws its
    own q ~ Beta(a, b), so the references of one cell are thinned
    together and rho = 1 / (a + b + 1) is their intra-class correlation.
    bernoulli mode thins every reference independently with
    probability delta."""

    __slots__ = ()

    def __new__(cls, a=10.0, b=10.0, m=200, seed=0, mode='beta_bernoulli',
                delta=0.5):
        if not (a > 0 and b > 0):
            raise i.InputError('bad-option', 'Beta shapes must be positive.')
        if int(m) < 1:
            raise i.InputError('bad-option', 'Need at least one replicate.')
        if mode not in SAMPLING_MODES:
            raise i.InputError(
                'bad-option',
                'Unknown sampling mode %r; expected one of %s.' % (
                    mode, ', '.join(SAMPLING_MODES)
                )
            )
        if not 0 < delta < 1:
            raise i.InputError('bad-option', 'delta must lie in (0, 1).')
        return super(HalfSampleConfig, cls).__new__(
            cls, float(a), float(b), int(m), int(seed), mode, float(delta)
        )

    @property
    def rho(self):
        return 1.0 / (self.a + self.b + 1.0)

def replicate_generator(seed, replicate):
    """Replicate r draws from its own Philox stream keyed by (seed, r),
    so a replicate's draws do not depend on which others ran.  Cells
    consume the stream in row-major order."""

    sequence = np.random.SeedSequence(seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(sequence))

def half_sample(matrix, cfg, replicate=0):
    """Split the full counts into (training, complement) halves that sum
    back to the original cell by cell."""

    rng = replicate_generator(cfg.seed, replicate)
    full = matrix.full_counts()
    if cfg.mode == 'beta_bernoulli':
        q = rng.beta(cfg.a, cfg.b, size=full.shape)
    else:
        q = np.full(full.shape, cfg.delta)
    training = rng.binomial(full, 1.0 - q).astype(np.int64)
    return (matrix.with_counts(training), matrix.with_counts(full - training))

class HalfSampleResult(object):
    """Mean scores per method over the replicates that succeeded."""

    __slots__ = (
        'methods', 'scores', 'influence', 'mean_K', 'replicates', 'failures',
        'config'
    )

    def __init__(self, methods, scores, influence, mean_K, replicates,
                 failures, config):
        self.methods = tuple(methods)
        self.scores = scores
        self.influence = influence
        self.mean_K = mean_K
        self.replicates = replicates
        self.failures = failures
        self.config = config

    def __repr__(self):
        return '<%s %s replicates=%d failures=%d>' % (
            type(self).__name__, ','.join(self.methods), self.replicates,
            self.failures
        )

    def to_dict(self):
        return {
            'methods': list(self.methods),
            'replicates': self.replicates,
            'failures': self.failures,
            'mean_K': self.mean_K,
            'config': self.config._asdict(),
            'rho': self.config.rho
        }

def run_replicate(matrix, methods, cfg, index):
    """Fit on the training half, score the complement with that fit."""

    (training, complement) = half_sample(matrix, cfg, index)
    outcome = {}
    try:
        for method in methods:
            fitted = method.fit(method.prepare(training))
            score = method.score(method.prepare(complement), fitted)
            outcome[method.__method__] = (
                score.values, None if fitted is None else fitted.K
            )
    except i.NumericalError as exc:
        log.warning('Half-sample replicate %d failed: %s', index, exc)
        return None
    return outcome

def half_sampling_study(matrix, methods, cfg, workers=None):
    """Average the complement scores of cfg.m half-sample replicates.
    Every method is scored on the complement, fitted or not."""

    methods = list(methods)
    indices = range(cfg.m)
    if workers and workers > 1:
        with futures.ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(
                partial(run_replicate, matrix, methods, cfg), indices
            ))
    else:
        outcomes = [run_replicate(matrix, methods, cfg, k) for k in indices]

    done = [o for o in outcomes if o is not None]
    failures = len(outcomes) - len(done)
    if failures > MAX_FAILURE_SHARE * cfg.m or not done:
        log.error('%d of %d half-sample replicates failed.', failures, cfg.m)
        raise i.ConvergenceError(
            'half-sampling',
            '%d of %d replicates failed (limit %d%%).' % (
                failures, cfg.m, int(MAX_FAILURE_SHARE * 100)
            )
        )

    scores, influence, mean_K = {}, {}, {}
    for method in methods:
        name = method.__method__
        values = np.mean([o[name][0] for o in done], axis=0)
        scores[name] = ScoreVector(values, labels=matrix.labels, method=name)
        if matrix.articles is not None:
            influence[name] = ScoreVector(
                np.mean([
                    article_influence(
                        ScoreVector(o[name][0], labels=matrix.labels),
                        matrix.articles
                    ).values
                    for o in done
                ], axis=0),
                'per_article', matrix.labels, method=name
            )
        Ks = [o[name][1] for o in done if o[name][1] is not None]
        mean_K[name] = float(np.mean(Ks)) if Ks else None

    log.info('Half sampling: %d replicates, %d failed.', len(done), failures)
    return HalfSampleResult(
        [m.__method__ for m in methods], scores,
        influence if matrix.articles is not None else None,
        mean_K, len(done), failures, cfg
    )
