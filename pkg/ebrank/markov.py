## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""markov -- teleportation, smoothing matrices and stationary scores

Scores are left eigenvectors: r_j = sum_i r_i g_ij, so a node is
important when important nodes cite it.  Rows of every matrix here are
citing nodes.
"""

from __future__ import absolute_import
import numpy as np
from . import interfaces as i
from .matrix import TransitionMatrix
from .prelude import *

__all__ = (
    'TeleportVector', 'ScoreVector', 'google_matrix', 'psjr_matrix',
    'stationary_distribution', 'article_influence', 'NORMALIZATIONS'
)

NORMALIZATIONS = ('sum_one', 'sum_1000', 'per_article')


### Vectors

class TeleportVector(object):
    """Where a random walker lands when it does not follow a citation."""

    __slots__ = ('probabilities', 'kind')

    KINDS = ('uniform', 'article_share', 'custom')

    def __init__(self, probabilities, kind='custom'):
        probabilities = np.array(probabilities, dtype=float)
        if kind not in self.KINDS:
            raise i.InputError('bad-option', 'Unknown teleport kind %r.' % kind)
        if probabilities.ndim != 1 or probabilities.size == 0:
            raise i.InputError('bad-teleport', 'Teleport must be a vector.')
        if not np.isfinite(probabilities).all() or (probabilities < 0).any():
            raise i.InputError(
                'bad-teleport', 'Teleport entries must be nonnegative.'
            )
        total = probabilities.sum()
        if total <= 0:
            raise i.InputError('bad-teleport', 'Teleport sums to zero.')

        probabilities = probabilities / total
        probabilities.setflags(write=False)
        self.probabilities = probabilities
        self.kind = kind

    def __repr__(self):
        return '<%s %s N=%d>' % (type(self).__name__, self.kind, len(self))

    def __len__(self):
        return self.probabilities.size

    @classmethod
    def uniform(cls, size):
        return cls(np.ones(size), 'uniform')

    @classmethod
    def article_share(cls, articles):
        """a_i / a_+ for positive article counts."""

        articles = np.asarray(articles, dtype=float)
        if (articles <= 0).any():
            raise i.InputError(
                'bad-articles', 'Article counts must be positive.'
            )
        return cls(articles, 'article_share')

    @classmethod
    def custom(cls, values):
        return cls(values, 'custom')

class ScoreVector(object):
    """Nonnegative per-node scores.

        >>> s = ScoreVector([0.2, 0.5, 0.3], labels=('a', 'b', 'c'))
        >>> s.ranks().tolist()
        [3, 1, 2]
        >>> [label for (label, value, rank) in s.ordered()]
        ['b', 'c', 'a']
    """

    __slots__ = ('values', 'normalization', 'labels', 'iterations', 'method')

    def __init__(self, values, normalization='sum_one', labels=None,
                 iterations=None, method=None):
        values = np.array(values, dtype=float)
        if (values < 0).any():
            raise i.InputError('bad-scores', 'Scores must be nonnegative.')
        if normalization == 'sum_one' and abs(values.sum() - 1.0) > 1e-10:
            raise i.InputError(
                'bad-scores', 'Scores sum to %r, not 1.' % values.sum()
            )
        values.setflags(write=False)

        self.values = values
        self.normalization = normalization
        self.labels = tuple(labels) if labels is not None else tuple(
            str(k) for k in range(values.size)
        )
        self.iterations = iterations
        self.method = method

    def __repr__(self):
        return '<%s %s N=%d>' % (
            type(self).__name__, self.normalization, len(self)
        )

    def __len__(self):
        return self.values.size

    def replace(self, values=None, normalization=None, method=None):
        return type(self)(
            self.values if values is None else values,
            normalization or self.normalization,
            self.labels,
            self.iterations,
            method or self.method
        )

    def scaled(self, total):
        """Rescale so the scores sum to total (1000 reproduces the usual
        presentation of influence tables)."""

        if total == 1:
            name = 'sum_one'
        elif total == 1000:
            name = 'sum_1000'
        else:
            name = 'sum_%g' % total
        return self.replace(self.values * (total / self.values.sum()), name)

    def order(self):
        """Node indices by descending score, ties broken by label."""

        return sorted(
            range(len(self)), key=lambda k: (-self.values[k], self.labels[k])
        )

    def ranks(self):
        ranks = np.empty(len(self), dtype=int)
        ranks[self.order()] = np.arange(1, len(self) + 1)
        return ranks

    def ordered(self):
        ranks = self.ranks()
        return [
            (self.labels[k], float(self.values[k]), int(ranks[k]))
            for k in self.order()
        ]

    def as_dict(self):
        return dict(zip(self.labels, self.values.tolist()))


### Smoothing matrices

def google_matrix(P, alpha, teleport):
    """G = alpha * P + (1 - alpha) * 1 t'"""

    if not 0.0 <= alpha <= 1.0:
        raise i.InputError('bad-option', 'alpha must be in [0, 1], got %r.' % alpha)
    check_teleport(P, teleport)

    t = teleport.probabilities
    return P.replace(alpha * P.rows + (1.0 - alpha) * t[None, :])

def psjr_matrix(P, alpha2, beta, pi):
    """G2 = alpha2 * P + (1 - alpha2 - beta) * 1 pi' + beta * 1 1' / N"""

    if alpha2 < 0 or beta < 0 or alpha2 + beta > 1.0 + 1e-15:
        raise i.InputError(
            'bad-option',
            'Need alpha2, beta >= 0 and alpha2 + beta <= 1, got %r + %r.'
            % (alpha2, beta)
        )
    check_teleport(P, pi)

    size = len(P)
    rest = max(1.0 - alpha2 - beta, 0.0)
    rows = (
        alpha2 * P.rows
        + rest * pi.probabilities[None, :]
        + beta / size
    )
    return P.replace(rows)

def check_teleport(P, teleport):
    if len(teleport) != len(P):
        raise i.InputError(
            'bad-teleport',
            'Teleport has %d entries for %d nodes.' % (len(teleport), len(P))
        )


### Scores

def stationary_distribution(G, tol=1e-12, max_iter=10000, start=None):
    """Power iteration r <- r G from the uniform vector (or start),
    stopping when successive iterates differ by less than tol in L1."""

    if int(max_iter) < 1:
        raise i.InputError(
            'bad-option', 'max_iter must be at least 1, not %r.' % max_iter
        )

    size = len(G)
    rows = G.rows
    if start is None:
        r = np.full(size, 1.0 / size)
    else:
        r = np.asarray(start, dtype=float)
        r = r / r.sum()

    for iteration in range(1, max_iter + 1):
        new = r @ rows
        new /= new.sum()
        change = np.abs(new - r).sum()
        r = new
        if change < tol:
            log.debug('Power iteration converged in %d steps.', iteration)
            r = np.clip(r, 0.0, None)
            return ScoreVector(
                r / r.sum(), labels=G.labels, iterations=iteration
            )

    log.error('Power iteration stalled at change %.3g.', change)
    raise i.ConvergenceError(
        'power-iteration',
        'No stationary distribution within %d iterations (change %.3g).'
        % (max_iter, change)
    )

def article_influence(score, articles):
    """Divide each score by the node's article share a_i / a_+ and scale
    so the article-weighted mean is 1.

        >>> ai = article_influence(ScoreVector([0.5, 0.3, 0.2]), [10, 10, 20])
        >>> ai.values.round(12).tolist()
        [2.0, 1.2, 0.4]
    """

    if articles is None:
        raise i.MissingArticles()
    articles = np.asarray(articles, dtype=float)
    if articles.shape != score.values.shape:
        raise i.InputError(
            'label-mismatch',
            'Got %d article counts for %d scores.' % (articles.size, len(score))
        )
    if not np.isfinite(articles).all() or (articles <= 0).any():
        bad = int(np.argmax(~(articles > 0)))
        raise i.InputError(
            'bad-articles',
            'Article count for %s must be positive.' % score.labels[bad]
        )

    shares = articles / articles.sum()
    values = score.values / shares / score.values.sum()
    return score.replace(values, 'per_article')
