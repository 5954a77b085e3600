## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""smoothing -- empirical-Bayes scores

The posterior mean of row i's citation probabilities is

    (c_ij + gamma_j) / (n_i + K_i)
      = alpha_i * c_ij / n_i + (1 - alpha_i) * gamma_j / K_i

so every row is shrunk toward the shared prior by its own amount:
rows with few references lean on the prior, large rows on their data.
The stationary distribution of that matrix is the EBEF score when the
diagonal is excluded and the EBPR score when it is not.
"""

from __future__ import absolute_import
import numpy as np
from . import interfaces as i
from .matrix import TransitionMatrix
from .markov import stationary_distribution
from .optimize import fit
from .prelude import *

__all__ = (
    'SmoothedMatrix', 'FitOptions', 'posterior_smoothing_matrix',
    'smoothed_score', 'ebef_score', 'ebpr_score'
)


### Matrices

class SmoothedMatrix(TransitionMatrix):
    """G*: a TransitionMatrix that remembers how much of each row came
    from the data (per_row_alpha) and what the prior rows were."""

    __slots__ = ('per_row_alpha', 'prior_rows')

    def __init__(self, rows, per_row_alpha, prior_rows, dangling=None,
                 mask=None, labels=None):
        super(SmoothedMatrix, self).__init__(rows, dangling, mask, labels)
        self.per_row_alpha = np.array(per_row_alpha, dtype=float)
        self.prior_rows = np.array(prior_rows, dtype=float)
        self.per_row_alpha.setflags(write=False)
        self.prior_rows.setflags(write=False)

    def replace(self, rows):
        return TransitionMatrix(rows, self.dangling, self.mask, self.labels)

def posterior_smoothing_matrix(matrix, params):
    if not np.array_equal(matrix.structural_mask, params.mask):
        raise i.MaskMismatch(
            'Parameters were fitted under a %s mask; the matrix has a %s mask.'
            % (mask_name(params.mask), matrix.mask_policy)
        )
    if params.gamma.size != matrix.size:
        raise i.InputError(
            'label-mismatch',
            'Got %d hyperparameters for %d nodes.' % (params.gamma.size, matrix.size)
        )

    allowed = matrix.allowed
    counts = matrix.counts.astype(float)
    n = counts.sum(axis=1)
    K_leave = allowed @ params.gamma
    denom = n + K_leave

    rows = np.where(allowed, counts + params.gamma[None, :], 0.0)
    stuck = denom <= 0
    rows[~stuck] /= denom[~stuck, None]
    ## A row with no usable cell at all keeps the walker in place.
    rows[stuck] = 0.0
    rows[stuck, np.flatnonzero(stuck)] = 1.0

    alpha = np.divide(n, denom, out=np.zeros_like(n), where=~stuck)
    return SmoothedMatrix(
        rows, alpha, params.prior_rows(), n == 0, matrix.structural_mask,
        matrix.labels
    )

def mask_name(mask):
    if not mask.any():
        return 'none'
    elif np.array_equal(mask, np.eye(mask.shape[0], dtype=bool)):
        return 'diagonal'
    return 'custom'


### Scores

class FitOptions(namedtuple('FitOptions', (
        'optimizer start eps1 eps2 max_iter tol power_max_iter state'))):
    """How the score pipelines fit gamma and solve for the stationary
    distribution.  The default polishes a fixed-point estimate with
    Levenberg-Marquardt."""

    __slots__ = ()

    def fit(self, matrix):
        return fit(
            matrix, self.optimizer, self.start, self.eps1, self.eps2,
            self.max_iter, self.state
        )

    def stationary(self, G):
        return stationary_distribution(G, self.tol, self.power_max_iter)

FitOptions.__new__.__defaults__ = (
    'fp+lm', 'empirical', 1e-8, 1e-6, 1000, 1e-12, 10000, None
)

def smoothed_score(matrix, params, options=None):
    """Score a matrix with already fitted parameters."""

    options = options or FitOptions()
    return options.stationary(posterior_smoothing_matrix(matrix, params))

def ebef_score(matrix, options=None):
    """Empirical-Bayes Eigenfactor: self-citations are structural zeros.
    Returns (ScoreVector, DirichletParams, FitReport)."""

    return fitted_score(matrix.masked('diagonal'), 'ebef', options)

def ebpr_score(matrix, options=None):
    """Empirical-Bayes PageRank: the diagonal is an ordinary cell."""

    return fitted_score(matrix.masked('none'), 'ebpr', options)

def fitted_score(matrix, method, options):
    options = options or FitOptions()
    (params, report) = options.fit(matrix)
    score = smoothed_score(matrix, params, options)
    log.info(
        '%s: K=%.6g, mean alpha=%.4g.', method, params.K, params.alpha.mean()
    )
    return (score.replace(method=method), params, report)
