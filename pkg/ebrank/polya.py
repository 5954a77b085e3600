## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""polya -- the Dirichlet-multinomial citation model

Each citing row i is a multinomial draw of n_i references over its
non-masked cells, with cell probabilities drawn from a Dirichlet whose
parameters gamma are shared by all rows.  Integrating the Dirichlet out
gives the Polya (compound Dirichlet-multinomial) likelihood

    L_i = logG(K_i) - logG(n_i + K_i)
          + sum_j [logG(c_ij + gamma_j) - logG(gamma_j)]

where the sum and K_i = sum_j gamma_j both run over the non-masked
cells of row i.  With the diagonal masked K_i = K - gamma_i.  The
multinomial coefficient n_i! / prod c_ij! does not depend on gamma and
is left out of every value computed here.

Signs of the derivatives follow the likelihood:

    dL/dgamma_j = sum_i [psi(K_i) - psi(n_i + K_i)
                         + psi(c_ij + gamma_j) - psi(gamma_j)]

summing over the rows i where cell (i, j) is not masked.
"""

from __future__ import absolute_import
import numpy as np
from scipy import special as sc
from . import interfaces as i
from .matrix import policy_mask
from .prelude import *

__all__ = (
    'DirichletParams', 'marginal_log_likelihood', 'gradient', 'hessian',
    'prior_preset', 'starting_values', 'empty_columns', 'PRESETS', 'STARTS',
    'GAMMA_FLOOR'
)

GAMMA_FLOOR = 1e-8


### Parameters

class DirichletParams(object):
    """Fitted (or preset) hyperparameters, with the quantities the
    smoothing matrix needs: K_leave[i] is the prior mass of row i and
    alpha[i] = n_i / (n_i + K_leave[i]) the weight row i gives its data."""

    __slots__ = (
        'gamma', 'K', 'K_leave', 'alpha', 'n', 'mask', 'std_errors',
        'K_std_error', 'flagged'
    )

    def __init__(self, gamma, mask, n=None, std_errors=None,
                 K_std_error=None, flagged=None):
        gamma = check_gamma(gamma, len(gamma))
        mask = np.array(mask, dtype=bool)
        allowed = ~mask
        n = np.zeros(gamma.size) if n is None else np.asarray(n, dtype=float)

        K_leave = allowed @ gamma
        denom = n + K_leave
        alpha = np.divide(n, denom, out=np.zeros_like(n), where=denom > 0)

        self.gamma = gamma
        self.K = float(gamma.sum())
        self.K_leave = K_leave
        self.alpha = alpha
        self.n = n
        self.mask = mask
        self.std_errors = std_errors
        self.K_std_error = K_std_error
        self.flagged = (
            np.zeros(gamma.size, dtype=bool) if flagged is None
            else np.asarray(flagged, dtype=bool)
        )
        for arr in (gamma, K_leave, alpha, n, mask, self.flagged):
            arr.setflags(write=False)

    @classmethod
    def from_gamma(cls, matrix, gamma, **kwargs):
        return cls(
            gamma, matrix.structural_mask, matrix.counts.sum(axis=1), **kwargs
        )

    def __repr__(self):
        return '<%s N=%d K=%.6g>' % (type(self).__name__, self.gamma.size, self.K)

    @property
    def mask_aware(self):
        return bool(np.array_equal(self.mask, np.eye(self.gamma.size, dtype=bool)))

    def prior_rows(self):
        """pi*_ij = gamma_j / K_leave[i] on non-masked cells, 0 elsewhere."""

        rows = np.where(self.mask, 0.0, self.gamma[None, :])
        return np.divide(
            rows, self.K_leave[:, None], out=np.zeros_like(rows),
            where=self.K_leave[:, None] > 0
        )

    def to_dict(self, labels=None):
        labels = list(labels) if labels else [str(k) for k in range(self.gamma.size)]
        return {
            'labels': labels,
            'gamma': self.gamma.tolist(),
            'K': self.K,
            'K_leave': self.K_leave.tolist(),
            'alpha': self.alpha.tolist(),
            'std_errors': (
                None if self.std_errors is None else list(self.std_errors)
            ),
            'K_std_error': self.K_std_error,
            'flagged': [l for (l, f) in zip(labels, self.flagged) if f],
            'mask_aware': self.mask_aware
        }

def check_gamma(gamma, size):
    gamma = np.array(gamma, dtype=float)
    if gamma.shape != (size,):
        raise i.InputError(
            'bad-gamma', 'Expected %d hyperparameters, got %r.' % (size, gamma.shape)
        )
    if not np.isfinite(gamma).all() or (gamma <= 0).any():
        raise i.InputError(
            'domain', 'Hyperparameters must be positive, got %r.' % gamma.tolist()
        )
    return gamma


### Likelihood

class Terms(namedtuple('Terms', 'allowed counts n K_leave live')):
    """Per-row pieces shared by the likelihood and its derivatives.  live
    marks rows with at least one non-masked cell."""

def terms(matrix, gamma):
    allowed = matrix.allowed.astype(float)
    counts = matrix.counts.astype(float)
    K_leave = allowed @ gamma
    return Terms(allowed, counts, counts.sum(axis=1), K_leave, K_leave > 0)

def marginal_log_likelihood(matrix, gamma):
    gamma = check_gamma(gamma, matrix.size)
    t = terms(matrix, gamma)
    K, n = t.K_leave[t.live], t.n[t.live]
    rows = sc.gammaln(K) - sc.gammaln(n + K)
    cells = t.allowed * (sc.gammaln(t.counts + gamma) - sc.gammaln(gamma))
    return float(rows.sum() + cells.sum())

def gradient(matrix, gamma):
    gamma = check_gamma(gamma, matrix.size)
    t = terms(matrix, gamma)
    D = np.zeros(matrix.size)
    K, n = t.K_leave[t.live], t.n[t.live]
    D[t.live] = sc.psi(K) - sc.psi(n + K)
    cells = t.allowed * (sc.psi(t.counts + gamma) - sc.psi(gamma))
    return t.allowed.T @ D + cells.sum(axis=0)

def hessian(matrix, gamma):
    """Second derivatives; exactly symmetric."""

    gamma = check_gamma(gamma, matrix.size)
    t = terms(matrix, gamma)
    E = np.zeros(matrix.size)
    K, n = t.K_leave[t.live], t.n[t.live]
    E[t.live] = sc.polygamma(1, K) - sc.polygamma(1, n + K)
    cells = t.allowed * (sc.polygamma(1, t.counts + gamma) - sc.polygamma(1, gamma))
    H = t.allowed.T @ (E[:, None] * t.allowed) + np.diag(cells.sum(axis=0))
    return 0.5 * (H + H.T)


### Presets and starting points

PRESETS = {
    'bayes_laplace': lambda size: np.ones(size),
    'jeffreys': lambda size: np.full(size, 0.5),
    'perks': lambda size: np.full(size, 1.0 / size)
}

def prior_preset(kind, size, mask='diagonal'):
    """A textbook prior: K = N (Bayes-Laplace), N/2 (Jeffreys) or 1
    (Perks).  With no data attached every alpha is 0.

        >>> prior_preset('jeffreys', 4).K
        2.0
    """

    try:
        make = PRESETS[kind]
    except KeyError:
        raise i.InputError(
            'bad-option',
            'Unknown prior preset %r; expected one of %s.' % (
                kind, ', '.join(sorted(PRESETS))
            )
        )
    if size < 2:
        raise i.InputError('bad-option', 'Presets need at least two nodes.')
    if isinstance(mask, str):
        mask = policy_mask(mask, size)
    return DirichletParams(make(size), mask)

def empty_columns(matrix):
    """Columns with no counts over non-masked cells."""

    return matrix.counts.sum(axis=0) == 0

def start_empirical(matrix):
    counts = matrix.counts
    total = counts.sum()
    if total == 0:
        raise i.DegenerateData('no-data', 'Every non-masked count is zero.')
    gamma = matrix.size * counts.sum(axis=0) / float(total)
    return np.maximum(gamma, GAMMA_FLOOR)

STARTS = {
    'empirical': start_empirical,
    'ones': lambda matrix: np.ones(matrix.size),
    'perks': lambda matrix: np.full(matrix.size, 1.0 / matrix.size)
}

def starting_values(matrix, start='empirical'):
    """gamma0 by name: 'empirical' (N c_+j / c_++), 'ones' or 'perks';
    an explicit vector passes through after validation."""

    if not isinstance(start, str):
        return check_gamma(start, matrix.size)
    elif start not in STARTS:
        raise i.InputError(
            'bad-option',
            'Unknown start %r; expected one of %s.' % (
                start, ', '.join(sorted(STARTS))
            )
        )
    return STARTS[start](matrix)
