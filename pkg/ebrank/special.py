## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""special -- gamma-family functions on the positive half-line

Thin wrappers over scipy.special that reject arguments outside (0, inf)
instead of returning inf or nan.  Scalars come back as Python floats,
arrays as float arrays.

    >>> round(digamma(1.0), 10)
    -0.5772156649
    >>> round(digamma(2.0) - digamma(1.0), 12)
    1.0
    >>> round(trigamma(1.0), 10)
    1.6449340668
    >>> round(inverse_digamma(digamma(3.7)), 10)
    3.7
"""

from __future__ import absolute_import
import numpy as np
from scipy import special as sc
from . import interfaces as i
from .prelude import *

__all__ = (
    'log_gamma', 'digamma', 'trigamma', 'inverse_digamma', 'InverseDigamma'
)


def positive(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise i.InputError(
            'domain',
            '%s is defined for x > 0, got %r.' % (name, x)
        )
    return arr

def scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value

def log_gamma(x):
    return scalar_or_array(sc.gammaln(positive(x, 'log_gamma')))

def digamma(x):
    return scalar_or_array(sc.psi(positive(x, 'digamma')))

def trigamma(x):
    return scalar_or_array(sc.polygamma(1, positive(x, 'trigamma')))


### Inversion

InverseDigamma = namedtuple('InverseDigamma', 'value iterations')

EULER = -sc.psi(1.0)

def inverse_digamma(a, x0=None, tol=1e-12, max_iter=100, detail=False):
    """Solve psi(x) = a for x > 0 by Newton-Raphson.

    The iteration starts from x0 (or Minka's approximation when x0 is
    None).  psi is increasing and concave, so a Newton step taken from
    the left of the root never overshoots; a step from the right may
    leave the positive half-line, in which case the iterate is halved
    instead.
    """

    if x0 is None:
        x = np.exp(a) + 0.5 if a >= -2.22 else -1.0 / (a + EULER)
    else:
        x = float(positive(x0, 'inverse_digamma'))

    for iteration in range(1, max_iter + 1):
        step = (sc.psi(x) - a) / sc.polygamma(1, x)
        new = x - step
        if new <= 0:
            new = x / 2.0
        done = abs(new - x) < tol * max(1.0, x)
        x = float(new)
        if done:
            return InverseDigamma(x, iteration) if detail else x

    raise i.ConvergenceError(
        'inverse-digamma',
        'psi(x) = %r did not converge in %d iterations.' % (a, max_iter)
    )
