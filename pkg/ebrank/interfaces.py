## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""interfaces -- abstract interfaces"""

from __future__ import absolute_import
import abc

__all__ = (
    'Event', 'Optimizer', 'Method',
    'EbrankError', 'InputError', 'MissingArticles', 'MaskMismatch',
    'UndefinedCorrelation', 'NumericalError', 'ConvergenceError',
    'DegenerateData', 'SingularSystem'
)


### Events

class Event(object):
    """Subclass this to declare a new Event.  Use the docstring to
    describe the event and how it should be used."""


### Optimizers

class Optimizer(abc.ABC):
    """Maximize the marginal Polya likelihood of a CitationMatrix.  See
    optimize.py.  Concrete classes declare their short name in
    __algorithm__ ('FP', 'INV', 'LM')."""

    __algorithm__ = None

    @abc.abstractmethod
    def start(self, matrix, gamma):
        """Prepare per-fit state for a starting vector gamma."""

    @abc.abstractmethod
    def step(self, gamma):
        """Produce the next iterate.  Return (gamma, change) where change
        is the value compared against eps2 by the stopping rule."""


### Scoring methods

class Method(abc.ABC):
    """A named scoring pipeline (pr, eifa, psjr, ebpr, ebef).  See
    application.py."""

    __method__ = None

    ## True when fit() produces Dirichlet parameters that score() uses.
    fitted = False

    @abc.abstractmethod
    def prepare(self, matrix):
        """Apply the method's structural mask and count preprocessing."""

    def fit(self, matrix):
        """Estimate hyperparameters on a prepared matrix; None when the
        method has nothing to estimate."""
        return None

    @abc.abstractmethod
    def score(self, matrix, fitted=None):
        """Return the stationary ScoreVector of a prepared matrix."""


### Exceptions

class EbrankError(Exception):

    def __init__(self, condition, text, *args):
        super(EbrankError, self).__init__(condition, text, *args)
        self.condition = condition
        self.text = text

    def __str__(self):
        return ': '.join((self.condition, self.text))

class InputError(EbrankError):
    """Malformed input: a bad file, label, entry or argument."""

class MissingArticles(InputError):

    def __init__(self, text='article counts are required'):
        super(MissingArticles, self).__init__('missing-articles', text)

class MaskMismatch(InputError):

    def __init__(self, text='parameters were fitted under another mask'):
        super(MaskMismatch, self).__init__('mask-mismatch', text)

class UndefinedCorrelation(InputError):

    def __init__(self, text='rank correlation of a constant vector'):
        super(UndefinedCorrelation, self).__init__('undefined-correlation', text)

class NumericalError(EbrankError):
    """A numerical procedure failed on well-formed input."""

class ConvergenceError(NumericalError):
    pass

class DegenerateData(NumericalError):
    pass

class SingularSystem(NumericalError):
    pass
