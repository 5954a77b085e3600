## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""application -- scoring method constructors

These are shortcuts for scoring a citation matrix.  All that's really
necessary is:

    method = make_method('ebef', {})
    prepared = method.prepare(matrix)
    score = method.score(prepared, method.fit(prepared))

make_method() resolves settings into the form the pipelines need
(default alpha, teleportation, optimizer options and so on).
"""

from __future__ import absolute_import
import hashlib
from . import interfaces as i
from .matrix import transition_matrix, cap_self_citations
from .markov import TeleportVector, google_matrix, psjr_matrix, \
    stationary_distribution
from .smoothing import FitOptions, smoothed_score
from .prelude import *

__all__ = (
    'VERSION', 'METHODS', 'default_settings', 'score_settings', 'make_method',
    'teleport_vector', 'PageRank', 'Eigenfactor', 'ScimagoRank',
    'EmpiricalBayesPageRank', 'EmpiricalBayesEigenfactor', 'RunManifest',
    'digest'
)

VERSION = '0.1.0'


### Settings

def default_settings(settings, defaults):
    """Create missing settings by making default values."""

    for (name, default) in defaults:
        if name not in settings:
            settings[name] = default(settings)
    return settings

def constant(value):
    return lambda settings: value

def score_settings(settings):
    return default_settings(settings, (
        ('method', constant('ebef')),
        ('alpha', constant(0.85)),
        ('alpha2', constant(0.90)),
        ('beta', constant(1e-4)),
        ('tol', constant(1e-12)),
        ('max_iter', constant(10000)),
        ('eps1', constant(1e-8)),
        ('eps2', constant(1e-6)),
        ('fit_max_iter', constant(1000)),
        ('optimizer', constant('fp+lm')),
        ('start', constant('empirical')),
        ('cap_share', constant(0.33)),
        ('cap_rule', constant('iterative')),
        ('teleport', default_teleport),
        ('dangling', constant(None)),
        ('state', constant(None))
    ))

def default_teleport(settings):
    ## Eigenfactor and PSJR teleport in proportion to article counts.
    return 'articles' if settings['method'] in ('eifa', 'psjr') else 'uniform'

def teleport_vector(matrix, kind):
    if kind == 'uniform':
        return TeleportVector.uniform(matrix.size)
    elif kind == 'articles':
        return TeleportVector.article_share(matrix.require_articles())
    raise i.InputError(
        'bad-option', "Unknown teleport %r; use 'uniform' or 'articles'." % kind
    )


### Methods

METHODS = {}

class MethodType(abc.ABCMeta):
    """Register every concrete method under its __method__ name."""

    def __new__(mcls, name, bases, attr):
        cls = abc.ABCMeta.__new__(mcls, name, bases, attr)
        if attr.get('__method__'):
            METHODS[attr['__method__']] = cls
        return cls

def make_method(name, settings):
    settings = score_settings(dict(settings, method=name))
    try:
        cls = METHODS[name]
    except KeyError:
        raise i.InputError(
            'bad-option',
            'Unknown method %r; expected one of %s.' % (
                name, ', '.join(sorted(METHODS))
            )
        )
    return cls(settings)

class Method(i.Method, metaclass=MethodType):

    mask = 'none'

    def __init__(self, settings):
        self.settings = settings

    def __repr__(self):
        return '<%s %s>' % (type(self).__name__, self.__method__)

    def prepare(self, matrix):
        return matrix.masked(self.mask)

    def teleport(self, matrix):
        return teleport_vector(matrix, self.settings['teleport'])

    def stationary(self, G):
        score = stationary_distribution(
            G, self.settings['tol'], self.settings['max_iter']
        )
        return score.replace(method=self.__method__)

class PageRank(Method):
    """G = alpha P + (1 - alpha) 1 t' on the full counts."""

    __method__ = 'pr'

    def score(self, matrix, fitted=None):
        t = self.teleport(matrix)
        P = transition_matrix(matrix, self.settings['dangling'], t)
        return self.stationary(google_matrix(P, self.settings['alpha'], t))

class Eigenfactor(PageRank):
    """PageRank without self-citations, teleporting by article share."""

    __method__ = 'eifa'
    mask = 'diagonal'

class ScimagoRank(Method):
    """Self-citations capped to a share of each row, then
    G2 = alpha2 P + (1 - alpha2 - beta) 1 pi' + beta 1 1' / N."""

    __method__ = 'psjr'

    def prepare(self, matrix):
        capped = cap_self_citations(
            matrix, self.settings['cap_share'], self.settings['cap_rule']
        )
        return capped.masked('none')

    def score(self, matrix, fitted=None):
        pi = self.teleport(matrix)
        P = transition_matrix(matrix, self.settings['dangling'], pi)
        return self.stationary(psjr_matrix(
            P, self.settings['alpha2'], self.settings['beta'], pi
        ))

class EmpiricalBayesPageRank(Method):

    __method__ = 'ebpr'
    fitted = True

    def options(self):
        s = self.settings
        return FitOptions(
            s['optimizer'], s['start'], s['eps1'], s['eps2'],
            s['fit_max_iter'], s['tol'], s['max_iter'], s['state']
        )

    def fit(self, matrix):
        (params, report) = self.options().fit(matrix)
        self.report = report
        return params

    def score(self, matrix, fitted=None):
        if fitted is None:
            fitted = self.fit(matrix)
        score = smoothed_score(matrix, fitted, self.options())
        return score.replace(method=self.__method__)

class EmpiricalBayesEigenfactor(EmpiricalBayesPageRank):

    __method__ = 'ebef'
    mask = 'diagonal'


### Manifests

def digest(path):
    sha = hashlib.sha256()
    with open(path, 'rb') as stream:
        for chunk in iter(partial(stream.read, 1 << 16), b''):
            sha.update(chunk)
    return sha.hexdigest()

class RunManifest(object):
    """Everything needed to repeat a run: the command, a digest of every
    input file and every resolved parameter."""

    __slots__ = ('command', 'inputs', 'parameters', 'version')

    def __init__(self, command, inputs=None, parameters=None, version=VERSION):
        self.command = command
        self.inputs = dict(inputs or {})
        self.parameters = dict(parameters or {})
        self.version = version

    def __eq__(self, other):
        return isinstance(other, RunManifest) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return '<%s %s>' % (type(self).__name__, self.command)

    @classmethod
    def create(cls, command, paths, parameters):
        return cls(
            command,
            dict((name, digest(path)) for (name, path) in paths.items() if path),
            parameters
        )

    def to_dict(self):
        return {
            'command': self.command,
            'inputs': dict(self.inputs),
            'parameters': dict(self.parameters),
            'version': self.version
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data['command'], data.get('inputs'), data.get('parameters'),
            data.get('version', VERSION)
        )
