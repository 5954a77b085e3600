## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""prelude -- extra builtins"""

from __future__ import absolute_import
import os, abc, logging, time
import functools as fn, collections as coll

__all__ = (
    'abc', 'log', 'first', 'ichain', 'ddict', 'namedtuple', 'partial',
    'stopwatch'
)


### Logging

log = logging.getLogger(os.path.basename(os.path.dirname(__file__)))
log.addHandler(logging.StreamHandler())


### Sequences

def first(seq, default=None):
    return next(iter(seq), default)

def ichain(sequences):
    return (x for s in sequences for x in s)


### Mappings

ddict = coll.defaultdict
namedtuple = coll.namedtuple


### Procedures

partial = fn.partial

class stopwatch(object):
    """Measure wall-clock time spent inside a with-block.

        >>> with stopwatch() as watch:
        ...     pass
        >>> watch.elapsed >= 0.0
        True
    """

    __slots__ = ('started', 'elapsed')

    def __init__(self):
        self.started = None
        self.elapsed = 0.0

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.started
        return False
