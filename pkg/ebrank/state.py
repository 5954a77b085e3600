## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""state -- optimizer event management

Optimizers announce their progress by triggering Events on a State.
Anything interested in a fit (trace recorders, loggers, progress
reporting in the command line) binds a callback:

    state = State()
    state.bind(IterationFinished, lambda it: print(it.loglik))
    fit_fixed_point(matrix, state=state)

"""

from __future__ import absolute_import
from . import interfaces as i
from .prelude import *

__all__ = (
    'State', 'IterationFinished', 'FitFinished', 'Iteration', 'TraceRecorder',
    'log_iteration'
)


### Events

class IterationFinished(i.Event):
    """An optimizer accepted (or rejected) a step.  Handlers receive an
    Iteration record."""

class FitFinished(i.Event):
    """An optimizer stopped.  Handlers receive the FitReport."""

Iteration = namedtuple('Iteration', 'algorithm index loglik change accepted')


### State

class State(object):
    """Manage events for one or more fits."""

    def __init__(self):
        self.events = ddict(list)

    def clear(self):
        self.events.clear()
        return self

    def bind(self, kind, callback):
        self.events[kind].append(callback)
        return self

    def one(self, kind, callback):
        return self.bind(kind, Once(callback))

    def unbind(self, kind, callback):
        if kind in self.events:
            try:
                self.events[kind].remove(callback)
            except ValueError:
                pass
        return self

    def trigger(self, event, *args, **kwargs):
        handlers = self.events.get(event)
        if handlers:
            idx = 0; lim = len(handlers)
            while idx < lim:
                handler = handlers[idx]
                handler(*args, **kwargs)
                if isinstance(handler, Once):
                    del handlers[idx]
                    lim -= 1
                else:
                    idx += 1
        return self

class Once(namedtuple('once', 'callback')):
    """An event handler that should only be called once."""

    def __call__(self, *args, **kwargs):
        return self.callback(*args, **kwargs)


### Recorders

class TraceRecorder(object):
    """Collect (loglik, change) pairs of accepted iterations."""

    def __init__(self, state=None):
        self.trace = []
        if state is not None:
            self.install(state)

    def install(self, state):
        state.bind(IterationFinished, self.record)
        return self

    def remove(self, state):
        state.unbind(IterationFinished, self.record)
        return self

    def record(self, iteration):
        if iteration.accepted:
            self.trace.append((iteration.loglik, iteration.change))

def log_iteration(iteration):
    log.debug(
        '%s iteration %d: loglik=%.12g change=%.3g%s',
        iteration.algorithm, iteration.index, iteration.loglik,
        iteration.change, '' if iteration.accepted else ' (rejected)'
    )
