## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

from ebrank.state import *


def iteration(index, accepted=True):
    return Iteration('FP', index, -float(index), 0.1, accepted)

def test_bind_and_trigger():
    seen = []
    State().bind(IterationFinished, seen.append).trigger(IterationFinished, 1)
    assert seen == [1]

def test_one_fires_once():
    seen = []
    state = State().one(FitFinished, seen.append)
    state.trigger(FitFinished, 'a').trigger(FitFinished, 'b')
    assert seen == ['a']

def test_unbind():
    seen = []
    state = State().bind(IterationFinished, seen.append)
    state.unbind(IterationFinished, seen.append).trigger(IterationFinished, 1)
    state.unbind(FitFinished, seen.append)
    assert seen == []

def test_trace_recorder_skips_rejected_steps():
    state = State()
    recorder = TraceRecorder(state)
    for (index, accepted) in ((1, True), (2, False), (3, True)):
        state.trigger(IterationFinished, iteration(index, accepted))
    recorder.remove(state)
    state.trigger(IterationFinished, iteration(4))
    assert recorder.trace == [(-1.0, 0.1), (-3.0, 0.1)]

def test_log_iteration_accepts_rejections():
    log_iteration(Iteration('LM', 1, -2.0, float('nan'), False))
