## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""tables -- delimited result tables and JSON sidecars

Tables are for people reading rankings; every table has a JSON sidecar
carrying the same numbers plus the run manifest.  Floats are written
with a fixed format so reruns are byte-identical.
"""

from __future__ import absolute_import
import sys
import numpy as np
import pandas as pd
import simplejson as json
from .prelude import *

__all__ = (
    'score_table', 'fit_table', 'bench_table', 'comparison_table',
    'halfsample_table', 'kappa_table', 'write_table', 'write_json',
    'dumps_json', 'FLOAT_FORMAT', 'DELIMITERS'
)

FLOAT_FORMAT = '%.10g'
DELIMITERS = {'comma': ',', 'tab': '\t'}


### Tables

def score_table(score, influence=None):
    """label, score, rank (and article influence), best first."""

    order = score.order()
    frame = pd.DataFrame({
        'label': [score.labels[k] for k in order],
        'score': score.values[order],
        'rank': score.ranks()[order]
    })
    if influence is not None:
        frame['article_influence'] = influence.values[order]
        frame['article_rank'] = influence.ranks()[order]
    return frame

def fit_table(params, labels):
    return pd.DataFrame({
        'label': list(labels),
        'gamma': params.gamma,
        'std_error': (
            np.full(params.gamma.size, np.nan) if params.std_errors is None
            else np.asarray(params.std_errors, dtype=float)
        ),
        'K_leave': params.K_leave,
        'alpha': params.alpha,
        'flagged': params.flagged
    })

def bench_table(reports):
    return pd.DataFrame([
        {
            'algorithm': r.algorithm,
            'start': r.start,
            'eps2': r.eps2,
            'iterations': r.iterations,
            'seconds': r.elapsed_seconds,
            'loglik': r.final_loglik,
            'converged': r.converged
        }
        for r in reports
    ], columns=('algorithm', 'start', 'eps2', 'iterations', 'seconds',
                'loglik', 'converged'))

def comparison_table(comparison):
    """Kendall tau below the diagonal, Spearman above."""

    return pd.DataFrame(
        comparison.table(), index=list(comparison.methods),
        columns=list(comparison.methods)
    )

def halfsample_table(result, labels):
    frame = pd.DataFrame({'label': list(labels)})
    for name in result.methods:
        frame[name] = result.scores[name].values
        if result.influence:
            frame['%s_ai' % name] = result.influence[name].values
    return frame

def kappa_table(profile):
    return pd.DataFrame(profile.rows(), columns=(
        'label', 'self_citations', 'received', 'made', 'rate', 'kappa',
        'S0', 'S_kappa'
    ))


### Output

def write_table(frame, target=None, delimiter=',', index=False):
    """Write frame to a path, a stream, or stdout when target is None."""

    text = frame.to_csv(
        sep=delimiter, index=index, float_format=FLOAT_FORMAT,
        lineterminator='\n'
    )
    if target is None:
        sys.stdout.write(text)
    elif hasattr(target, 'write'):
        target.write(text)
    else:
        with open(target, 'w', encoding='utf-8') as stream:
            stream.write(text)
    return text

def dumps_json(payload):
    return json.dumps(
        payload, sort_keys=True, indent=2, ignore_nan=True,
        default=to_builtin
    ) + '\n'

def write_json(payload, target):
    text = dumps_json(payload)
    with open(target, 'w', encoding='utf-8') as stream:
        stream.write(text)
    log.debug('Wrote %s.', target)
    return text

def to_builtin(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, np.generic):
        return obj.item()
    raise TypeError('%r is not JSON serializable' % (obj,))
