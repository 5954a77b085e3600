## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""cli -- the ebrank command

    ebrank score extract5.csv --method ebef --out scores.csv
    ebrank fit extract5.csv --optimizer lm --mask diag
    ebrank fit tiny3.csv --bench
    ebrank compare extract5.csv --methods pr,ebpr,ebef
    ebrank halfsample extract5.csv --m 200 --a 10 --b 10 --seed 7
    ebrank kappa extract5.csv

Every table goes to --out (stdout by default) and, when --out or
--json is given, a JSON sidecar with the numbers and a run manifest.
Exit status is 0 on success, 2 for bad input and 3 when a numerical
procedure fails.
"""

from __future__ import absolute_import
import argparse, logging, os, sys
import pandas as pd
from . import interfaces as i
from .matrix import load_matrix, load_articles
from .markov import article_influence
from .optimize import bench, fit
from .analysis import compare_rankings, self_citation_profile, \
    HalfSampleConfig, half_sampling_study
from .application import make_method, score_settings, RunManifest, VERSION
from .tables import *
from .prelude import *

__all__ = ('main', 'parser')

OUTPUT_DIR = 'EBRANK_OUTPUT_DIR'
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


### Commands

def cmd_score(args):
    alphas = parse_floats(args.alpha, 'alpha')
    if len(alphas) > 1 and args.method not in ('pr', 'eifa'):
        raise i.InputError(
            'bad-option', 'An alpha sweep only applies to pr and eifa.'
        )

    matrix = read_matrix(args)
    runs = []
    for alpha in alphas:
        method = make_method(args.method, score_options(args, alpha=alpha))
        prepared = method.prepare(matrix)
        fitted = method.fit(prepared)
        score = method.score(prepared, fitted)
        influence = (
            article_influence(score, matrix.articles)
            if matrix.articles is not None else None
        )
        runs.append((alpha, method, fitted, score, influence))

    frames = []
    for (alpha, method, fitted, score, influence) in runs:
        frame = score_table(score.scaled(args.scale), influence)
        if len(alphas) > 1:
            frame.insert(0, 'alpha', alpha)
        frames.append(frame)
    write_table(pd.concat(frames, ignore_index=True), output(args.out), delimiter(args))

    (alpha, method, fitted, score, influence) = runs[-1]
    payload = {
        'method': args.method,
        'scores': [
            {
                'alpha': a,
                'normalization': s.scaled(args.scale).normalization,
                'values': s.scaled(args.scale).as_dict(),
                'iterations': s.iterations,
                'article_influence': ai.as_dict() if ai is not None else None
            }
            for (a, _, _, s, ai) in runs
        ]
    }
    if fitted is not None:
        payload['params'] = fitted.to_dict(matrix.labels)
        payload['fit'] = method.report.to_dict()
    sidecar(args, 'score', payload, method.settings)

def cmd_fit(args):
    matrix = read_matrix(args).masked('diagonal' if args.mask == 'diag' else 'none')
    settings = dict(
        optimizer=args.optimizer, mask=args.mask, start=args.start,
        eps1=args.eps1, eps2=args.eps2, max_iter=args.max_iter
    )

    if args.bench:
        reports = bench(
            matrix, eps1=args.eps1, max_iter=args.max_iter,
            eps2s=tuple(sorted(set((1e-5, 1e-6, args.eps2)), reverse=True))
        )
        write_table(bench_table(reports), output(args.out), delimiter(args))
        sidecar(args, 'fit', {'bench': [r.to_dict() for r in reports]}, settings)
        return

    (params, report) = fit(
        matrix, args.optimizer, args.start, args.eps1, args.eps2, args.max_iter
    )
    write_table(fit_table(params, matrix.labels), output(args.out), delimiter(args))
    sidecar(args, 'fit', {
        'params': params.to_dict(matrix.labels),
        'fit': report.to_dict()
    }, settings)

def cmd_compare(args):
    matrix = read_matrix(args)
    names = parse_names(args.methods)
    options = score_options(args)
    scores = []
    for name in names:
        method = make_method(name, options)
        prepared = method.prepare(matrix)
        score = method.score(prepared, method.fit(prepared))
        if matrix.articles is not None:
            score = article_influence(score, matrix.articles)
        scores.append((name, score))

    comparison = compare_rankings(scores)
    write_table(
        comparison_table(comparison), output(args.out), delimiter(args), index=True
    )
    sidecar(args, 'compare', {
        'methods': list(comparison.methods),
        'basis': 'article_influence' if matrix.articles is not None else 'total',
        'spearman': comparison.spearman,
        'kendall': comparison.kendall
    }, dict(options, methods=names))

def cmd_halfsample(args):
    matrix = read_matrix(args)
    cfg = HalfSampleConfig(args.a, args.b, args.m, args.seed, args.mode, args.delta)
    options = score_options(args)
    methods = [make_method(name, options) for name in parse_names(args.methods)]
    result = half_sampling_study(matrix, methods, cfg, args.workers)

    write_table(
        halfsample_table(result, matrix.labels), output(args.out), delimiter(args)
    )
    payload = result.to_dict()
    payload['scores'] = dict(
        (name, s.as_dict()) for (name, s) in result.scores.items()
    )
    if result.influence:
        payload['article_influence'] = dict(
            (name, s.as_dict()) for (name, s) in result.influence.items()
        )
    sidecar(args, 'halfsample', payload, dict(
        options, methods=parse_names(args.methods), **cfg._asdict()
    ))

def cmd_kappa(args):
    matrix = read_matrix(args)
    profile = self_citation_profile(matrix)
    write_table(kappa_table(profile), output(args.out), delimiter(args))
    sidecar(args, 'kappa', {'profile': profile.rows()}, {})


### Helpers

def read_matrix(args):
    sep = DELIMITERS[args.delimiter] if args.delimiter else None
    matrix = load_matrix(args.matrix, 'none', sep)
    if args.articles:
        matrix = matrix.with_articles(load_articles(args.articles, matrix.labels, sep))
    return matrix

def score_options(args, **extra):
    options = dict((k, v) for (k, v) in (
        ('alpha2', getattr(args, 'alpha2', None)),
        ('beta', getattr(args, 'beta', None)),
        ('tol', getattr(args, 'tol', None)),
        ('max_iter', getattr(args, 'power_max_iter', None)),
        ('eps1', getattr(args, 'eps1', None)),
        ('eps2', getattr(args, 'eps2', None)),
        ('fit_max_iter', getattr(args, 'max_iter', None)),
        ('optimizer', getattr(args, 'optimizer', None)),
        ('start', getattr(args, 'start', None)),
        ('cap_share', getattr(args, 'cap_share', None)),
        ('cap_rule', getattr(args, 'cap_rule', None)),
        ('teleport', getattr(args, 'teleport', None)),
        ('dangling', getattr(args, 'dangling', None))
    ) if v is not None)
    options.update(extra)
    return options

def parse_floats(text, name):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise i.InputError('bad-option', 'Cannot read %s from %r.' % (name, text))

def parse_names(text):
    return [v.strip() for v in text.split(',') if v.strip()]

def delimiter(args):
    return DELIMITERS[args.delimiter or 'comma']

def output(path):
    if path is None or os.path.isabs(path):
        return path
    return os.path.join(os.environ.get(OUTPUT_DIR, ''), path)

def sidecar(args, command, payload, settings):
    target = output(args.json) if args.json else (
        output(args.out) + '.json' if args.out else None
    )
    if target is None:
        return None
    manifest = RunManifest.create(
        command,
        {'matrix': args.matrix, 'articles': args.articles},
        dict((k, v) for (k, v) in settings.items() if k != 'state')
    )
    payload = dict(payload, manifest=manifest.to_dict())
    return write_json(payload, target)


### Parser

def parser():
    top = argparse.ArgumentParser(
        prog='ebrank',
        description='Rank the nodes of a citation network.'
    )
    top.add_argument('--version', action='version', version=VERSION)
    commands = top.add_subparsers(dest='command', required=True)

    score = common(commands.add_parser('score', help='score every node'))
    score.add_argument('--method', default='ebef',
                       choices=('pr', 'eifa', 'psjr', 'ebpr', 'ebef'))
    score.add_argument('--alpha', default='0.85',
                       help='damping factor; a comma list sweeps pr and eifa')
    score.add_argument('--scale', type=float, default=1.0,
                       help='present scores summing to this total (e.g. 1000)')
    scoring(score)
    fitting(score)

    fit = common(commands.add_parser('fit', help='fit the Dirichlet prior'))
    fit.add_argument('--mask', default='diag', choices=('diag', 'none'))
    fit.add_argument('--bench', action='store_true',
                     help='compare optimizers, starts and tolerances')
    fitting(fit, default_optimizer='lm')

    compare = common(commands.add_parser('compare', help='rank correlations'))
    compare.add_argument('--methods', default='pr,ebpr,ebef')
    scoring(compare)
    fitting(compare)

    half = common(commands.add_parser('halfsample', help='half-sampling study'))
    half.add_argument('--methods', default='ebef')
    half.add_argument('--m', type=int, default=200)
    half.add_argument('--a', type=float, default=10.0)
    half.add_argument('--b', type=float, default=10.0)
    half.add_argument('--seed', type=int, default=0)
    half.add_argument('--mode', default='beta_bernoulli',
                      choices=('beta_bernoulli', 'bernoulli'))
    half.add_argument('--delta', type=float, default=0.5)
    half.add_argument('--workers', type=int, default=None)
    scoring(half)
    fitting(half)

    common(commands.add_parser('kappa', help='self-citation weights'))
    return top

def common(sub):
    sub.add_argument('matrix', help='delimited count matrix with labels')
    sub.add_argument('--articles', help='two-column table of article counts')
    sub.add_argument('--out', help='table output path (default stdout)')
    sub.add_argument('--json', help='JSON sidecar path (default OUT.json)')
    sub.add_argument('--delimiter', choices=sorted(DELIMITERS))
    sub.add_argument('-v', '--verbose', action='count', default=0)
    return sub

def scoring(sub):
    sub.add_argument('--alpha2', type=float)
    sub.add_argument('--beta', type=float)
    sub.add_argument('--tol', type=float)
    sub.add_argument('--power-max-iter', type=int)
    sub.add_argument('--teleport', choices=('uniform', 'articles'))
    sub.add_argument('--dangling', choices=('uniform', 'prior', 'error'))
    sub.add_argument('--cap-share', type=float)
    sub.add_argument('--cap-rule', choices=('iterative', 'closed_form', 'none'))
    return sub

def fitting(sub, default_optimizer='fp+lm'):
    sub.add_argument('--optimizer', default=default_optimizer,
                     help='fp, inv, lm or a chain such as fp+lm')
    sub.add_argument('--start', default='empirical',
                     choices=('empirical', 'ones', 'perks'))
    sub.add_argument('--eps1', type=float, default=1e-8)
    sub.add_argument('--eps2', type=float, default=1e-6)
    sub.add_argument('--max-iter', type=int, default=1000)
    return sub

COMMANDS = {
    'score': cmd_score,
    'fit': cmd_fit,
    'compare': cmd_compare,
    'halfsample': cmd_halfsample,
    'kappa': cmd_kappa
}

def main(argv=None):
    args = parser().parse_args(argv)
    log.setLevel(
        (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    )
    try:
        COMMANDS[args.command](args)
    except i.InputError as exc:
        log.error('%s', exc)
        return EXIT_INPUT
    except i.NumericalError as exc:
        log.error('%s', exc)
        return EXIT_NUMERICAL
    return 0

if __name__ == '__main__':
    sys.exit(main())
