## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""optimize -- maximum marginal likelihood for the Polya model

Three optimizers share one driver:

  FP   the multiplicative fixed point (a minorize-maximize ascent; the
       likelihood never decreases)
  INV  solve psi(gamma_j) = a_j by Newton for every j, where a_j collects
       the other terms of the first-order condition
  LM   Levenberg-Marquardt on -L with an adaptive damping factor

Columns with no counts over non-masked cells have no finite optimum
(gamma_j -> 0).  They are held at GAMMA_FLOOR and reported in
FitReport.flagged.

Usage:

    params, report = fit(matrix, 'fp+lm')
    params, report = fit_levenberg_marquardt(matrix, start='ones')
"""

from __future__ import absolute_import
import numpy as np
from scipy import linalg
from scipy import special as sc
from . import interfaces as i
from .polya import (
    DirichletParams, marginal_log_likelihood, gradient, hessian, terms,
    starting_values, empty_columns, GAMMA_FLOOR
)
from .special import inverse_digamma
from .state import State, IterationFinished, FitFinished, Iteration, \
    TraceRecorder, log_iteration
from .prelude import *

__all__ = (
    'FitReport', 'FixedPoint', 'Inversion', 'LevenbergMarquardt',
    'fit', 'fit_fixed_point', 'fit_inversion', 'fit_levenberg_marquardt',
    'fit_concentration_only', 'bench', 'OPTIMIZERS', 'DIVERGENCE'
)

## Concentration beyond which the likelihood is taken to increase
## without bound (rows proportional to a common vector).
DIVERGENCE = 1e10


### Reports

class FitReport(object):
    """What an optimizer did.

    final_loglik is marginal_log_likelihood() at the returned gamma, so
    it excludes the multinomial coefficient.  Its derivatives use
    +psi(K_i) - psi(n_i + K_i) + psi(c_ij + gamma_j) - psi(gamma_j);
    these signs are the ones a finite difference of the likelihood
    confirms.  trace holds (loglik, change) for every accepted
    iteration.
    """

    __slots__ = (
        'algorithm', 'iterations', 'final_loglik', 'converged',
        'elapsed_seconds', 'trace', 'start', 'eps2', 'flagged', 'stages'
    )

    def __init__(self, algorithm, iterations, final_loglik, converged,
                 elapsed_seconds, trace=(), start=None, eps2=None,
                 flagged=(), stages=None):
        self.algorithm = algorithm
        self.iterations = iterations
        self.final_loglik = final_loglik
        self.converged = converged
        self.elapsed_seconds = elapsed_seconds
        self.trace = list(trace)
        self.start = start
        self.eps2 = eps2
        self.flagged = tuple(flagged)
        self.stages = tuple(stages or (algorithm,))

    def __repr__(self):
        return '<%s %s iterations=%d loglik=%.10g%s>' % (
            type(self).__name__, '+'.join(self.stages), self.iterations,
            self.final_loglik, '' if self.converged else ' not-converged'
        )

    def to_dict(self):
        return {
            'algorithm': self.algorithm,
            'stages': list(self.stages),
            'iterations': self.iterations,
            'final_loglik': self.final_loglik,
            'converged': self.converged,
            'elapsed_seconds': self.elapsed_seconds,
            'start': self.start,
            'eps2': self.eps2,
            'flagged': list(self.flagged),
            'trace': [list(t) for t in self.trace]
        }


### Optimizers

OPTIMIZERS = {}

class OptimizerType(abc.ABCMeta):
    """Register every concrete optimizer under its __algorithm__."""

    def __new__(mcls, name, bases, attr):
        cls = abc.ABCMeta.__new__(mcls, name, bases, attr)
        if attr.get('__algorithm__'):
            OPTIMIZERS[attr['__algorithm__'].lower()] = cls
        return cls

class Ascent(i.Optimizer, metaclass=OptimizerType):
    """Shared state for the gamma optimizers.  After start(), free marks
    the columns being optimized and loglik is L at the current iterate."""

    def __init__(self, eps1=1e-8):
        self.eps1 = eps1
        self.matrix = None
        self.free = None
        self.loglik = None

    def start(self, matrix, gamma, flagged=None):
        self.matrix = matrix
        self.free = ~(empty_columns(matrix) if flagged is None else flagged)
        self.loglik = self.objective(gamma)
        return self

    def objective(self, gamma):
        return marginal_log_likelihood(self.matrix, gamma)

    def relative_change(self, old, new):
        return float(np.max(np.abs(new - old) / (np.abs(old) + self.eps1)))

    def finish(self, gamma):
        """Extra DirichletParams keywords (standard errors)."""
        return {}

    def degenerate(self, what, values):
        bad = np.flatnonzero(self.free & ~(values > 0))
        labels = ', '.join(self.matrix.labels[k] for k in bad)
        log.error('Nonpositive %s for column(s) %s.', what, labels)
        raise i.DegenerateData(
            'degenerate-column',
            'The fixed-point %s is not positive for column(s) %s.' % (what, labels)
        )

class FixedPoint(Ascent):
    """gamma_j <- gamma_j * sum_i [psi(c_ij + gamma_j) - psi(gamma_j)]
                          / sum_i [psi(n_i + K_i) - psi(K_i)]"""

    __algorithm__ = 'FP'

    def update(self, gamma):
        t = terms(self.matrix, gamma)
        numer = (t.allowed * (sc.psi(t.counts + gamma) - sc.psi(gamma))).sum(axis=0)
        D = np.zeros(gamma.size)
        D[t.live] = sc.psi(t.n[t.live] + t.K_leave[t.live]) - sc.psi(t.K_leave[t.live])
        denom = t.allowed.T @ D
        return (numer, denom)

    def step(self, gamma):
        (numer, denom) = self.update(gamma)
        free = self.free
        if not (numer[free] > 0).all():
            self.degenerate('numerator', numer)
        if not (denom[free] > 0).all():
            self.degenerate('denominator', denom)

        new = gamma.copy()
        new[free] = gamma[free] * numer[free] / denom[free]
        self.loglik = self.objective(new)
        return (new, self.relative_change(gamma, new))

class Inversion(Ascent):
    """psi(gamma_j) = a_j with
        a_j = (sum_i [psi(K_i) - psi(n_i + K_i) + psi(c_ij + gamma_j)]) / m_j
    where m_j counts the rows in which column j is not masked."""

    __algorithm__ = 'INV'

    def __init__(self, eps1=1e-8, tol=1e-12):
        super(Inversion, self).__init__(eps1)
        self.tol = tol
        self.inner_iterations = []

    def targets(self, gamma):
        t = terms(self.matrix, gamma)
        D = np.zeros(gamma.size)
        D[t.live] = sc.psi(t.K_leave[t.live]) - sc.psi(t.n[t.live] + t.K_leave[t.live])
        total = t.allowed.T @ D + (t.allowed * sc.psi(t.counts + gamma)).sum(axis=0)
        rows = t.allowed.sum(axis=0)
        return np.divide(total, rows, out=np.zeros_like(total), where=rows > 0)

    def step(self, gamma):
        a = self.targets(gamma)
        new = gamma.copy()
        inner = 0
        for j in np.flatnonzero(self.free):
            solved = inverse_digamma(a[j], x0=gamma[j], tol=self.tol, detail=True)
            new[j] = solved.value
            inner = max(inner, solved.iterations)
        self.inner_iterations.append(inner)
        self.loglik = self.objective(new)
        return (new, self.relative_change(gamma, new))

class LevenbergMarquardt(Ascent):
    """Damped Newton steps on A = -H restricted to the free columns:

        (A + lam * D) delta = g,   D = diag(|A_jj|)

    A step is kept when the gain ratio

        rho = (L(gamma + delta) - L(gamma)) / (delta'A delta / 2 + lam delta'D delta / 2)

    is positive; then lam <- lam * max(1/3, 1 - (2 rho - 1)^3), otherwise
    lam <- 2 lam.  A step that would leave the positive orthant is halved
    until it does not.  Rejected steps return change None."""

    __algorithm__ = 'LM'

    ESCALATIONS = 50
    HALVINGS = 60

    def __init__(self, eps1=1e-8, eps2=1e-6, lam=1e-3):
        super(LevenbergMarquardt, self).__init__(eps1)
        self.eps2 = eps2
        self.lam0 = lam
        self.lam = lam
        self.rho = None

    def start(self, matrix, gamma, flagged=None):
        self.lam = self.lam0
        return super(LevenbergMarquardt, self).start(matrix, gamma, flagged)

    def derivatives(self, gamma):
        free = self.free
        g = gradient(self.matrix, gamma)[free]
        A = -hessian(self.matrix, gamma)[np.ix_(free, free)]
        return (g, A)

    def escalate(self, lam):
        return 1e-3 if lam == 0 else 2.0 * lam

    def solve(self, g, A):
        scale = np.maximum(np.abs(np.diag(A)), np.finfo(float).tiny)
        lam = self.lam
        for _ in range(self.ESCALATIONS + 1):
            try:
                factor = linalg.cho_factor(A + lam * np.diag(scale))
                self.lam = lam
                return (linalg.cho_solve(factor, g), scale)
            except linalg.LinAlgError:
                lam = self.escalate(lam)
        log.error('Damped system still singular at lambda=%.3g.', lam)
        raise i.SingularSystem(
            'singular-system',
            'The damped system stayed singular after %d escalations.'
            % self.ESCALATIONS
        )

    def step(self, gamma):
        free = self.free
        (g, A) = self.derivatives(gamma)
        if np.max(np.abs(g), initial=0.0) <= 1e-12 * (1.0 + abs(self.loglik)):
            return (gamma, 0.0)

        (delta, scale) = self.solve(g, A)
        new = gamma.copy()
        for _ in range(self.HALVINGS):
            new[free] = gamma[free] + delta
            if (new[free] > 0).all():
                break
            delta = delta / 2.0
        else:
            raise i.ConvergenceError(
                'positivity', 'Could not keep gamma positive along the step.'
            )

        change = float(np.linalg.norm(new - gamma) / (np.linalg.norm(gamma) + self.eps1))
        loglik = self.objective(new)
        predicted = 0.5 * (delta @ A @ delta) + 0.5 * self.lam * (delta @ (scale * delta))
        actual = loglik - self.loglik
        self.rho = actual / predicted if predicted > 0 else -np.inf

        if self.rho > 0:
            self.lam *= max(1.0 / 3.0, 1.0 - (2.0 * self.rho - 1.0) ** 3)
            self.loglik = loglik
            return (new, change)
        elif change < self.eps2 and actual >= -1e-12 * (1.0 + abs(self.loglik)):
            ## Rounding noise at the optimum.
            return (gamma, change)

        self.lam = self.escalate(self.lam)
        return (gamma, None)

    def finish(self, gamma):
        free = self.free
        (_, A) = self.derivatives(gamma)
        try:
            factor = linalg.cho_factor(A)
        except linalg.LinAlgError:
            log.warning('Observed information is not positive definite; '
                        'no standard errors.')
            return {}

        cov = linalg.cho_solve(factor, np.eye(A.shape[0]))
        errors = np.full(gamma.size, np.nan)
        errors[free] = np.sqrt(np.diag(cov))
        return {
            'std_errors': errors.tolist(),
            'K_std_error': float(np.sqrt(cov.sum()))
        }


### Driver

def run(optimizer, matrix, start='empirical', eps2=1e-6, max_iter=1000,
        state=None, strict=True, start_label=None):
    """Iterate optimizer from start until the relative change drops
    below eps2.  Returns (DirichletParams, FitReport).  With strict off,
    running out of iterations returns a report with converged False
    instead of raising."""

    check_max_iter(max_iter)
    gamma0 = starting_values(matrix, start)
    flagged = empty_columns(matrix)
    if flagged.all():
        raise i.DegenerateData('no-data', 'Every non-masked count is zero.')
    if flagged.any():
        log.warning(
            'Column(s) without counts held at %g: %s.', GAMMA_FLOOR,
            ', '.join(l for (l, f) in zip(matrix.labels, flagged) if f)
        )
    gamma = np.where(flagged, GAMMA_FLOOR, gamma0)

    hub = state if state is not None else State()
    recorder = TraceRecorder(hub)
    hub.bind(IterationFinished, log_iteration)
    algorithm = optimizer.__algorithm__
    converged = False
    try:
        with stopwatch() as watch:
            optimizer.start(matrix, gamma, flagged)
            for index in range(1, max_iter + 1):
                (gamma, change) = optimizer.step(gamma)
                hub.trigger(IterationFinished, Iteration(
                    algorithm, index, optimizer.loglik,
                    np.nan if change is None else change, change is not None
                ))
                if gamma.sum() > DIVERGENCE:
                    log.error('%s: concentration diverges (K=%.3g).', algorithm, gamma.sum())
                    raise i.ConvergenceError(
                        'concentration-diverges',
                        'K exceeded %g; the data show no overdispersion '
                        'and the likelihood has no finite maximum.' % DIVERGENCE
                    )
                if change is not None and change < eps2:
                    converged = True
                    break
    finally:
        recorder.remove(hub)
        hub.unbind(IterationFinished, log_iteration)

    if not converged:
        log.error('%s did not converge in %d iterations.', algorithm, max_iter)
        if strict:
            raise i.ConvergenceError(
                'max-iter',
                '%s did not converge in %d iterations.' % (algorithm, max_iter)
            )
    else:
        log.info('%s converged in %d iterations.', algorithm, index)
        check_bounded(matrix, gamma, algorithm)

    params = DirichletParams.from_gamma(
        matrix, gamma, flagged=flagged, **optimizer.finish(gamma)
    )
    report = FitReport(
        algorithm, index, marginal_log_likelihood(matrix, gamma), converged,
        watch.elapsed, recorder.trace,
        start_label or (start if isinstance(start, str) else 'custom'),
        eps2, [l for (l, f) in zip(matrix.labels, flagged) if f]
    )
    hub.trigger(FitFinished, report)
    return (params, report)

def check_max_iter(max_iter):
    if int(max_iter) < 1:
        raise i.InputError(
            'bad-option', 'max_iter must be at least 1, not %r.' % max_iter
        )

def check_bounded(matrix, gamma, algorithm):
    """A stationary point is only a maximum if the likelihood falls
    again along the ray through it.  Rows with no overdispersion let
    the gradient vanish at a large K while L(t gamma) still rises."""

    if ray_slope(matrix, gamma, 2.0) > 0:
        log.error('%s: stopped at K=%.3g but the likelihood still rises '
                  'along gamma.', algorithm, gamma.sum())
        raise i.ConvergenceError(
            'concentration-diverges',
            'The likelihood increases along the ray through K=%.6g; '
            'the data show no overdispersion and there is no finite '
            'maximum.' % gamma.sum()
        )

def ray_slope(matrix, gamma, t):
    """d/dt L(t gamma) at t."""

    return float(gamma @ gradient(matrix, t * gamma))

def fit_fixed_point(matrix, start='empirical', eps1=1e-8, eps2=1e-6,
                    max_iter=1000, state=None, strict=True):
    return run(FixedPoint(eps1), matrix, start, eps2, max_iter, state, strict)

def fit_inversion(matrix, start='empirical', eps1=1e-8, eps2=1e-6,
                  max_iter=1000, state=None, strict=True):
    return run(Inversion(eps1), matrix, start, eps2, max_iter, state, strict)

def fit_levenberg_marquardt(matrix, start='empirical', eps1=1e-8, eps2=1e-6,
                            max_iter=1000, state=None, strict=True, lam=1e-3):
    return run(
        LevenbergMarquardt(eps1, eps2, lam), matrix, start, eps2, max_iter,
        state, strict
    )

def make_optimizer(name, eps1, eps2):
    try:
        cls = OPTIMIZERS[name.lower()]
    except KeyError:
        raise i.InputError(
            'bad-option',
            'Unknown optimizer %r; expected one of %s (or a chain such as fp+lm).'
            % (name, ', '.join(sorted(OPTIMIZERS)))
        )
    return cls(eps1, eps2) if cls is LevenbergMarquardt else cls(eps1)

def fit(matrix, optimizer='fp+lm', start='empirical', eps1=1e-8, eps2=1e-6,
        max_iter=1000, state=None):
    """Run one optimizer, or a chain like 'fp+lm' where every stage
    starts from the previous stage's gamma.  The report carries the last
    stage's convergence and the summed iterations and time."""

    stages = [make_optimizer(name, eps1, eps2) for name in optimizer.split('+')]
    label = start if isinstance(start, str) else 'custom'
    reports = []
    for stage in stages:
        (params, report) = run(
            stage, matrix, start, eps2, max_iter, state, start_label=label
        )
        reports.append(report)
        start = params.gamma

    last = reports[-1]
    return (params, FitReport(
        last.algorithm,
        sum(r.iterations for r in reports),
        last.final_loglik,
        last.converged,
        sum(r.elapsed_seconds for r in reports),
        ichain(r.trace for r in reports),
        label, eps2, last.flagged,
        [r.algorithm for r in reports]
    ))


### Concentration only

def fit_concentration_only(matrix, pi='columns', K0=None, eps1=1e-8,
                           eps2=1e-6, max_iter=1000, state=None):
    """Fix the prior shape pi and fit only K, gamma = K pi:

        K <- K * sum_i sum_j pi_j [psi(c_ij + K pi_j) - psi(K pi_j)]
               / sum_i s_i [psi(n_i + K s_i) - psi(K s_i)]

    with s_i the pi-mass of row i's non-masked cells.  pi is 'columns'
    (c_+j / c_++), 'articles' (a_j / a_+) or a vector."""

    check_max_iter(max_iter)
    pi = concentration_shape(matrix, pi)
    allowed = matrix.allowed.astype(float)
    counts = matrix.counts.astype(float)
    n = counts.sum(axis=1)
    if n.sum() == 0:
        raise i.DegenerateData('no-data', 'Every non-masked count is zero.')

    cells = allowed * (pi > 0)[None, :]
    share = allowed @ pi
    live = (share > 0) & (n > 0)
    used = pi > 0
    K = float(matrix.size if K0 is None else K0)
    if K <= 0:
        raise i.InputError('domain', 'K0 must be positive.')

    hub = state if state is not None else State()
    recorder = TraceRecorder(hub)
    hub.bind(IterationFinished, log_iteration)
    converged = False
    try:
        with stopwatch() as watch:
            for index in range(1, max_iter + 1):
                g = K * pi[used]
                numer = (
                    cells[:, used] * pi[used]
                    * (sc.psi(counts[:, used] + g) - sc.psi(g))
                ).sum()
                s = share[live]
                denom = (s * (sc.psi(n[live] + K * s) - sc.psi(K * s))).sum()
                if not (numer > 0 and denom > 0):
                    log.error('Concentration update degenerate (%r / %r).', numer, denom)
                    raise i.DegenerateData(
                        'degenerate-concentration',
                        'The concentration update is not positive.'
                    )
                new = K * numer / denom
                change = abs(new - K) / (abs(K) + eps1)
                K = new
                hub.trigger(IterationFinished, Iteration(
                    'K', index, marginal_log_likelihood(matrix, gamma_of(K, pi)),
                    change, True
                ))
                if K > DIVERGENCE:
                    raise i.ConvergenceError(
                        'concentration-diverges',
                        'K exceeded %g; the likelihood has no finite maximum '
                        'along this prior shape.' % DIVERGENCE
                    )
                if change < eps2:
                    converged = True
                    break
    finally:
        recorder.remove(hub)
        hub.unbind(IterationFinished, log_iteration)

    if not converged:
        raise i.ConvergenceError(
            'max-iter', 'K did not converge in %d iterations.' % max_iter
        )

    log.info('Concentration K=%.6g after %d iterations.', K, index)
    gamma = gamma_of(K, pi)
    check_bounded(matrix, gamma, 'K')
    hub.trigger(FitFinished, FitReport(
        'K', index, marginal_log_likelihood(matrix, gamma), True,
        watch.elapsed, recorder.trace, 'K0', eps2
    ))
    return DirichletParams.from_gamma(matrix, gamma, flagged=~used)

def gamma_of(K, pi):
    return np.maximum(K * pi, GAMMA_FLOOR)

def concentration_shape(matrix, pi):
    if isinstance(pi, str):
        if pi == 'columns':
            column = matrix.counts.sum(axis=0).astype(float)
            if column.sum() == 0:
                raise i.DegenerateData('no-data', 'Every non-masked count is zero.')
            return column / column.sum()
        elif pi == 'articles':
            return matrix.article_shares()
        raise i.InputError(
            'bad-option', "Unknown prior shape %r; use 'columns' or 'articles'." % pi
        )

    pi = np.asarray(getattr(pi, 'probabilities', pi), dtype=float)
    if pi.shape != (matrix.size,) or (pi < 0).any() or pi.sum() <= 0:
        raise i.InputError('bad-teleport', 'The prior shape must be a nonnegative vector.')
    return pi / pi.sum()


### Comparison

def bench(matrix, algorithms=('FP', 'INV', 'LM'),
          starts=('empirical', 'ones', 'perks'), eps2s=(1e-5, 1e-6),
          eps1=1e-8, max_iter=1000):
    """Fit every algorithm x start x eps2 combination.  A failing
    combination is reported as not converged rather than raised."""

    reports = []
    for eps2 in eps2s:
        for start in starts:
            for name in algorithms:
                optimizer = make_optimizer(name, eps1, eps2)
                try:
                    (_, report) = run(
                        optimizer, matrix, start, eps2, max_iter, strict=False
                    )
                except i.NumericalError as exc:
                    log.warning('%s from %s failed: %s', name, start, exc)
                    report = FitReport(
                        optimizer.__algorithm__, 0, float('nan'), False, 0.0,
                        start=start, eps2=eps2
                    )
                reports.append(report)
    return reports
