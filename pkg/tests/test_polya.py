## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

import math
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from ebrank import interfaces as i
from ebrank.polya import *
from conftest import square, TINY


def rising(x, k):
    return sum(math.log(x + t) for t in range(int(k)))

def polya_row(counts, gamma, allowed):
    """log of the Polya mass of one row, multinomial coefficient left out,
    as a product of rising factorials."""

    K = sum(g for (g, a) in zip(gamma, allowed) if a)
    n = sum(c for (c, a) in zip(counts, allowed) if a)
    if K == 0:
        return 0.0
    cells = sum(
        rising(g, c) for (c, g, a) in zip(counts, gamma, allowed) if a
    )
    return cells - rising(K, n)

def oracle(matrix, gamma, rows=None):
    rows = range(matrix.size) if rows is None else rows
    return sum(
        polya_row(matrix.counts[r], gamma, matrix.allowed[r]) for r in rows
    )

def random_instances(seed=5):
    rng = np.random.default_rng(seed)
    for size in (4, 6):
        for _ in range(10):
            counts = rng.integers(0, 15, size=(size, size))
            gamma = rng.uniform(0.3, 4.0, size=size)
            yield (square(counts, mask='diagonal'), gamma)

def central(fn, x, h):
    out = []
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        out.append((fn(x + step) - fn(x - step)) / (2 * h))
    return np.array(out)


### Likelihood

def test_two_nodes_have_constant_likelihood():
    m = square([[4, 5], [3, 9]], mask='diagonal')
    for gamma in ([1.0, 1.0], [0.1, 7.0], [3.0, 0.02]):
        assert abs(marginal_log_likelihood(m, gamma)) < 1e-10
        assert_allclose(gradient(m, gamma), 0.0, atol=1e-10)
        assert_allclose(hessian(m, gamma), 0.0, atol=1e-9)

def test_rising_factorial_oracle(tiny):
    gamma = np.ones(3)
    assert marginal_log_likelihood(tiny, gamma) == pytest.approx(
        oracle(tiny, gamma), abs=1e-10
    )

def test_oracle_on_random_gamma(tiny):
    rng = np.random.default_rng(2)
    for gamma in rng.uniform(0.2, 5.0, size=(5, 3)):
        assert marginal_log_likelihood(tiny, gamma) == pytest.approx(
            oracle(tiny, gamma), abs=1e-9
        )

def test_empty_row_adds_nothing():
    counts = np.zeros((4, 4), dtype=int)
    counts[:3, :3] = TINY
    counts[:3, 3] = [2, 0, 1]
    m = square(counts, mask='diagonal')
    gamma = np.array([1.0, 2.0, 0.5, 1.5])
    assert marginal_log_likelihood(m, gamma) == pytest.approx(
        oracle(m, gamma, rows=range(3)), abs=1e-10
    )

def test_nonpositive_gamma(tiny):
    for fn in (marginal_log_likelihood, gradient, hessian):
        with pytest.raises(i.InputError):
            fn(tiny, [1.0, 0.0, 1.0])


### Derivatives

def test_gradient_matches_finite_differences():
    for (m, gamma) in random_instances():
        numeric = central(lambda g: marginal_log_likelihood(m, g), gamma, 1e-6)
        assert_allclose(gradient(m, gamma), numeric, rtol=1e-6, atol=1e-6)

def test_gradient_on_small_instance(tiny):
    gamma = np.ones(3)
    numeric = central(lambda g: marginal_log_likelihood(tiny, g), gamma, 1e-6)
    assert_allclose(gradient(tiny, gamma), numeric, rtol=1e-6, atol=1e-8)

def test_gradient_by_hand(tiny):
    ## Row 2 cites node 0 four times and node 1 once.
    from scipy.special import psi
    g = np.ones(3)
    n = [3, 2, 5]
    expected = np.zeros(3)
    for j in range(3):
        for r in range(3):
            if r != j:
                expected[j] += (
                    psi(2.0) - psi(n[r] + 2.0)
                    + psi(TINY[r][j] + 1.0) - psi(1.0)
                )
    assert_allclose(gradient(tiny, g), expected, atol=1e-12)

def test_hessian_matches_finite_differences():
    for (m, gamma) in random_instances(seed=9):
        numeric = central(lambda g: gradient(m, g), gamma, 1e-5)
        assert_allclose(hessian(m, gamma), numeric, rtol=1e-4, atol=1e-6)

def test_hessian_is_exactly_symmetric():
    for (m, gamma) in random_instances(seed=1):
        H = hessian(m, gamma)
        assert_array_equal(H, H.T)


### Parameters

def test_params_invariants(extract_diag):
    gamma = np.array([1.0, 2.0, 3.0, 0.5, 0.25])
    p = DirichletParams.from_gamma(extract_diag, gamma)
    assert p.K == pytest.approx(gamma.sum(), abs=1e-10)
    assert_allclose(p.K_leave, p.K - gamma, atol=1e-10)
    n = np.array([10, 37, 34, 7, 58])
    assert_allclose(p.alpha, n / (n + p.K - gamma))
    assert ((p.alpha >= 0) & (p.alpha < 1)).all()
    assert p.mask_aware

def test_alpha_is_zero_for_empty_rows():
    m = square([[0, 0, 0], [1, 0, 2], [3, 1, 0]], mask='diagonal')
    p = DirichletParams.from_gamma(m, np.ones(3))
    assert p.alpha[0] == 0.0
    assert (p.alpha[1:] > 0).all()

def test_unmasked_params_use_full_concentration(extract):
    gamma = np.ones(5)
    p = DirichletParams.from_gamma(extract, gamma)
    assert_allclose(p.K_leave, 5.0)
    assert not p.mask_aware

def test_prior_rows(extract_diag):
    p = DirichletParams.from_gamma(extract_diag, np.ones(5))
    rows = p.prior_rows()
    assert_allclose(rows.sum(axis=1), 1.0)
    assert (rows.diagonal() == 0).all()

@pytest.mark.parametrize('kind, size, value, K', [
    ('bayes_laplace', 5, 1.0, 5.0),
    ('jeffreys', 4, 0.5, 2.0),
    ('perks', 10, 0.1, 1.0),
])
def test_presets(kind, size, value, K):
    p = prior_preset(kind, size)
    assert_allclose(p.gamma, value)
    assert p.K == pytest.approx(K)

def test_unknown_preset():
    with pytest.raises(i.InputError):
        prior_preset('haldane', 3)


### Starting values

def test_empirical_start(extract_diag):
    counts = extract_diag.counts
    expected = 5 * counts.sum(axis=0) / counts.sum()
    assert_allclose(starting_values(extract_diag), expected)

def test_named_starts(extract_diag):
    assert_allclose(starting_values(extract_diag, 'ones'), 1.0)
    assert_allclose(starting_values(extract_diag, 'perks'), 0.2)

def test_start_needs_data():
    with pytest.raises(i.DegenerateData):
        starting_values(square(np.zeros((3, 3), int), mask='diagonal'))

def test_empty_columns():
    m = square([[0, 5, 0], [3, 0, 0], [4, 6, 0]], mask='diagonal')
    assert empty_columns(m).tolist() == [False, False, True]
