## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

import io, os
import numpy as np
import pytest
from ebrank.matrix import CitationMatrix, load_matrix, load_articles

DATA = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data')

def data_path(name):
    return os.path.join(DATA, name)

def square(rows, labels=None, mask='none'):
    rows = np.array(rows)
    labels = labels or [chr(ord('A') + k) for k in range(rows.shape[0])]
    return CitationMatrix(labels, rows).masked(mask)

def from_text(text, mask='none', delimiter=None):
    return load_matrix(io.StringIO(text), mask, delimiter)

def linear_stationary(rows):
    """Solve r (I - G) = 0, sum(r) = 1 directly."""

    size = rows.shape[0]
    A = np.eye(size) - rows.T
    A[-1] = 1.0
    b = np.zeros(size)
    b[-1] = 1.0
    return np.linalg.solve(A, b)

## Overdispersed: rows spread their references very differently.
OVERDISPERSED = [[0, 20, 1], [2, 0, 18], [25, 3, 0]]
CIRCULANT = [[0, 20, 1], [1, 0, 20], [20, 1, 0]]
CIRCULANT_DIAGONAL = [[5, 20, 1], [1, 5, 20], [20, 1, 5]]
TINY = [[0, 2, 1], [1, 0, 1], [4, 1, 0]]

@pytest.fixture
def extract():
    return load_matrix(data_path('extract5.csv'))

@pytest.fixture
def extract_diag():
    return load_matrix(data_path('extract5.csv'), 'diagonal')

@pytest.fixture
def extract_articles(extract):
    return extract.with_articles(
        load_articles(data_path('extract5_articles.csv'), extract.labels)
    )

@pytest.fixture
def tiny():
    return load_matrix(data_path('tiny3.csv'), 'diagonal')

@pytest.fixture
def overdispersed():
    return square(OVERDISPERSED, mask='diagonal')

@pytest.fixture
def circulant():
    return square(CIRCULANT, mask='diagonal')

@pytest.fixture
def circulant_diagonal():
    return square(CIRCULANT_DIAGONAL)
