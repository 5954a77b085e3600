## Copyright (c) 2010, Coptix, Inc.  All rights reserved.
## See the LICENSE file for license terms and warranty disclaimer.

"""matrix -- citation count matrices

A CitationMatrix holds c_ij, the number of references from citing node
i (row) to cited node j (column), and a structural mask.  Masked cells
are structural zeros: they are not part of the probability model, as
opposed to sampling zeros, which are observed zero counts.  The usual
mask is the diagonal (self-citations excluded).

Masking never destroys the diagonal: it is kept in preserved_diagonal
so self-citation analyses can read c_ii after the model excluded it.
"""

from __future__ import absolute_import
import io, os, re
import numpy as np
import pandas as pd
from . import interfaces as i
from .prelude import *

__all__ = (
    'CitationMatrix', 'RowTotals', 'TransitionMatrix',
    'load_matrix', 'dump_matrix', 'load_articles', 'row_totals',
    'transition_matrix', 'cap_self_citations', 'CAP_RULES',
    'MASK_POLICIES', 'DANGLING_POLICIES'
)

MASK_POLICIES = ('none', 'diagonal')
DANGLING_POLICIES = ('uniform', 'prior', 'error')


### Matrices

def frozen(arr):
    arr.setflags(write=False)
    return arr

class CitationMatrix(object):
    """An immutable square count matrix with labels and a structural
    mask.  Use load_matrix() to read one from a delimited table."""

    __slots__ = (
        'labels', 'counts', 'structural_mask', 'preserved_diagonal',
        'articles'
    )

    def __init__(self, labels, counts, structural_mask=None, articles=None,
                 preserved_diagonal=None):
        labels = tuple(str(l) for l in labels)
        counts = np.array(counts)
        size = len(labels)

        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise i.InputError(
                'not-square',
                'Expected a square matrix, got shape %r.' % (counts.shape,)
            )
        if counts.shape[0] != size:
            raise i.InputError(
                'label-mismatch',
                'Got %d labels for a %d x %d matrix.' % (size, size, size)
            )
        check_unique(labels)
        counts = check_counts(labels, counts)

        if structural_mask is None:
            structural_mask = np.zeros((size, size), dtype=bool)
        structural_mask = np.array(structural_mask, dtype=bool)
        if structural_mask.shape != counts.shape:
            raise i.InputError(
                'mask-shape',
                'Mask shape %r does not match the matrix.' % (
                    structural_mask.shape,
                )
            )

        if preserved_diagonal is None:
            preserved_diagonal = counts.diagonal().copy()
        preserved_diagonal = np.array(preserved_diagonal, dtype=np.int64)

        counts = np.where(structural_mask, 0, counts)

        self.labels = labels
        self.counts = frozen(counts)
        self.structural_mask = frozen(structural_mask)
        self.preserved_diagonal = frozen(preserved_diagonal)
        self.articles = None
        if articles is not None:
            self.articles = frozen(check_articles(labels, articles))

    def __repr__(self):
        return '<%s N=%d mask=%s>' % (
            type(self).__name__, len(self), self.mask_policy
        )

    def __len__(self):
        return len(self.labels)

    @property
    def size(self):
        return len(self.labels)

    @property
    def allowed(self):
        return ~self.structural_mask

    @property
    def mask_policy(self):
        if not self.structural_mask.any():
            return 'none'
        elif np.array_equal(self.structural_mask, np.eye(self.size, dtype=bool)):
            return 'diagonal'
        return 'custom'

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise i.InputError('unknown-label', 'No node labelled %r.' % label)

    def full_counts(self):
        """Counts with the preserved diagonal put back in place."""

        full = np.array(self.counts)
        np.fill_diagonal(full, self.preserved_diagonal)
        return full

    ## ---------- Derived matrices ----------

    def with_mask(self, structural_mask):
        return type(self)(
            self.labels, self.full_counts(), structural_mask, self.articles,
            self.preserved_diagonal
        )

    def masked(self, policy):
        return self.with_mask(policy_mask(policy, self.size))

    def with_counts(self, counts):
        """Replace every count; the mask and articles carry over."""

        return type(self)(
            self.labels, counts, self.structural_mask, self.articles
        )

    def with_articles(self, articles):
        return type(self)(
            self.labels, self.full_counts(), self.structural_mask, articles,
            self.preserved_diagonal
        )

    ## ---------- Articles ----------

    def require_articles(self):
        if self.articles is None:
            raise i.MissingArticles(
                'This operation needs article counts (see --articles).'
            )
        return self.articles

    def article_shares(self):
        articles = self.require_articles().astype(float)
        return articles / articles.sum()

def policy_mask(policy, size):
    if policy == 'none':
        return np.zeros((size, size), dtype=bool)
    elif policy == 'diagonal':
        return np.eye(size, dtype=bool)
    raise i.InputError(
        'bad-option',
        'Unknown mask policy %r; expected one of %s.' % (
            policy, ', '.join(MASK_POLICIES)
        )
    )

def check_unique(labels):
    seen = set()
    for label in labels:
        if label in seen:
            raise i.InputError('duplicate-label', 'Duplicate label %r.' % label)
        seen.add(label)

def check_counts(labels, counts):
    if counts.dtype.kind in 'iu':
        values = counts.astype(np.int64)
    else:
        values = counts.astype(float)
        bad = ~np.isfinite(values) | (values != np.round(values))
        if bad.any():
            (row, col) = np.argwhere(bad)[0]
            raise i.InputError(
                'bad-entry',
                'Entry (%s, %s) is not an integer: %r.' % (
                    labels[row], labels[col], counts[row, col]
                )
            )
        values = values.astype(np.int64)

    if (values < 0).any():
        (row, col) = np.argwhere(values < 0)[0]
        raise i.InputError(
            'bad-entry',
            'Entry (%s, %s) is negative: %d.' % (
                labels[row], labels[col], values[row, col]
            )
        )
    return values

def check_articles(labels, articles):
    articles = np.array(articles, dtype=float)
    if articles.shape != (len(labels),):
        raise i.InputError(
            'label-mismatch',
            'Expected %d article counts, got %d.' % (len(labels), articles.size)
        )
    bad = ~np.isfinite(articles) | (articles <= 0)
    if bad.any():
        raise i.InputError(
            'bad-articles',
            'Article count for %s must be positive.' % labels[np.argmax(bad)]
        )
    return articles


### Reading and writing

HEADER_CORNER = ('', 'journal')
INTEGER = re.compile(r'^[+-]?\d+$')

def read_table(source, delimiter=None):
    """Read a delimited table into a DataFrame of stripped strings.
    source is a path or a character stream; the delimiter is sniffed
    from the first line (tab if it contains one, comma otherwise)."""

    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source, encoding='utf-8') as stream:
                text = stream.read()
        except (OSError, UnicodeDecodeError) as exc:
            raise i.InputError('unreadable', 'Cannot read %s: %s' % (source, exc))
    else:
        text = source.read()

    if not text.strip():
        raise i.InputError('empty', 'The table is empty.')

    if delimiter is None:
        line = first(l for l in text.splitlines() if l.strip())
        delimiter = '\t' if '\t' in line else ','

    try:
        table = pd.read_csv(
            io.StringIO(text), sep=delimiter, header=None, dtype=str,
            keep_default_na=False, skip_blank_lines=True
        )
    except pd.errors.ParserError as exc:
        raise i.InputError('not-square', 'Ragged table: %s' % exc)
    return table.fillna('').apply(lambda col: col.str.strip())

def parse_count(text, row, col):
    if not INTEGER.match(text):
        raise i.InputError(
            'bad-entry',
            'Entry (%s, %s) is not a nonnegative integer: %r.' % (row, col, text)
        )
    value = int(text)
    if value < 0:
        raise i.InputError(
            'bad-entry',
            'Entry (%s, %s) is negative: %d.' % (row, col, value)
        )
    return value

def load_matrix(source, mask_policy='none', delimiter=None, articles=None):
    """Load a CitationMatrix from a delimited table with a header row of
    labels and a label column.

        >>> m = load_matrix(io.StringIO(',A,B\\nA,3,1\\nB,0,2\\n'), 'diagonal')
        >>> m.labels, m.counts.tolist(), m.preserved_diagonal.tolist()
        (('A', 'B'), [[0, 1], [0, 0]], [3, 2])
    """

    table = read_table(source, delimiter)
    header = list(table.iloc[0])
    if header[0].lower() not in HEADER_CORNER:
        raise i.InputError(
            'bad-header',
            'The first header cell must be empty or "journal", got %r.'
            % header[0]
        )

    columns = header[1:]
    body = table.iloc[1:]
    rows = list(body.iloc[:, 0])
    if len(rows) != len(columns):
        raise i.InputError(
            'not-square',
            'Got %d rows and %d columns.' % (len(rows), len(columns))
        )
    check_unique(columns)
    check_unique(rows)
    if rows != columns:
        mismatch = first(
            (r, c) for (r, c) in zip(rows, columns) if r != c
        )
        raise i.InputError(
            'label-mismatch',
            'Row label %r does not match column label %r.' % mismatch
        )

    counts = np.array([
        [parse_count(text, row, col) for (col, text) in zip(columns, cells)]
        for (row, cells) in zip(rows, body.iloc[:, 1:].values.tolist())
    ], dtype=np.int64).reshape(len(rows), len(columns))

    log.debug('Loaded a %d x %d citation matrix.', len(rows), len(rows))
    return CitationMatrix(
        rows, counts, policy_mask(mask_policy, len(rows)), articles
    )

def dump_matrix(matrix, target, delimiter=','):
    """Write the full counts (diagonal restored) in load_matrix() format."""

    frame = pd.DataFrame(
        matrix.full_counts(), index=list(matrix.labels),
        columns=list(matrix.labels)
    )
    frame.to_csv(target, sep=delimiter, index_label='', lineterminator='\n')
    return target

def load_articles(source, labels, delimiter=None):
    """Read a two-column (label, count) table and align it with labels.
    A header row is skipped when its count cell is not an integer."""

    table = read_table(source, delimiter)
    if table.shape[1] != 2:
        raise i.InputError(
            'bad-articles',
            'The articles table needs two columns, got %d.' % table.shape[1]
        )
    if not INTEGER.match(table.iloc[0, 1]):
        table = table.iloc[1:]

    found = {}
    for (label, text) in table.values.tolist():
        if label in found:
            raise i.InputError('duplicate-label', 'Duplicate label %r.' % label)
        found[label] = parse_count(text, label, 'articles')

    missing = [l for l in labels if l not in found]
    extra = sorted(set(found) - set(labels))
    if missing or extra:
        raise i.InputError(
            'label-mismatch',
            'Article labels do not match the matrix (missing: %s; extra: %s).'
            % (', '.join(missing) or '-', ', '.join(extra) or '-')
        )
    return check_articles(labels, [found[l] for l in labels])


### Marginals

RowTotals = namedtuple(
    'RowTotals', 'n grand_total column_totals citing cited total'
)

RowTotals.__doc__ = """Row and column marginals of a CitationMatrix.

n, grand_total, column_totals: over non-masked cells (the model counts).
citing, cited, total: c_{i+}, c_{+i} and c_{++} of the full matrix,
diagonal included.
"""

def row_totals(matrix):
    model = matrix.counts
    full = matrix.full_counts()
    n = model.sum(axis=1)
    return RowTotals(
        n=n,
        grand_total=int(n.sum()),
        column_totals=model.sum(axis=0),
        citing=full.sum(axis=1),
        cited=full.sum(axis=0),
        total=int(full.sum())
    )


### Transition matrices

class TransitionMatrix(object):
    """A row-stochastic matrix: P, and every smoothed variant (G, G2,
    G*).  dangling flags rows filled by a dangling policy rather than
    data; mask is the structural mask inherited from the counts."""

    __slots__ = ('rows', 'dangling', 'mask', 'labels')

    TOLERANCE = 1e-10

    def __init__(self, rows, dangling=None, mask=None, labels=None):
        rows = np.array(rows, dtype=float)
        size = rows.shape[0]
        if rows.ndim != 2 or rows.shape[1] != size:
            raise i.InputError('not-square', 'Transition rows must be square.')
        if (rows < 0).any():
            raise i.InputError('not-stochastic', 'Negative transition entry.')
        sums = rows.sum(axis=1)
        if np.abs(sums - 1.0).max(initial=0.0) > self.TOLERANCE:
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise i.InputError(
                'not-stochastic',
                'Row %s sums to %r.' % (
                    labels[bad] if labels else bad, sums[bad]
                )
            )

        self.rows = frozen(rows)
        self.dangling = frozen(
            np.zeros(size, dtype=bool) if dangling is None
            else np.array(dangling, dtype=bool)
        )
        self.mask = frozen(
            np.zeros((size, size), dtype=bool) if mask is None
            else np.array(mask, dtype=bool)
        )
        self.labels = tuple(labels) if labels else tuple(
            str(k) for k in range(size)
        )

    def __repr__(self):
        return '<%s N=%d dangling=%d>' % (
            type(self).__name__, len(self.labels), int(self.dangling.sum())
        )

    def __len__(self):
        return len(self.labels)

    def replace(self, rows):
        return type(self)(rows, self.dangling, self.mask, self.labels)

def transition_matrix(matrix, dangling=None, prior=None):
    """Row-normalize the model counts.

    Rows with n_i = 0 are filled by the dangling policy: 'uniform' over
    non-masked cells, 'prior' (the prior vector restricted to non-masked
    cells and renormalized) or 'error'.  The default is 'prior' when a
    prior is given and 'uniform' otherwise.  A row with no non-masked
    cell at all (a 1 x 1 diagonal-masked matrix) becomes a self-loop.
    """

    if dangling is None:
        dangling = 'prior' if prior is not None else 'uniform'
    if dangling not in DANGLING_POLICIES:
        raise i.InputError(
            'bad-option', 'Unknown dangling policy %r.' % dangling
        )

    counts = matrix.counts.astype(float)
    allowed = matrix.allowed
    n = counts.sum(axis=1)
    live = n > 0
    dead = ~live

    rows = np.zeros_like(counts)
    rows[live] = counts[live] / n[live, None]

    if dead.any():
        if dangling == 'error':
            raise i.InputError(
                'dangling',
                'Rows without outgoing citations: %s.' % ', '.join(
                    l for (l, d) in zip(matrix.labels, dead) if d
                )
            )
        elif dangling == 'prior':
            if prior is None:
                raise i.InputError(
                    'bad-option', 'The prior dangling policy needs a prior.'
                )
            fill = np.asarray(getattr(prior, 'probabilities', prior), float)
        else:
            fill = np.ones(matrix.size)
        rows[dead] = fill_rows(fill, allowed, np.flatnonzero(dead))
        log.debug('Filled %d dangling row(s) (%s).', dead.sum(), dangling)

    return TransitionMatrix(rows, dead, matrix.structural_mask, matrix.labels)

def fill_rows(fill, allowed, indices):
    rows = np.where(allowed[indices], fill[None, :], 0.0)
    sums = rows.sum(axis=1)
    empty = sums <= 0
    rows[~empty] /= sums[~empty, None]
    for k in np.flatnonzero(empty):
        ## No usable cell: the walker stays put.
        rows[k, indices[k]] = 1.0
    return rows


### Self-citation caps

def cap_iterative(diag, external, share):
    """c_ii <- min(c_ii, floor(share * c_i+)), recomputing c_i+ after
    every clamp until nothing changes.

        >>> cap_iterative(np.array([50]), np.array([50]), 0.33).tolist()
        [24]
    """

    diag = diag.copy()
    while True:
        capped = np.minimum(diag, np.floor(share * (diag + external)))
        capped = capped.astype(np.int64)
        if np.array_equal(capped, diag):
            return diag
        diag = capped

def cap_closed_form(diag, external, share):
    """c_ii <- min(c_ii, floor(share * M_i / (1 - share)))."""

    bound = np.floor(share * external / (1.0 - share)).astype(np.int64)
    return np.minimum(diag, bound)

def cap_none(diag, external, share):
    return diag.copy()

CAP_RULES = {
    'iterative': cap_iterative,
    'closed_form': cap_closed_form,
    'none': cap_none
}

def cap_self_citations(matrix, share=0.33, rule='iterative'):
    """Restrict self-citations to a share of the references each node
    emits.  Returns a new matrix with the capped diagonal."""

    try:
        cap = CAP_RULES[rule]
    except KeyError:
        raise i.InputError(
            'bad-option',
            'Unknown cap rule %r; expected one of %s.' % (
                rule, ', '.join(sorted(CAP_RULES))
            )
        )
    if not 0 <= share < 1:
        raise i.InputError('bad-option', 'Cap share must be in [0, 1).')

    full = matrix.full_counts()
    diag = full.diagonal().copy()
    external = full.sum(axis=1) - diag
    capped = cap(diag, external, share)
    log.debug('Capped %d self-citation cell(s).', int((capped < diag).sum()))

    np.fill_diagonal(full, capped)
    return CitationMatrix(
        matrix.labels, full, matrix.structural_mask, matrix.articles
    )
