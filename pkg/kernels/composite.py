"""
Composite kernels
Non-negative weighted sums of Gram matrices, e.g. an any-gram kernel plus an
RBF kernel over hand-crafted sentence features
"""

import hashlib
import json
import logging

import numpy as np
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _
from sklearn.metrics.pairwise import rbf_kernel

from .gram import GramMatrix

logger = logging.getLogger(__name__)


def rbf_gram(row_features, col_features=None, gamma=None, row_ids=None, col_ids=None,
             row_labels=()):
    """
    RBF Gram matrix exp(-gamma * |x - y|^2) over feature rows.

    The fingerprint depends on gamma and the column features only, so a
    train matrix and a cross matrix against the same training features
    carry the same fingerprint.

    Args:
        row_features (array-like): M x F features
        col_features (array-like): N x F features; defaults to row_features
        gamma (float): Kernel width; None means 1 / F
        row_ids, col_ids (sequence): Instance ids; default to serials
    """
    rows = np.asarray(row_features, dtype=np.float64)
    cols = rows if col_features is None else np.asarray(col_features, dtype=np.float64)
    if rows.ndim != 2 or cols.ndim != 2 or rows.shape[1] != cols.shape[1]:
        raise ValueError(f"Feature matrices must be 2-D with equal widths, got {rows.shape} and {cols.shape}")
    if gamma is None:
        gamma = 1.0 / max(1, rows.shape[1])
    if gamma <= 0:
        raise ValidationError(_('RBF gamma must be positive, got %(gamma)s.'), code='config',
                              params={'gamma': gamma})

    row_ids = row_ids if row_ids is not None else [str(i) for i in range(1, rows.shape[0] + 1)]
    if col_ids is None:
        col_ids = row_ids if col_features is None else [str(j) for j in range(1, cols.shape[0] + 1)]

    digest = hashlib.sha256()
    digest.update(json.dumps({'kernel': 'rbf', 'gamma': float(gamma)}, sort_keys=True).encode('utf-8'))
    digest.update(np.ascontiguousarray(cols, dtype='<f8').tobytes())

    return GramMatrix(
        values=rbf_kernel(rows, cols, gamma=gamma),
        row_ids=row_ids,
        col_ids=col_ids,
        fingerprint=digest.hexdigest(),
        row_labels=row_labels,
    )


def combine_grams(grams, weights=None):
    """
    Weighted sum of Gram matrices over the same instances.

    A non-negative combination of PSD matrices is PSD, so the result is a
    valid kernel whenever every part is.

    Args:
        grams (list[GramMatrix]): Parts with identical row and column ids
        weights (list[float]): Non-negative weights; default all 1.0

    Returns:
        GramMatrix: Combined matrix with a fingerprint derived from the parts
    """
    grams = list(grams)
    if not grams:
        raise ValidationError(_('At least one Gram matrix is required.'), code='config')
    weights = [1.0] * len(grams) if weights is None else [float(w) for w in weights]
    if len(weights) != len(grams):
        raise ValidationError(
            _('%(weights)s weights given for %(grams)s Gram matrices.'),
            code='config',
            params={'weights': len(weights), 'grams': len(grams)},
        )
    if any(w < 0 or not np.isfinite(w) for w in weights):
        raise ValidationError(_('Kernel weights must be finite and non-negative.'), code='config')

    first = grams[0]
    for gram in grams[1:]:
        if gram.row_ids != first.row_ids or gram.col_ids != first.col_ids:
            raise ValidationError(
                _('Gram matrices to combine must share row and column ids.'),
                code='config',
            )

    values = np.zeros(first.shape, dtype=np.float64)
    for weight, gram in zip(weights, grams):
        values += weight * gram.values

    parts = [{'weight': w, 'fingerprint': g.fingerprint} for w, g in zip(weights, grams)]
    fingerprint = hashlib.sha256(
        json.dumps(parts, sort_keys=True, separators=(',', ':')).encode('utf-8')
    ).hexdigest()

    labels = next((g.row_labels for g in grams if g.row_labels), ())
    logger.info(f"Combined {len(grams)} Gram matrices {first.shape} with weights {weights}")
    return GramMatrix(
        values=values,
        row_ids=first.row_ids,
        col_ids=first.col_ids,
        fingerprint=fingerprint,
        row_labels=labels,
    )
