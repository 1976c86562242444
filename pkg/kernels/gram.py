"""
Gram matrix engine
Train (N x N) and cross (M x N) kernel matrices over corpora, evaluated in
parallel row blocks
"""

import logging
import os
import time
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed
from scipy.linalg import eigvalsh

from corpus.sentences import mark_aspect_suffix

from .anygram_algorithm import compute_kernel
from .config import AspectMode, Variant
from .validators import validate_similarity_presence

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-8


class FingerprintMismatch(ValueError):
    """Matrices or models built under different kernel settings were mixed."""


@dataclass
class GramMatrix:
    """
    Kernel values with the instance ids of rows and columns.

    A train matrix has row_ids == col_ids and is exactly symmetric.
    indefinite is None when definiteness was not checked.
    """

    values: np.ndarray
    row_ids: tuple
    col_ids: tuple
    fingerprint: str = ''
    row_labels: tuple = ()
    indefinite: bool | None = None
    manifest: str = ''

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(
            len(self.row_ids), len(self.col_ids)
        )
        self.row_ids = tuple(self.row_ids)
        self.col_ids = tuple(self.col_ids)
        self.row_labels = tuple(self.row_labels)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Gram matrix contains non-finite values")

    @property
    def shape(self):
        return self.values.shape

    @property
    def is_train(self):
        return self.row_ids == self.col_ids

    def require_fingerprint(self, expected):
        if self.fingerprint != expected:
            raise FingerprintMismatch(
                f"Gram matrix fingerprint {self.fingerprint[:12]} does not match "
                f"{expected[:12]}; it was built under different kernel settings"
            )


# ============================================================================
# SIMILARITY MEMO
# ============================================================================

class SimilarityMemo:
    """
    Per-worker cache of token-pair similarities keyed by the unordered pair.

    Transparent for symmetric similarity functions: values are the ones
    the wrapped function returns for the canonical argument order.
    """

    def __init__(self, sim):
        self.sim = sim
        self.cache = {}

    def __call__(self, a, b):
        key = (a, b) if a <= b else (b, a)
        value = self.cache.get(key)
        if value is None:
            value = self.sim(*key)
            self.cache[key] = value
        return value


# ============================================================================
# CELL EVALUATION
# ============================================================================

def _sentence_key(sentence):
    return sentence.tokens, tuple(sorted(sentence.aspect_indices))


def _pair_value(a, b, config, sim):
    # A fixed argument order makes K(a, b) and K(b, a) the same float
    if _sentence_key(b) < _sentence_key(a):
        a, b = b, a
    return compute_kernel(a, b, config, sim)


def _evaluate_block(pairs, left, right, config, sim):
    memo = SimilarityMemo(sim) if sim is not None else None
    return [_pair_value(left[i], right[j], config, memo) for i, j in pairs]


def resolve_threads(threads=None):
    """Worker count; 0 or None means every available core."""
    if threads is None:
        threads = settings.ANYGRAM_THREADS
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def _evaluate_pairs(pairs, left, right, config, sim, threads):
    """Kernel values for (row, col) position pairs, in the order given."""
    if not pairs:
        return np.zeros(0, dtype=np.float64)

    threads = resolve_threads(threads)
    block_size = max(1, min(
        settings.ANYGRAM_GRAM_BLOCK_ROWS * max(1, len(right)),
        -(-len(pairs) // threads),
    ))
    blocks = [pairs[k:k + block_size] for k in range(0, len(pairs), block_size)]

    if threads == 1 or len(blocks) == 1:
        results = [_evaluate_block(block, left, right, config, sim) for block in blocks]
    else:
        results = Parallel(n_jobs=threads)(
            delayed(_evaluate_block)(block, left, right, config, sim)
            for block in blocks
        )
    return np.fromiter(
        (value for block in results for value in block),
        dtype=np.float64,
        count=len(pairs),
    )


def _prepare(corpus, config, sim):
    """Apply aspect handling to the corpus and the similarity function."""
    validate_similarity_presence(config.variant.value, sim)
    sentences = tuple(corpus)
    if config.aspect_mode is AspectMode.SUFFIX:
        sentences = tuple(mark_aspect_suffix(s, config.suffix) for s in sentences)
    if sim is not None and hasattr(sim, 'with_aspect_flags'):
        sim = sim.with_aspect_flags(config.aspect_mode is AspectMode.FLAG)
    return sentences, sim


def _report_oov(sim, sentences, role):
    if sim is not None and hasattr(sim, 'report_oov'):
        sim.report_oov(sentences, role)


def embedding_digest(sim):
    """Source digest plus the lookup casing, both of which change similarities."""
    table = getattr(sim, 'table', None)
    if table is None:
        return ''
    return f"{getattr(table, 'digest', '')}:lowercase={getattr(table, 'lowercase_lookup', True)}"


def _normalize(values, row_self, col_self):
    denominator = np.sqrt(np.outer(row_self, col_self))
    normalized = np.zeros_like(values)
    np.divide(values, denominator, out=normalized, where=denominator > 0)
    return normalized


# ============================================================================
# GRAM BUILDERS
# ============================================================================

def gram_train(corpus, config, sim=None, threads=None):
    """
    Symmetric train Gram matrix.

    Each unordered pair is evaluated once and mirrored. With
    config.normalize, entries become K(a,b) / sqrt(K(a,a) K(b,b)) and 0
    wherever a self-kernel is 0.

    Args:
        corpus (Corpus): Training sentences
        config (KernelConfig): Kernel settings
        sim (callable): Token similarity; required for WEST/WESS
        threads (int): Worker count (0 = all cores)

    Returns:
        GramMatrix: N x N matrix with row_ids == col_ids
    """
    sentences, sim = _prepare(corpus, config, sim)
    _report_oov(sim, sentences, 'training')
    n = len(sentences)
    started = time.perf_counter()
    logger.info(f"Computing {config.variant.value.upper()} train Gram for {n} sentences")

    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    flat = _evaluate_pairs(pairs, sentences, sentences, config, sim, threads)

    values = np.zeros((n, n), dtype=np.float64)
    if pairs:
        rows, cols = np.array(pairs).T
        values[rows, cols] = flat
        values[cols, rows] = flat

    if config.normalize:
        diagonal = values.diagonal().copy()
        values = _normalize(values, diagonal, diagonal)
        values[np.diag_indices(n)] = np.where(diagonal > 0, 1.0, 0.0)

    gram = GramMatrix(
        values=values,
        row_ids=corpus.ids,
        col_ids=corpus.ids,
        fingerprint=config.fingerprint(embedding_digest(sim)),
        row_labels=tuple(label or '' for label in corpus.labels),
    )

    if config.variant is Variant.WEST and n:
        report = definiteness_report(gram)
        gram.indefinite = not report.is_psd
        if gram.indefinite:
            logger.warning(
                f"WEST Gram matrix is indefinite (min eigenvalue {report.min_eigenvalue:.3e}, "
                f"max {report.max_eigenvalue:.3e}); keeping it"
            )

    logger.info(f"Train Gram {n}x{n} done in {time.perf_counter() - started:.2f}s")
    return gram


def gram_cross(test, train, config, sim=None, threads=None):
    """
    Rectangular test x train Gram matrix.

    Normalization divides by each instance's own self-kernel under the same
    settings, so rows match the corresponding train-matrix rows when a test
    sentence also occurs in training.
    """
    test_sentences, sim = _prepare(test, config, sim)
    train_sentences, _sim = _prepare(train, config, sim)
    _report_oov(sim, test_sentences, 'test')
    m, n = len(test_sentences), len(train_sentences)
    started = time.perf_counter()
    logger.info(f"Computing {config.variant.value.upper()} cross Gram {m}x{n}")

    pairs = [(i, j) for i in range(m) for j in range(n)]
    values = _evaluate_pairs(pairs, test_sentences, train_sentences, config, sim, threads)
    values = values.reshape(m, n)

    if config.normalize and m and n:
        test_self = _evaluate_pairs(
            [(i, i) for i in range(m)], test_sentences, test_sentences, config, sim, threads
        )
        train_self = _evaluate_pairs(
            [(j, j) for j in range(n)], train_sentences, train_sentences, config, sim, threads
        )
        values = _normalize(values, test_self, train_self)

    logger.info(f"Cross Gram {m}x{n} done in {time.perf_counter() - started:.2f}s")
    return GramMatrix(
        values=values,
        row_ids=test.ids,
        col_ids=train.ids,
        fingerprint=config.fingerprint(embedding_digest(sim)),
        row_labels=tuple(label or '' for label in test.labels),
    )


# ============================================================================
# DEFINITENESS
# ============================================================================

@dataclass(frozen=True)
class DefinitenessReport:
    min_eigenvalue: float
    max_eigenvalue: float
    eigenvalues: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def is_psd(self):
        scale = max(abs(self.max_eigenvalue), np.finfo(np.float64).tiny)
        return self.min_eigenvalue >= -PSD_TOLERANCE * scale


def definiteness_report(gram):
    """Extreme eigenvalues of a symmetric Gram matrix."""
    values = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.float64)
    if values.shape[0] == 0:
        return DefinitenessReport(0.0, 0.0, np.zeros(0))
    eigenvalues = eigvalsh(values)
    return DefinitenessReport(float(eigenvalues[0]), float(eigenvalues[-1]), eigenvalues)
