"""
Token similarity over pretrained vectors
Cosine similarity, aspect-flag augmentation and the OOV policy
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


class DegenerateVectorError(ValueError):
    """Cosine is undefined for a zero-norm vector."""


def cosine(u, v):
    """
    Cosine similarity dot(u, v) / (|u| |v|).

    Raises:
        DegenerateVectorError: when either vector has zero norm
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"Vector lengths differ: {u.shape[0]} vs {v.shape[0]}")

    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        raise DegenerateVectorError("Cosine similarity of a zero-norm vector")

    return float(np.dot(u, v) / (norm_u * norm_v))


def augment_aspect_flag(vec, is_aspect):
    """Append 1.0 for an aspect-term token, 0.0 otherwise (d -> d+1)."""
    vec = np.asarray(vec, dtype=np.float64)
    return np.append(vec, 1.0 if is_aspect else 0.0)


def _as_token(item):
    if isinstance(item, str):
        return item, False
    token, is_aspect = item
    return token, bool(is_aspect)


def token_sim(t1, t2, table, aspect_aware=False):
    """
    Similarity of two tokens in [-1, 1].

    Args:
        t1, t2: token strings or (token, is_aspect) pairs
        table (EmbeddingTable): Vector source
        aspect_aware (bool): Compare flag-augmented vectors

    Returns:
        float: cosine of the (augmented) vectors; when either token has no
            usable vector, 1.0 on an exact surface match (flags included)
            and 0.0 otherwise
    """
    token_a, flag_a = _as_token(t1)
    token_b, flag_b = _as_token(t2)
    if not aspect_aware:
        flag_a = flag_b = False

    # Canonical argument order keeps the result exactly symmetric
    if (token_b, flag_b) < (token_a, flag_a):
        token_a, flag_a, token_b, flag_b = token_b, flag_b, token_a, flag_a

    vec_a = table.lookup(token_a)
    vec_b = table.lookup(token_b)
    if vec_a is None or vec_b is None:
        return 1.0 if (token_a, flag_a) == (token_b, flag_b) else 0.0

    if table.key(token_a) == table.key(token_b) and flag_a == flag_b:
        return 1.0

    if aspect_aware:
        vec_a = augment_aspect_flag(vec_a, flag_a)
        vec_b = augment_aspect_flag(vec_b, flag_b)

    return float(np.clip(cosine(vec_a, vec_b), -1.0, 1.0))


@dataclass(frozen=True)
class CosineSimilarity:
    """
    Similarity function handed to the embedding-based kernels.

    Called with two (token, is_aspect) pairs; flags only count when
    aspect_aware is set.
    """

    table: object
    aspect_aware: bool = False
    kind: str = 'cosine'

    def __call__(self, a, b):
        return token_sim(a, b, self.table, self.aspect_aware)

    def with_aspect_flags(self, enabled):
        if enabled == self.aspect_aware:
            return self
        return CosineSimilarity(self.table, aspect_aware=enabled)

    def oov_rate(self, tokens):
        """Share of distinct tokens without a usable vector."""
        distinct = set(tokens)
        if not distinct:
            return 0.0
        missing = sum(1 for token in distinct if self.table.lookup(token) is None)
        return missing / len(distinct)

    def report_oov(self, sentences, role='corpus'):
        """Log the OOV rate over the distinct tokens of sentences and return it."""
        tokens = [token for sentence in sentences for token in sentence.tokens]
        rate = self.oov_rate(tokens)
        if rate > 0:
            logger.warning(
                f"{rate:.1%} of distinct {role} tokens have no vector; "
                f"they match by surface string only"
            )
        else:
            logger.info(f"Every distinct {role} token has a vector")
        return rate
