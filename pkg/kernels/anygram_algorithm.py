"""
Any-gram kernel algorithms
Bag-of-all-orders n-gram similarity between two token sequences by dynamic
programming over a Delta table
"""

import logging
from collections import defaultdict

from .config import Variant

logger = logging.getLogger(__name__)


def _tokens(sentence):
    return sentence.tokens if hasattr(sentence, 'tokens') else tuple(sentence)


def _items(sentence):
    """(token, is_aspect) pairs for similarity lookups."""
    if hasattr(sentence, 'items'):
        return sentence.items()
    return tuple((token, False) for token in sentence)


def _pairwise_similarities(items1, items2, sim):
    """sim for every position pair, evaluated once per distinct item pair."""
    distinct1 = list(dict.fromkeys(items1))
    distinct2 = list(dict.fromkeys(items2))
    scores = {(a, b): sim(a, b) for a in distinct1 for b in distinct2}
    return [[scores[(a, b)] for b in items2] for a in items1]


def _gated_delta_sum(length1, length2, matches_for, decay):
    """
    Sum of Delta over matching cells.

    The outer loop runs over sentence 1 in reverse so that
    Delta(i+1, j+1) is final before Delta(i, j) reads it; only cells listed
    by matches_for(i) are touched, all others stay 0.

    Args:
        length1, length2 (int): Sentence lengths
        matches_for (callable): i -> ascending positions j matching i
        decay (float): Decay factor lambda

    Returns:
        float: Kernel value
    """
    delta = [[0.0] * (length2 + 1) for _i in range(length1 + 1)]
    kernel = 0.0
    for i in range(length1 - 1, -1, -1):
        row = delta[i]
        following = delta[i + 1]
        for j in matches_for(i):
            value = decay * (1.0 + following[j + 1])
            row[j] = value
            kernel += value
    return kernel


# ============================================================================
# STRING MATCH (SM)
# ============================================================================

def kernel_sm(s1, s2, decay):
    """
    Any-gram kernel over exact token matches.

    Delta(i, j) = 0 when the tokens differ and
    decay * (1 + Delta(i+1, j+1)) when they are equal; the kernel is the sum
    of all Delta cells. Matching position pairs are indexed first so that
    non-matching cells are never visited.

    Args:
        s1, s2 (Sentence | sequence): Token sequences
        decay (float): Decay factor lambda in (0, 1]

    Returns:
        float: Kernel value >= 0
    """
    tokens1 = _tokens(s1)
    tokens2 = _tokens(s2)

    positions = defaultdict(list)
    for j, token in enumerate(tokens2):
        positions[token].append(j)

    return _gated_delta_sum(
        len(tokens1),
        len(tokens2),
        lambda i: positions.get(tokens1[i], ()),
        decay,
    )


# ============================================================================
# WORD EMBEDDING SIMILARITY THRESHOLD (WEST)
# ============================================================================

def kernel_west(s1, s2, decay, theta, sim):
    """
    Any-gram kernel where two tokens match when sim(t1, t2) >= theta.

    Args:
        s1, s2 (Sentence | sequence): Token sequences
        decay (float): Decay factor lambda in (0, 1]
        theta (float): Similarity threshold in [-1, 1]
        sim (callable): Similarity of two (token, is_aspect) pairs

    Returns:
        float: Kernel value >= 0
    """
    items1 = _items(s1)
    items2 = _items(s2)
    scores = _pairwise_similarities(items1, items2, sim)

    matches = [
        [j for j, score in enumerate(row) if score >= theta]
        for row in scores
    ]
    return _gated_delta_sum(len(items1), len(items2), matches.__getitem__, decay)


# ============================================================================
# WORD EMBEDDING SIMILARITY SCORE (WESS)
# ============================================================================

def kernel_wess(s1, s2, decay, sim):
    """
    Any-gram kernel with the similarity score in place of the match count.

    Delta(i, j) = decay * (sim(t1_i, t2_j) + Delta(i+1, j+1)) for every
    cell; there is no match gate, so the whole table is filled.

    Args:
        s1, s2 (Sentence | sequence): Token sequences
        decay (float): Decay factor lambda in (0, 1]
        sim (callable): Similarity of two (token, is_aspect) pairs

    Returns:
        float: Kernel value
    """
    items1 = _items(s1)
    items2 = _items(s2)
    scores = _pairwise_similarities(items1, items2, sim)
    length1, length2 = len(items1), len(items2)

    delta = [[0.0] * (length2 + 1) for _i in range(length1 + 1)]
    kernel = 0.0
    for i in range(length1 - 1, -1, -1):
        row = delta[i]
        following = delta[i + 1]
        row_scores = scores[i]
        for j in range(length2):
            value = decay * (row_scores[j] + following[j + 1])
            row[j] = value
            kernel += value
    return kernel


def compute_kernel(s1, s2, config, sim=None):
    """Kernel value of a sentence pair under a KernelConfig."""
    if config.variant is Variant.SM:
        return kernel_sm(s1, s2, config.decay)
    if config.variant is Variant.WEST:
        return kernel_west(s1, s2, config.decay, config.theta, sim)
    return kernel_wess(s1, s2, config.decay, sim)
