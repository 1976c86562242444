"""
Brute-force any-gram kernels

Each kernel is computed by enumerating n-grams or aligned diagonal runs
directly, without a Delta table. Slow (cubic in sentence length) and kept
free of any code shared with the kernels app, so agreement between the two
is meaningful.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)


def _token_list(sentence):
    return list(sentence.tokens) if hasattr(sentence, 'tokens') else list(sentence)


def _item_list(sentence):
    if hasattr(sentence, 'tokens'):
        aspects = getattr(sentence, 'aspect_indices', frozenset())
        return [(token, position in aspects) for position, token in enumerate(sentence.tokens)]
    return [(token, False) for token in sentence]


@dataclass
class NGramIndex:
    """
    Start positions of every contiguous q-gram of a sentence, for all q
    from 1 to the sentence length.
    """

    grams: dict = field(default_factory=dict)
    length: int = 0

    @classmethod
    def from_tokens(cls, tokens):
        tokens = tuple(tokens)
        grams = defaultdict(list)
        for start in range(len(tokens)):
            for end in range(start + 1, len(tokens) + 1):
                grams[tokens[start:end]].append(start)
        return cls(grams=dict(grams), length=len(tokens))

    @property
    def total(self):
        """Indexed occurrences; always L(L+1)/2."""
        return sum(len(starts) for starts in self.grams.values())

    def occurrences(self, gram):
        return self.grams.get(tuple(gram), [])


def oracle_sm(s1, s2, decay):
    """
    String-match kernel as sum over q of decay^q times the number of
    position pairs where the same q-gram occurs in both sentences.
    """
    index1 = NGramIndex.from_tokens(_token_list(s1))
    index2 = NGramIndex.from_tokens(_token_list(s2))

    total = 0.0
    for gram, starts1 in index1.grams.items():
        starts2 = index2.occurrences(gram)
        if starts2:
            total += decay ** len(gram) * len(starts1) * len(starts2)
    return total


def oracle_west(s1, s2, decay, theta, sim):
    """
    Threshold kernel by enumerating aligned runs: a run of length q from
    (i, j) counts decay^q when sim(s1[i+k], s2[j+k]) >= theta for every
    k < q.
    """
    items1 = _item_list(s1)
    items2 = _item_list(s2)

    total = 0.0
    for i in range(len(items1)):
        for j in range(len(items2)):
            longest = min(len(items1) - i, len(items2) - j)
            for q in range(1, longest + 1):
                if all(sim(items1[i + k], items2[j + k]) >= theta for k in range(q)):
                    total += decay ** q
    return total


def oracle_wess(s1, s2, decay, sim):
    """
    Score kernel by the unrolled recursion:
    sum over (i, j) and offsets k of decay^(k+1) * sim(s1[i+k], s2[j+k]).
    """
    items1 = _item_list(s1)
    items2 = _item_list(s2)

    total = 0.0
    for i in range(len(items1)):
        for j in range(len(items2)):
            for k in range(min(len(items1) - i, len(items2) - j)):
                total += decay ** (k + 1) * sim(items1[i + k], items2[j + k])
    return total


def oracle_kernel(s1, s2, variant, decay, theta=None, sim=None):
    variant = getattr(variant, 'value', variant)
    if variant == 'sm':
        return oracle_sm(s1, s2, decay)
    if variant == 'west':
        return oracle_west(s1, s2, decay, theta, sim)
    return oracle_wess(s1, s2, decay, sim)
