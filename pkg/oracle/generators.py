"""
Seeded random inputs for the property suites
"""

import numpy as np

from corpus.sentences import Corpus, Sentence
from embeddings.table import EmbeddingTable

ALPHABET = ('a', 'b', 'c', 'd', 'e')


def random_tokens(rng, alphabet=ALPHABET, min_length=1, max_length=12):
    length = int(rng.integers(min_length, max_length + 1))
    return tuple(alphabet[k] for k in rng.integers(0, len(alphabet), size=length))


def random_sentence(rng, sentence_id, alphabet=ALPHABET, min_length=1, max_length=12,
                    aspect_rate=0.0):
    tokens = random_tokens(rng, alphabet, min_length, max_length)
    aspects = frozenset(
        position for position in range(len(tokens)) if rng.random() < aspect_rate
    )
    return Sentence(id=sentence_id, tokens=tokens, aspect_indices=aspects)


def random_sentence_pairs(count, seed=0, alphabet=ALPHABET, min_length=1, max_length=12,
                          aspect_rate=0.0):
    """count independent (s1, s2) pairs over a small alphabet."""
    rng = np.random.default_rng(seed)
    return [
        (
            random_sentence(rng, f'p{k}a', alphabet, min_length, max_length, aspect_rate),
            random_sentence(rng, f'p{k}b', alphabet, min_length, max_length, aspect_rate),
        )
        for k in range(count)
    ]


def random_corpus(count, seed=0, alphabet=ALPHABET, min_length=1, max_length=12, labels=None):
    """Corpus of count random sentences, labels cycled from the given list."""
    rng = np.random.default_rng(seed)
    sentences = []
    for k in range(count):
        sentence = random_sentence(rng, f's{k}', alphabet, min_length, max_length)
        if labels:
            sentence = Sentence(
                id=sentence.id,
                tokens=sentence.tokens,
                label=labels[k % len(labels)],
            )
        sentences.append(sentence)
    return Corpus(tuple(sentences))


def random_embedding_table(tokens=ALPHABET, dim=8, seed=0):
    """Gaussian vectors for the given tokens; none has zero norm."""
    rng = np.random.default_rng(seed)
    vectors = {}
    for token in tokens:
        vector = rng.standard_normal(dim)
        while not np.any(vector):
            vector = rng.standard_normal(dim)
        vector.setflags(write=False)
        vectors[token] = vector
    return EmbeddingTable(dim=dim, vectors=vectors, lowercase_lookup=True,
                          digest=f'random-{dim}d-seed{seed}')


# ============================================================================
# LABELED MARKER DATA
# ============================================================================

# Two sentiment words per class; synonyms never occur in marker_corpus output
MARKERS = {
    'negative': ('awful', 'bland'),
    'neutral': ('okay', 'average'),
    'positive': ('great', 'tasty'),
}
SYNONYMS = {
    'negative': ('terrible', 'tasteless'),
    'neutral': ('fine', 'mediocre'),
    'positive': ('superb', 'delicious'),
}
FILLERS = ('the', 'food', 'was', 'service', 'and', 'we', 'it', 'place', 'staff', 'here')


def marker_corpus(count, seed=0, markers=MARKERS, fillers=FILLERS, prefix='m',
                  min_fillers=4, max_fillers=7, markers_per_sentence=2):
    """
    Labeled corpus where the class shows only through marker words.

    Labels cycle over the sorted classes; each sentence gets random filler
    tokens with markers_per_sentence class markers inserted at random
    positions.
    """
    rng = np.random.default_rng(seed)
    labels = sorted(markers)
    sentences = []
    for k in range(count):
        label = labels[k % len(labels)]
        size = int(rng.integers(min_fillers, max_fillers + 1))
        tokens = [fillers[int(i)] for i in rng.integers(0, len(fillers), size=size)]
        for _marker in range(markers_per_sentence):
            words = markers[label]
            word = words[int(rng.integers(0, len(words)))]
            tokens.insert(int(rng.integers(0, len(tokens) + 1)), word)
        sentences.append(Sentence(id=f'{prefix}{k}', tokens=tuple(tokens), label=label))
    return Corpus(tuple(sentences))


def marker_embedding_table(markers=MARKERS, synonyms=SYNONYMS, fillers=FILLERS, spread=0.1):
    """
    Vectors where every marker and synonym of a class lies close to one
    class direction and fillers are orthogonal one-hot vectors.

    Same-class words have cosine 1 / (1 + spread^2); words of different
    classes and fillers have cosine 0.
    """
    classes = sorted(markers)
    words = [(c, w) for c in classes for w in tuple(markers[c]) + tuple(synonyms.get(c, ()))]
    dim = len(classes) + len(fillers) + len(words)

    vectors = {}
    for k, filler in enumerate(fillers):
        vector = np.zeros(dim)
        vector[len(classes) + k] = 1.0
        vectors[filler] = vector
    for k, (label, word) in enumerate(words):
        vector = np.zeros(dim)
        vector[classes.index(label)] = 1.0
        vector[len(classes) + len(fillers) + k] = spread
        vectors[word] = vector
    for vector in vectors.values():
        vector.setflags(write=False)
    return EmbeddingTable(dim=dim, vectors=vectors, lowercase_lookup=True,
                          digest=f'markers-{dim}d-spread{spread}')


def write_embedding_text(table, path):
    """Write a table in the whitespace-separated text format."""
    with open(path, 'w', encoding='utf-8') as out:
        for token, vector in table.vectors.items():
            out.write(token + ' ' + ' '.join(f'{value:.17g}' for value in vector) + '\n')


def swap_markers(corpus, markers=MARKERS, synonyms=SYNONYMS):
    """Replace every marker word by the synonym at the same position of its class."""
    mapping = {
        word: synonyms[label][k]
        for label, words in markers.items()
        for k, word in enumerate(words)
    }
    return corpus.map(
        lambda s: Sentence(id=s.id, tokens=tuple(mapping.get(t, t) for t in s.tokens),
                           label=s.label, aspect_indices=s.aspect_indices)
    )
