"""
Unit Tests for the brute-force kernels and their agreement with the
dynamic-programming kernels
"""
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from embeddings.similarity import CosineSimilarity
from kernels.anygram_algorithm import kernel_sm, kernel_wess, kernel_west
from oracle.brute_force import NGramIndex, oracle_kernel, oracle_sm, oracle_wess, oracle_west
from oracle.generators import random_embedding_table, random_sentence_pairs

DECAYS = (0.3, 0.5, 1.0)
PAIRS = 200

tokens = st.lists(st.sampled_from('abcde'), min_size=1, max_size=12)


def close(a, b):
    return abs(a - b) <= 1e-9 * max(1.0, abs(b))


class NGramIndexTestCase(SimpleTestCase):
    """Test cases for NGramIndex"""

    def test_occurrences(self):
        """Test start positions of repeated q-grams"""
        index = NGramIndex.from_tokens(['a', 'b', 'a', 'b'])

        self.assertEqual(index.occurrences(['a', 'b']), [0, 2])
        self.assertEqual(index.occurrences(['b', 'a', 'b']), [1])
        self.assertEqual(index.occurrences(['c']), [])

    @given(tokens)
    def test_total(self, sentence):
        """Test that a sentence of length L indexes L(L+1)/2 occurrences"""
        length = len(sentence)
        self.assertEqual(NGramIndex.from_tokens(sentence).total, length * (length + 1) // 2)


class OracleExamplesTestCase(SimpleTestCase):
    """Test cases for the hand-computed oracle values"""

    def test_string_match(self):
        """Test the string-match oracle examples"""
        self.assertEqual(oracle_sm(['a', 'b', 'c'], ['a', 'b', 'd'], 0.5), 1.25)
        self.assertEqual(oracle_sm(['good'], ['good'], 0.5), 0.5)
        self.assertEqual(oracle_sm(['a', 'b'], ['x', 'y'], 0.5), 0.0)

    def test_similarity_score(self):
        """Test the score oracle examples"""
        self.assertAlmostEqual(oracle_wess(['u'], ['v'], 0.5, lambda a, b: 0.6), 0.3, places=15)
        self.assertEqual(oracle_wess(['a', 'b'], ['c', 'd'], 0.5, lambda a, b: 1.0), 2.25)
        self.assertEqual(oracle_wess(['a', 'b'], ['c', 'd'], 0.5, lambda a, b: 0.0), 0.0)

    def test_threshold(self):
        """Test the threshold oracle examples"""
        sim = CosineSimilarity(random_embedding_table(seed=4))
        self.assertEqual(oracle_west(['a', 'b'], ['c', 'd'], 0.5, 1.0, sim), 0.0)
        self.assertEqual(oracle_west(['a', 'b'], ['c', 'd'], 0.5, -1.0, sim),
                         oracle_sm(['x', 'x'], ['x', 'x'], 0.5))
        self.assertEqual(oracle_west(['u'], ['v'], 0.5, 0.7, lambda a, b: 0.7), 0.5)

    @given(tokens, tokens)
    def test_unit_decay_is_a_count(self, s1, s2):
        """Test that lambda = 1 gives a non-negative integer"""
        value = oracle_sm(s1, s2, 1.0)
        self.assertGreaterEqual(value, 0)
        self.assertEqual(value, int(value))


class OracleAgreementTestCase(SimpleTestCase):
    """
    Test cases comparing every kernel with its brute-force counterpart on
    seeded random pairs over a five-token alphabet
    """

    def setUp(self):
        self.pairs = random_sentence_pairs(PAIRS, seed=0, aspect_rate=0.2)
        self.sim = CosineSimilarity(random_embedding_table(seed=0), aspect_aware=True)

    def test_string_match(self):
        """Test SM against the n-gram enumeration"""
        for decay in DECAYS:
            for s1, s2 in self.pairs:
                expected = oracle_sm(s1, s2, decay)
                self.assertTrue(close(kernel_sm(s1, s2, decay), expected), (s1, s2, decay))

    def test_threshold(self):
        """Test WEST against the aligned-run enumeration"""
        for decay in DECAYS:
            for theta in (-1.0, 0.0, 0.3, 0.7, 1.0):
                for s1, s2 in self.pairs[:60]:
                    expected = oracle_west(s1, s2, decay, theta, self.sim)
                    actual = kernel_west(s1, s2, decay, theta, self.sim)
                    self.assertTrue(close(actual, expected), (s1, s2, decay, theta))

    def test_threshold_on_every_pair(self):
        """Test WEST on the full pair set at one threshold"""
        for s1, s2 in self.pairs:
            expected = oracle_west(s1, s2, 0.5, 0.3, self.sim)
            self.assertTrue(close(kernel_west(s1, s2, 0.5, 0.3, self.sim), expected))

    def test_similarity_score(self):
        """Test WESS against the unrolled triple loop"""
        for decay in DECAYS:
            for s1, s2 in self.pairs:
                expected = oracle_wess(s1, s2, decay, self.sim)
                self.assertTrue(close(kernel_wess(s1, s2, decay, self.sim), expected),
                                (s1, s2, decay))

    def test_dispatch(self):
        """Test oracle_kernel selects the variant"""
        s1, s2 = self.pairs[0]
        self.assertEqual(oracle_kernel(s1, s2, 'sm', 0.5), oracle_sm(s1, s2, 0.5))
        self.assertEqual(oracle_kernel(s1, s2, 'west', 0.5, 0.3, self.sim),
                         oracle_west(s1, s2, 0.5, 0.3, self.sim))
        self.assertEqual(oracle_kernel(s1, s2, 'wess', 0.5, sim=self.sim),
                         oracle_wess(s1, s2, 0.5, self.sim))

    @settings(max_examples=150, deadline=None)
    @given(tokens, tokens, st.sampled_from(DECAYS))
    def test_generated_string_match(self, s1, s2, decay):
        """Test SM against the oracle on generated pairs"""
        self.assertTrue(close(kernel_sm(s1, s2, decay), oracle_sm(s1, s2, decay)))

    @settings(max_examples=150, deadline=None)
    @given(tokens, tokens, st.sampled_from(DECAYS))
    def test_generated_similarity_score(self, s1, s2, decay):
        """Test WESS against the oracle on generated pairs"""
        sim = CosineSimilarity(random_embedding_table(seed=0))
        self.assertTrue(close(kernel_wess(s1, s2, decay, sim), oracle_wess(s1, s2, decay, sim)))
