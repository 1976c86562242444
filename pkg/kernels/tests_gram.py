"""
Unit Tests for Gram matrix construction, definiteness and composite kernels
"""
import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from corpus.sentences import Corpus, Sentence, expand_aspect_instances
from embeddings.similarity import CosineSimilarity
from kernels.anygram_algorithm import kernel_sm
from kernels.composite import combine_grams, rbf_gram
from kernels.config import KernelConfig
from kernels.gram import (
    FingerprintMismatch,
    GramMatrix,
    SimilarityMemo,
    definiteness_report,
    gram_cross,
    gram_train,
)
from oracle.generators import random_corpus, random_embedding_table

SM = KernelConfig(variant='sm', decay=0.5)


def corpus_of(*token_lists, labels=None):
    labels = labels or [None] * len(token_lists)
    return Corpus(tuple(
        Sentence(id=str(k), tokens=tokens, label=label)
        for k, (tokens, label) in enumerate(zip(token_lists, labels), start=1)
    ))


class TableSimilarity:
    """Similarity from an explicit table of unordered token pairs."""

    def __init__(self, scores):
        self.scores = {frozenset(pair): value for pair, value in scores.items()}

    def __call__(self, a, b):
        if a[0] == b[0]:
            return 1.0
        return self.scores.get(frozenset((a[0], b[0])), 0.0)


class GramTrainTestCase(SimpleTestCase):
    """Test cases for gram_train"""

    def test_single_sentence(self):
        """Test a one-sentence corpus, raw and normalized"""
        corpus = corpus_of(['good'])

        raw = gram_train(corpus, SM, threads=1)
        normalized = gram_train(corpus, KernelConfig(decay=0.5, normalize=True), threads=1)

        np.testing.assert_array_equal(raw.values, [[0.5]])
        np.testing.assert_array_equal(normalized.values, [[1.0]])

    def test_two_sentences(self):
        """Test off-diagonal 1.25 and diagonals 3(0.5) + 2(0.25) + 0.125"""
        gram = gram_train(corpus_of(['a', 'b', 'c'], ['a', 'b', 'd']), SM, threads=1)

        np.testing.assert_array_equal(gram.values, [[2.125, 1.25], [1.25, 2.125]])
        self.assertEqual(gram.row_ids, ('1', '2'))
        self.assertTrue(gram.is_train)

    def test_exact_symmetry(self):
        """Test that the train matrix is bit-exactly symmetric"""
        gram = gram_train(random_corpus(20, seed=4), SM, threads=1)
        np.testing.assert_array_equal(gram.values, gram.values.T)

    def test_normalized_off_diagonal(self):
        """Test K(a,b) / sqrt(K(a,a) K(b,b))"""
        gram = gram_train(corpus_of(['a', 'b', 'c'], ['a', 'b', 'd']),
                          KernelConfig(decay=0.5, normalize=True), threads=1)
        self.assertAlmostEqual(gram.values[0, 1], 1.25 / 2.125, places=15)
        np.testing.assert_array_equal(gram.values.diagonal(), [1.0, 1.0])

    def test_labels_carried(self):
        """Test that row labels follow the corpus, unlabeled as empty strings"""
        gram = gram_train(corpus_of(['a'], ['b'], labels=['pos', None]), SM, threads=1)
        self.assertEqual(gram.row_labels, ('pos', ''))

    def test_worker_count_does_not_change_values(self):
        """Test byte-identical matrices with one and two workers"""
        corpus = random_corpus(30, seed=8)
        sim = CosineSimilarity(random_embedding_table(seed=8))
        for config, similarity in ((SM, None), (KernelConfig(variant='wess'), sim)):
            single = gram_train(corpus, config, similarity, threads=1)
            double = gram_train(corpus, config, similarity, threads=2)
            self.assertEqual(single.values.tobytes(), double.values.tobytes())
            self.assertEqual(single.fingerprint, double.fingerprint)

    def test_similarity_required_for_embedding_variants(self):
        """Test WESS without a similarity and SM with one"""
        sim = CosineSimilarity(random_embedding_table())
        with self.assertRaises(ValidationError):
            gram_train(corpus_of(['a']), KernelConfig(variant='wess'), None, threads=1)
        with self.assertRaises(ValidationError):
            gram_train(corpus_of(['a']), SM, sim, threads=1)

    def test_fingerprint_depends_on_embeddings(self):
        """Test that different tables give different fingerprints"""
        corpus = corpus_of(['a', 'b'])
        config = KernelConfig(variant='wess')
        first = gram_train(corpus, config, CosineSimilarity(random_embedding_table(seed=1)), threads=1)
        second = gram_train(corpus, config, CosineSimilarity(random_embedding_table(seed=2)), threads=1)
        self.assertNotEqual(first.fingerprint, second.fingerprint)

    def test_oov_rate_logged_per_build(self):
        """Test that training and test OOV rates are logged once per build"""
        sim = CosineSimilarity(random_embedding_table(tokens=('a', 'b')))
        config = KernelConfig(variant='wess')
        train = corpus_of(['a', 'zz'], ['b'])

        with self.assertLogs('embeddings.similarity', level='WARNING') as logs:
            gram_train(train, config, sim, threads=1)
            gram_cross(corpus_of(['a', 'b']), train, config, sim, threads=1)
            gram_cross(corpus_of(['qq']), train, config, sim, threads=1)

        self.assertEqual(len(logs.output), 2)
        self.assertIn('33.3% of distinct training tokens', logs.output[0])
        self.assertIn('100.0% of distinct test tokens', logs.output[1])


class GramCrossTestCase(SimpleTestCase):
    """Test cases for gram_cross"""

    def setUp(self):
        self.train = corpus_of(['a', 'b', 'c'], ['a', 'b', 'd'], ['e'])

    def test_test_equals_train(self):
        """Test that a cross matrix of the training corpus equals the train matrix"""
        cross = gram_cross(self.train, self.train, SM, threads=1)
        train = gram_train(self.train, SM, threads=1)

        np.testing.assert_array_equal(cross.values, train.values)
        self.assertEqual(cross.fingerprint, train.fingerprint)

    def test_normalized_test_equals_train(self):
        """Test the normalized cross matrix against the normalized train matrix"""
        config = KernelConfig(decay=0.5, normalize=True)
        cross = gram_cross(self.train, self.train, config, threads=1)
        train = gram_train(self.train, config, threads=1)
        np.testing.assert_allclose(cross.values, train.values, rtol=1e-14, atol=0)

    def test_empty_test_corpus(self):
        """Test a 0 x N matrix"""
        cross = gram_cross(Corpus(()), self.train, SM, threads=1)
        self.assertEqual(cross.shape, (0, 3))

    def test_row_in_train_order(self):
        """Test one test sentence against the train sentences"""
        test = corpus_of(['a', 'b'])

        cross = gram_cross(test, self.train, SM, threads=1)

        expected = [kernel_sm(['a', 'b'], s.tokens, 0.5) for s in self.train]
        np.testing.assert_array_equal(cross.values, [expected])
        self.assertEqual(cross.col_ids, ('1', '2', '3'))
        self.assertFalse(cross.is_train)

    def test_require_fingerprint(self):
        """Test that a foreign fingerprint is rejected"""
        cross = gram_cross(self.train, self.train, SM, threads=1)
        cross.require_fingerprint(SM.fingerprint())
        with self.assertRaises(FingerprintMismatch):
            cross.require_fingerprint(KernelConfig(decay=0.3).fingerprint())


class DefinitenessTestCase(SimpleTestCase):
    """Test cases for definiteness checks"""

    def test_string_match_is_psd(self):
        """Test the SM Gram of 50 random sentences"""
        gram = gram_train(random_corpus(50, seed=0), SM, threads=1)
        report = definiteness_report(gram)
        self.assertTrue(report.is_psd, report)
        self.assertIsNone(gram.indefinite)

    def test_similarity_score_is_psd(self):
        """Test the WESS Gram of 50 random sentences under cosine similarity"""
        sim = CosineSimilarity(random_embedding_table(seed=0))
        gram = gram_train(random_corpus(50, seed=0), KernelConfig(variant='wess'), sim, threads=1)
        self.assertTrue(definiteness_report(gram).is_psd)

    def test_threshold_gram_flagged_indefinite(self):
        """Test a non-transitive match relation a~b, b~c, a!~c"""
        sim = TableSimilarity({('a', 'b'): 0.6, ('b', 'c'): 0.6, ('a', 'c'): 0.2})

        gram = gram_train(corpus_of(['a'], ['b'], ['c']),
                          KernelConfig(variant='west', theta=0.5), sim, threads=1)

        self.assertTrue(gram.indefinite)
        self.assertLess(definiteness_report(gram).min_eigenvalue, 0.0)

    def test_threshold_gram_flagged_definite(self):
        """Test that a WEST matrix is always checked"""
        sim = TableSimilarity({})
        gram = gram_train(corpus_of(['a'], ['b']), KernelConfig(variant='west', theta=0.5), sim,
                          threads=1)
        self.assertIs(gram.indefinite, False)

    def test_memo_is_transparent(self):
        """Test that the memo returns the wrapped function's values"""
        sim = CosineSimilarity(random_embedding_table(seed=6))
        memo = SimilarityMemo(sim)
        for a in 'abc':
            for b in 'abc':
                self.assertEqual(memo((a, False), (b, False)), sim((a, False), (b, False)))
        self.assertEqual(len(memo.cache), 6)


class AspectHandlingTestCase(SimpleTestCase):
    """Test cases for aspect marking inside the Gram builders"""

    def setUp(self):
        sentence = Sentence(id='r1', tokens=['Great', 'food', 'but', 'rude', 'staff'])
        self.corpus = Corpus(tuple(
            expand_aspect_instances(sentence, [({1}, 'positive'), ({4}, 'negative')])
        ))
        self.sim = CosineSimilarity(random_embedding_table(
            tokens=('great', 'food', 'but', 'rude', 'staff'), seed=9,
        ))

    def test_unmarked_rows_identical(self):
        """Test that without aspect handling both instances look the same"""
        gram = gram_train(self.corpus, SM, threads=1)
        np.testing.assert_array_equal(gram.values[0], gram.values[1])

    def test_suffix_mode_rows_differ(self):
        """Test suffix marking under SM"""
        gram = gram_train(self.corpus, KernelConfig(aspect_mode='suffix'), threads=1)
        self.assertFalse(np.array_equal(gram.values[0], gram.values[1]))
        self.assertLess(gram.values[0, 1], gram.values[0, 0])

    def test_flag_mode_rows_differ(self):
        """Test flag augmentation under WESS"""
        plain = gram_train(self.corpus, KernelConfig(variant='wess'), self.sim, threads=1)
        flagged = gram_train(self.corpus, KernelConfig(variant='wess', aspect_mode='flag'),
                             self.sim, threads=1)

        np.testing.assert_array_equal(plain.values[0], plain.values[1])
        self.assertFalse(np.array_equal(flagged.values[0], flagged.values[1]))
        self.assertNotEqual(plain.fingerprint, flagged.fingerprint)


class CompositeKernelTestCase(SimpleTestCase):
    """Test cases for rbf_gram and combine_grams"""

    def setUp(self):
        self.corpus = corpus_of(['a', 'b'], ['b', 'c'], ['c'])
        self.features = [[2.0, 0.0], [1.0, 1.0], [0.0, 1.0]]

    def test_rbf_diagonal(self):
        """Test that an RBF train matrix has a unit diagonal"""
        gram = rbf_gram(self.features, row_ids=self.corpus.ids)
        np.testing.assert_allclose(gram.values.diagonal(), 1.0)
        self.assertAlmostEqual(gram.values[0, 1], np.exp(-0.5 * 2.0), places=14)

    def test_rbf_gamma_must_be_positive(self):
        """Test gamma <= 0"""
        with self.assertRaises(ValidationError):
            rbf_gram(self.features, gamma=0.0)

    def test_weighted_sum(self):
        """Test an any-gram matrix plus a weighted RBF matrix"""
        anygram = gram_train(self.corpus, SM, threads=1)
        rbf = rbf_gram(self.features, row_ids=self.corpus.ids)

        combined = combine_grams([anygram, rbf], weights=[1.0, 0.5])

        np.testing.assert_allclose(combined.values, anygram.values + 0.5 * rbf.values)
        self.assertTrue(definiteness_report(combined).is_psd)
        self.assertNotEqual(combined.fingerprint, anygram.fingerprint)

    def test_fingerprint_depends_on_weights(self):
        """Test that reweighting changes the fingerprint"""
        anygram = gram_train(self.corpus, SM, threads=1)
        rbf = rbf_gram(self.features, row_ids=self.corpus.ids)
        self.assertNotEqual(
            combine_grams([anygram, rbf], [1.0, 0.5]).fingerprint,
            combine_grams([anygram, rbf], [1.0, 0.25]).fingerprint,
        )

    def test_rejects_bad_combinations(self):
        """Test empty input, negative weights, length and id mismatches"""
        anygram = gram_train(self.corpus, SM, threads=1)
        other = GramMatrix(values=np.eye(3), row_ids=['x', 'y', 'z'], col_ids=['x', 'y', 'z'])

        for grams, weights in (
            ([], None),
            ([anygram], [-1.0]),
            ([anygram], [1.0, 2.0]),
            ([anygram, other], None),
        ):
            with self.assertRaises(ValidationError) as cm:
                combine_grams(grams, weights)
            self.assertEqual(cm.exception.code, 'config')
