"""
Unit Tests for embedding tables and token similarity
"""
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hypothesis_settings, strategies as st

from corpus.sentences import Sentence
from embeddings.similarity import (
    CosineSimilarity,
    DegenerateVectorError,
    augment_aspect_flag,
    cosine,
    token_sim,
)
from embeddings.table import (
    EmbeddingTable,
    load_embedding_cache,
    load_embeddings,
    save_embedding_cache,
)

INV_SQRT2 = 1 / math.sqrt(2)


class TableFileMixin:
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = Path(self._tmp.name)

    def write(self, name, text):
        path = self.tmp / name
        path.write_text(text, encoding='utf-8')
        return path


class LoadEmbeddingsTestCase(TableFileMixin, SimpleTestCase):
    """Test cases for load_embeddings"""

    def test_two_dimensional_table(self):
        """Test a small two-component table"""
        path = self.write('vec.txt', 'service 1 0\nfood 1 1\n')

        table = load_embeddings(path)

        self.assertEqual(table.dim, 2)
        self.assertEqual(len(table), 2)
        np.testing.assert_array_equal(table.lookup('food'), [1.0, 1.0])

    def test_word2vec_header_skipped(self):
        """Test that a "<count> <dim>" first line is not a vector"""
        path = self.write('vec.txt', '2 2\nservice 1 0\nfood 1 1\n')

        table = load_embeddings(path)

        self.assertEqual(len(table), 2)
        self.assertEqual(table.dim, 2)

    def test_dimension_mismatch(self):
        """Test lines of length 3 then 4"""
        path = self.write('vec.txt', 'a 1 2\nb 1 2 3\n')

        with self.assertRaises(ValidationError) as cm:
            load_embeddings(path)

        self.assertEqual(cm.exception.code, 'dimension')
        self.assertEqual(cm.exception.params['line'], 2)
        self.assertEqual(cm.exception.params['found'], 3)
        self.assertEqual(cm.exception.params['expected'], 2)

    def test_expected_dimension_enforced(self):
        """Test that an explicit dimension rejects the first mismatching row"""
        path = self.write('vec.txt', 'a 1 2\n')

        with self.assertRaises(ValidationError) as cm:
            load_embeddings(path, expected_dim=3)

        self.assertEqual(cm.exception.code, 'dimension')

    def test_unparseable_number(self):
        """Test a non-numeric vector component"""
        path = self.write('vec.txt', 'a 1 x\n')

        with self.assertRaises(ValidationError) as cm:
            load_embeddings(path)

        self.assertEqual(cm.exception.code, 'parse')

    def test_non_finite_component(self):
        """Test that nan and inf components are rejected with their line"""
        for text in ('good nan 1\nbad 1 0\n', 'good 1 0\nbad inf 0\n'):
            path = self.write('vec.txt', text)

            with self.assertRaises(ValidationError) as cm:
                load_embeddings(path)

            self.assertEqual(cm.exception.code, 'parse')
            self.assertEqual(cm.exception.params['line'], 1 if 'nan' in text else 2)

    def test_numeric_first_line_is_a_vector(self):
        """Test that "1 5" is a header only when the next line has five components"""
        table = load_embeddings(self.write('vec.txt', '1 5\n2 7\n'))

        self.assertEqual(table.dim, 1)
        np.testing.assert_array_equal(table.lookup('1'), [5.0])
        np.testing.assert_array_equal(table.lookup('2'), [7.0])

    def test_empty_word2vec_file(self):
        """Test a "0 <dim>" header with no vectors"""
        table = load_embeddings(self.write('vec.txt', '0 300\n'))

        self.assertEqual(len(table), 0)

    def test_first_occurrence_wins(self):
        """Test duplicate tokens keep their first vector"""
        path = self.write('vec.txt', 'a 1 0\na 0 1\n')

        table = load_embeddings(path)

        np.testing.assert_array_equal(table.lookup('a'), [1.0, 0.0])

    def test_lowercase_lookup(self):
        """Test that cased entries are found through lowercased lookup"""
        path = self.write('vec.txt', 'Service 1 0\n')

        folded = load_embeddings(path, lowercase_lookup=True)
        exact = load_embeddings(path, lowercase_lookup=False)

        self.assertIn('SERVICE', folded)
        self.assertIn('service', folded)
        self.assertIn('Service', exact)
        self.assertNotIn('service', exact)

    def test_zero_norm_vector_is_missing(self):
        """Test that a zero vector is stored but reported as OOV"""
        path = self.write('vec.txt', 'null 0 0\n')

        table = load_embeddings(path)

        self.assertEqual(len(table), 1)
        self.assertIsNone(table.lookup('null'))

    def test_digest_tracks_contents(self):
        """Test that the digest changes with the file bytes"""
        first = load_embeddings(self.write('a.txt', 'a 1 0\n'))
        same = load_embeddings(self.write('b.txt', 'a 1 0\n'))
        other = load_embeddings(self.write('c.txt', 'a 1 1\n'))

        self.assertEqual(first.digest, same.digest)
        self.assertNotEqual(first.digest, other.digest)


class EmbeddingCacheTestCase(TableFileMixin, SimpleTestCase):
    """Test cases for the binary embedding cache"""

    def test_cache_round_trip(self):
        """Test that the cache preserves tokens, vectors and metadata bit-exactly"""
        table = load_embeddings(self.write('vec.txt', 'café 0.1 -2.5\nfood 1e-300 3\n'))
        cache = self.tmp / 'vec.agk'

        save_embedding_cache(table, cache)
        restored = load_embedding_cache(cache)

        self.assertEqual(restored.dim, table.dim)
        self.assertEqual(restored.digest, table.digest)
        self.assertEqual(restored.lowercase_lookup, table.lowercase_lookup)
        self.assertEqual(list(restored.vectors), list(table.vectors))
        for token, vector in table.vectors.items():
            self.assertEqual(restored.vectors[token].tobytes(), vector.tobytes())

    def test_not_a_cache(self):
        """Test that foreign bytes are rejected"""
        path = self.tmp / 'junk.agk'
        path.write_bytes(b'x' * 200)

        with self.assertRaises(ValidationError) as cm:
            load_embedding_cache(path)

        self.assertEqual(cm.exception.code, 'parse')


class CosineTestCase(SimpleTestCase):
    """Test cases for cosine and augment_aspect_flag"""

    def test_orthogonal(self):
        """Test (1,0) vs (0,1)"""
        self.assertEqual(cosine([1, 0], [0, 1]), 0.0)

    def test_diagonal(self):
        """Test (1,1) vs (1,0)"""
        self.assertAlmostEqual(cosine([1, 1], [1, 0]), 0.7071067812, delta=1e-9)

    def test_opposite(self):
        """Test (1,0) vs (-1,0)"""
        self.assertEqual(cosine([1, 0], [-1, 0]), -1.0)

    def test_zero_norm(self):
        """Test that zero-norm input is degenerate"""
        with self.assertRaises(DegenerateVectorError):
            cosine([0, 0], [1, 0])

    def test_augment_preserves_components(self):
        """Test that augmentation appends one flag component"""
        vec = np.array([0.1, -0.2, 0.3])

        flagged = augment_aspect_flag(vec, True)
        plain = augment_aspect_flag(vec, False)

        self.assertEqual(flagged[:3].tobytes(), vec.tobytes())
        self.assertEqual(flagged[3], 1.0)
        self.assertEqual(plain[3], 0.0)

    def test_flag_lowers_similarity(self):
        """Test (1,0,1) vs (1,0,0)"""
        a = augment_aspect_flag([1, 0], True)
        b = augment_aspect_flag([1, 0], False)
        self.assertAlmostEqual(cosine(a, b), 0.7071067812, delta=1e-9)

    @hypothesis_settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
    )
    def test_range(self, u, v):
        """Test that cosine stays within [-1, 1] up to rounding"""
        if np.linalg.norm(u) == 0 or np.linalg.norm(v) == 0:
            return
        self.assertLessEqual(abs(cosine(u, v)), 1.0 + 1e-12)


class TokenSimTestCase(SimpleTestCase):
    """Test cases for token_sim and CosineSimilarity"""

    def setUp(self):
        self.table = EmbeddingTable(dim=2, vectors={
            'service': np.array([1.0, 0.0]),
            'staff': np.array([1.0, 1.0]),
            'food': np.array([0.0, 1.0]),
        })

    def test_self_similarity(self):
        """Test an in-vocabulary token against itself"""
        self.assertEqual(token_sim('service', 'service', self.table), 1.0)

    def test_oov_string_match_fallback(self):
        """Test OOV exact match and mismatch"""
        self.assertEqual(token_sim('zzqx', 'zzqx', self.table), 1.0)
        self.assertEqual(token_sim('zzqx', 'service', self.table), 0.0)

    def test_in_vocabulary_cosine(self):
        """Test cosine between two known tokens"""
        self.assertAlmostEqual(token_sim('staff', 'service', self.table), INV_SQRT2, places=12)

    def test_case_folded(self):
        """Test that lowercase lookup makes case variants identical"""
        self.assertEqual(token_sim('Service', 'service', self.table), 1.0)

    def test_symmetry(self):
        """Test bit-exact symmetry for every pair of a small vocabulary"""
        vocabulary = ['service', 'staff', 'food', 'zzqx', 'Food']
        sim = CosineSimilarity(self.table, aspect_aware=True)
        for a in vocabulary:
            for b in vocabulary:
                for fa in (False, True):
                    for fb in (False, True):
                        self.assertEqual(sim((a, fa), (b, fb)), sim((b, fb), (a, fa)))

    def test_flags_ignored_unless_aspect_aware(self):
        """Test that flags only count in aspect-aware mode"""
        plain = CosineSimilarity(self.table)
        aware = plain.with_aspect_flags(True)

        self.assertEqual(plain(('service', True), ('service', False)), 1.0)
        self.assertAlmostEqual(aware(('service', True), ('service', False)), INV_SQRT2, places=12)
        self.assertEqual(aware(('service', True), ('service', True)), 1.0)

    def test_oov_flags_must_match(self):
        """Test the fallback compares flags in aspect-aware mode"""
        aware = CosineSimilarity(self.table, aspect_aware=True)
        self.assertEqual(aware(('zzqx', True), ('zzqx', False)), 0.0)
        self.assertEqual(aware(('zzqx', True), ('zzqx', True)), 1.0)

    def test_oov_rate(self):
        """Test the share of distinct tokens without vectors"""
        sim = CosineSimilarity(self.table)
        self.assertEqual(sim.oov_rate(['service', 'zzqx', 'zzqx', 'qq']), 2 / 3)
        self.assertEqual(sim.oov_rate([]), 0.0)

    def test_report_oov_warns(self):
        """Test the warning for sentences with unknown tokens"""
        sim = CosineSimilarity(self.table)
        sentences = [Sentence(id='1', tokens=('service', 'zzqx')), Sentence(id='2', tokens=('zzqx',))]

        with self.assertLogs('embeddings.similarity', level='WARNING') as logs:
            rate = sim.report_oov(sentences, 'training')

        self.assertEqual(rate, 0.5)
        self.assertIn('50.0% of distinct training tokens', logs.output[0])

    def test_report_oov_without_unknown_tokens(self):
        """Test that a fully covered corpus is logged at info level only"""
        sim = CosineSimilarity(self.table)

        with self.assertLogs('embeddings.similarity', level='INFO') as logs:
            rate = sim.report_oov([Sentence(id='1', tokens=('service',))])

        self.assertEqual(rate, 0.0)
        self.assertTrue(all(record.levelname == 'INFO' for record in logs.records))


@unittest.skipUnless(settings.ANYGRAM_REFERENCE_EMBEDDINGS, 'reference embeddings not configured')
class ReferenceEmbeddingsTestCase(SimpleTestCase):
    """Informational check against external 300-d vectors"""

    @override_settings(ANYGRAM_LOWERCASE_LOOKUP=True)
    def test_superb_brilliant(self):
        """Test superb vs brilliant is about 0.72"""
        table = load_embeddings(settings.ANYGRAM_REFERENCE_EMBEDDINGS, expected_dim=300)
        self.assertAlmostEqual(token_sim('superb', 'brilliant', table), 0.72, delta=0.02)
