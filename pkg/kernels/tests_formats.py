"""
Unit Tests for Gram matrix files
"""
import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from kernels.config import KernelConfig
from kernels.formats import infer_gram_format, read_gram, write_gram
from kernels.gram import GramMatrix, gram_train
from oracle.generators import random_corpus


class GramFileTestCase(SimpleTestCase):
    """Test cases for write_gram and read_gram"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = Path(self._tmp.name)

        corpus = random_corpus(6, seed=2, labels=['neg', 'pos'])
        self.gram = gram_train(corpus, KernelConfig(decay=0.3), threads=1)
        self.gram.manifest = 'abc123'

    def test_binary_is_bit_exact(self):
        """Test that the binary format keeps values and metadata exactly"""
        path = self.tmp / 'train.bin'

        write_gram(self.gram, path)
        restored = read_gram(path)

        self.assertEqual(restored.values.tobytes(), self.gram.values.tobytes())
        self.assertEqual(restored.row_ids, self.gram.row_ids)
        self.assertEqual(restored.col_ids, self.gram.col_ids)
        self.assertEqual(restored.row_labels, self.gram.row_labels)
        self.assertEqual(restored.fingerprint, self.gram.fingerprint)
        self.assertEqual(restored.manifest, 'abc123')
        self.assertIsNone(restored.indefinite)

    def test_binary_indefinite_flag(self):
        """Test that the definiteness flag survives the binary format"""
        gram = GramMatrix(values=[[1.0, 2.0], [2.0, 1.0]], row_ids=['a', 'b'], col_ids=['a', 'b'],
                          indefinite=True)
        path = self.tmp / 'west.bin'

        write_gram(gram, path)

        self.assertIs(read_gram(path).indefinite, True)

    def test_precomputed_text(self):
        """Test the precomputed-kernel layout and 12 significant digits"""
        path = self.tmp / 'train.precomp'

        write_gram(self.gram, path)
        first_line = path.read_text(encoding='utf-8').splitlines()[0].split()
        restored = read_gram(path, row_ids=self.gram.row_ids, col_ids=self.gram.col_ids)

        self.assertEqual(first_line[0], 'neg')
        self.assertEqual(first_line[1], '0:1')
        self.assertEqual(len(first_line), 2 + len(self.gram.col_ids))
        np.testing.assert_allclose(restored.values, self.gram.values, rtol=1e-11, atol=0)
        self.assertEqual(restored.row_labels, self.gram.row_labels)
        self.assertEqual(restored.row_ids, self.gram.row_ids)

    def test_precomputed_unlabeled_rows(self):
        """Test that unlabeled rows are written as 0 and read back as empty"""
        gram = GramMatrix(values=[[0.5]], row_ids=['x'], col_ids=['x'])
        path = self.tmp / 'one.txt'

        write_gram(gram, path)

        self.assertEqual(path.read_text(encoding='utf-8'), '0 0:1 1:0.5\n')
        restored = read_gram(path)
        self.assertEqual(restored.row_labels, ('',))
        self.assertEqual(restored.row_ids, ('1',))

    def test_precomputed_labels_survive(self):
        """Test that any corpus label survives the label field"""
        labels = ('very positive', '0', '50%', 'négatif', '')
        gram = GramMatrix(values=np.eye(5), row_ids=list('abcde'), col_ids=list('abcde'),
                          row_labels=labels)
        path = self.tmp / 'labels.precomp'

        write_gram(gram, path)
        fields = [line.split()[0] for line in path.read_text(encoding='utf-8').splitlines()]

        self.assertEqual(fields[0], 'very%20positive')
        self.assertEqual(fields[1], '%30')
        self.assertEqual(fields[4], '0')
        self.assertEqual(read_gram(path).row_labels, labels)

    def test_precomputed_ragged_rows(self):
        """Test rows of different lengths"""
        path = self.tmp / 'bad.precomp'
        path.write_text('0 0:1 1:0.5 2:0.1\n0 0:2 1:0.1\n', encoding='utf-8')

        with self.assertRaises(ValidationError) as cm:
            read_gram(path)

        self.assertEqual(cm.exception.code, 'parse')

    def test_precomputed_malformed_entry(self):
        """Test an entry without an index"""
        path = self.tmp / 'bad.precomp'
        path.write_text('0 0:1 0.5\n', encoding='utf-8')

        with self.assertRaises(ValidationError) as cm:
            read_gram(path)

        self.assertEqual(cm.exception.params['line'], 1)

    def test_csv(self):
        """Test the CSV layout with id header and 12 significant digits"""
        path = self.tmp / 'train.csv'

        write_gram(self.gram, path)
        header = path.read_text(encoding='utf-8').splitlines()[0]
        restored = read_gram(path)

        self.assertEqual(header, 'id,' + ','.join(self.gram.col_ids))
        self.assertEqual(restored.row_ids, self.gram.row_ids)
        self.assertEqual(restored.col_ids, self.gram.col_ids)
        np.testing.assert_allclose(restored.values, self.gram.values, rtol=1e-11, atol=0)

    def test_format_inference(self):
        """Test suffix based format selection"""
        self.assertEqual(infer_gram_format('k.bin'), 'bin')
        self.assertEqual(infer_gram_format('k.CSV'), 'csv')
        self.assertEqual(infer_gram_format('k.svm'), 'precomp')
        self.assertEqual(infer_gram_format('k'), 'bin')

    def test_unknown_format(self):
        """Test an explicit unknown format"""
        with self.assertRaises(ValidationError):
            write_gram(self.gram, self.tmp / 'x.out', format='npy')

    def test_not_a_gram_file(self):
        """Test foreign bytes under a .bin name"""
        path = self.tmp / 'junk.bin'
        path.write_bytes(b'\x00' * 64)

        with self.assertRaises(ValidationError) as cm:
            read_gram(path)

        self.assertEqual(cm.exception.code, 'parse')
