"""
Unit Tests for the SMO solver, one-versus-one classification, evaluation
and model files
"""
import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from kernels.gram import FingerprintMismatch, GramMatrix
from svm.config import SvmConfig
from svm.evaluation import evaluate_accuracy
from svm.model_files import dumps_model, load_model, save_model
from svm.ovo import ovo_predict, ovo_train
from svm.smo import SolverInputError, smo_solve

# Linearly separable points; the hard-margin solution has w = (0.5, 0), b = 0
SEPARABLE_POINTS = np.array([[2.0, 0.0], [3.0, 1.0], [-2.0, 0.0], [-3.0, -1.0]])
SEPARABLE_LABELS = np.array([1.0, 1.0, -1.0, -1.0])


def linear_gram(points, ids=None, other=None):
    other = points if other is None else other
    row_ids = ids or [f'r{k}' for k in range(len(points))]
    col_ids = [f'r{k}' for k in range(len(other))]
    return GramMatrix(values=points @ other.T, row_ids=row_ids, col_ids=col_ids)


def identity_gram(ids):
    return GramMatrix(values=np.eye(len(ids)), row_ids=ids, col_ids=ids)


class SmoSolveTestCase(SimpleTestCase):
    """Test cases for the binary solver"""

    def assert_kkt(self, K, y, result, C, tol):
        """Box, equality and complementary-slackness conditions within tol"""
        alphas = result.alphas
        margins = y * (K @ (alphas * y) + result.bias)
        slack = tol + 1e-9

        self.assertTrue(np.all(alphas >= 0))
        self.assertTrue(np.all(alphas <= C))
        self.assertLessEqual(abs(np.dot(alphas, y)), tol)
        for alpha, margin in zip(alphas, margins):
            if alpha == 0:
                self.assertGreaterEqual(margin, 1 - slack)
            elif alpha == C:
                self.assertLessEqual(margin, 1 + slack)
            else:
                self.assertLessEqual(abs(margin - 1), slack)

    def test_identity_two_points(self):
        """Test labels (+1, -1) on an identity Gram with C = 10"""
        result = smo_solve(np.eye(2), [1, -1], SvmConfig(C=10))

        np.testing.assert_array_equal(result.alphas, [1.0, 1.0])
        self.assertEqual(result.bias, 0.0)
        self.assertTrue(result.converged)
        decision = np.eye(2) @ result.dual_coefficients([1, -1]) + result.bias
        np.testing.assert_array_equal(decision, [1.0, -1.0])

    def test_identity_two_points_at_bound(self):
        """Test the same problem with C = 1, where both alphas sit at the bound"""
        result = smo_solve(np.eye(2), [1, -1], SvmConfig(C=1))

        np.testing.assert_array_equal(result.alphas, [1.0, 1.0])
        self.assertEqual(result.bias, 0.0)

    def test_single_class_rejected(self):
        """Test that all-positive labels are rejected"""
        with self.assertRaises(SolverInputError):
            smo_solve(np.eye(3), [1, 1, 1])

    def test_invalid_inputs_rejected(self):
        """Test non-square, asymmetric and badly labeled problems"""
        with self.assertRaises(SolverInputError):
            smo_solve(np.ones((2, 3)), [1, -1])
        with self.assertRaises(SolverInputError):
            smo_solve(np.array([[1.0, 0.5], [0.0, 1.0]]), [1, -1])
        with self.assertRaises(SolverInputError):
            smo_solve(np.eye(2), [1, 2])
        with self.assertRaises(SolverInputError):
            smo_solve(np.eye(2), [1, -1, 1])

    def test_hard_margin_regime(self):
        """Test that C = 1e6 and C = 1e3 give the same alphas on a separable set"""
        K = SEPARABLE_POINTS @ SEPARABLE_POINTS.T

        large = smo_solve(K, SEPARABLE_LABELS, SvmConfig(C=1e6))
        small = smo_solve(K, SEPARABLE_LABELS, SvmConfig(C=1e3))

        np.testing.assert_allclose(large.alphas, small.alphas, atol=1e-3)
        np.testing.assert_allclose(large.alphas, [0.125, 0.0, 0.125, 0.0], atol=1e-3)
        self.assertAlmostEqual(large.bias, 0.0, delta=1e-3)

    def test_kkt_conditions(self):
        """Test KKT conditions on separable and overlapping problems"""
        rng = np.random.default_rng(7)
        points = np.vstack([rng.normal(1.0, 1.0, (15, 2)), rng.normal(-1.0, 1.0, (15, 2))])
        labels = np.array([1.0] * 15 + [-1.0] * 15)
        K = points @ points.T

        for C in (0.1, 1.0, 10.0):
            config = SvmConfig(C=C, tol=1e-4, max_passes=1000)
            result = smo_solve(K, labels, config)
            self.assertTrue(result.converged)
            self.assert_kkt(K, labels, result, C, config.tol)

    def test_seed_reproducible(self):
        """Test identical results for identical seeds"""
        K = SEPARABLE_POINTS @ SEPARABLE_POINTS.T
        first = smo_solve(K, SEPARABLE_LABELS, SvmConfig(seed=3))
        second = smo_solve(K, SEPARABLE_LABELS, SvmConfig(seed=3))

        self.assertEqual(first.alphas.tobytes(), second.alphas.tobytes())
        self.assertEqual(first.bias, second.bias)

    def test_negative_curvature_clamped(self):
        """Test an indefinite Gram: the step runs to the box and is reported"""
        K = np.array([[0.0, 1.0], [1.0, 0.0]])

        with self.assertLogs('svm.smo', level='WARNING') as logs:
            result = smo_solve(K, [1, -1], SvmConfig(C=2))

        np.testing.assert_array_equal(result.alphas, [2.0, 2.0])
        self.assertEqual(result.clamped_steps, 1)
        self.assertTrue(result.converged)
        self.assertIn('non-positive curvature', logs.output[0])

    def test_support(self):
        """Test that support indices are those with positive alphas"""
        K = SEPARABLE_POINTS @ SEPARABLE_POINTS.T
        result = smo_solve(K, SEPARABLE_LABELS, SvmConfig(C=100))
        np.testing.assert_array_equal(result.support, np.flatnonzero(result.alphas > 0))

    def test_libsvm_backend_agrees(self):
        """Test the scikit-learn backend against the built-in solver"""
        K = SEPARABLE_POINTS @ SEPARABLE_POINTS.T

        ours = smo_solve(K, SEPARABLE_LABELS, SvmConfig(C=100))
        theirs = smo_solve(K, SEPARABLE_LABELS, SvmConfig(C=100, solver='libsvm'))

        np.testing.assert_allclose(theirs.alphas, ours.alphas, atol=1e-2)
        self.assertAlmostEqual(theirs.bias, ours.bias, delta=1e-2)
        self.assertTrue(theirs.converged)
        ours_sign = np.sign(K @ ours.dual_coefficients(SEPARABLE_LABELS) + ours.bias)
        theirs_sign = np.sign(K @ theirs.dual_coefficients(SEPARABLE_LABELS) + theirs.bias)
        np.testing.assert_array_equal(ours_sign, theirs_sign)


class SvmConfigTestCase(SimpleTestCase):
    """Test cases for SvmConfig"""

    def test_defaults(self):
        """Test settings-driven defaults"""
        config = SvmConfig()
        self.assertEqual(config.C, 1.0)
        self.assertEqual(config.tol, 1e-3)
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.solver, 'smo')

    def test_invalid_values(self):
        """Test C, tol, max_passes and solver validation"""
        for kwargs in ({'C': 0}, {'C': -1}, {'tol': 0}, {'max_passes': 0}, {'solver': 'qp'}):
            with self.assertRaises(ValidationError) as cm:
                SvmConfig(**kwargs)
            self.assertEqual(cm.exception.code, 'config')

    def test_iteration_cap(self):
        """Test the pass-based update cap"""
        self.assertEqual(SvmConfig(max_passes=3).iteration_cap(5), 15)
        self.assertEqual(SvmConfig().iteration_cap(5), 250)


class OvoTestCase(SimpleTestCase):
    """Test cases for one-versus-one training and prediction"""

    def test_four_classes_six_pairs(self):
        """Test k(k-1)/2 classifiers in combination order"""
        ids = [f'i{k}' for k in range(8)]
        labels = ['positive', 'negative', 'neutral', 'conflict'] * 2

        model = ovo_train(identity_gram(ids), labels, SvmConfig(threads=1))

        self.assertEqual(model.classes, ('conflict', 'negative', 'neutral', 'positive'))
        self.assertEqual([(p.positive, p.negative) for p in model.pairs],
                         [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        self.assertTrue(model.converged)

    def test_two_classes_one_pair(self):
        """Test a binary problem"""
        model = ovo_train(identity_gram(['a', 'b']), ['x', 'y'], SvmConfig(threads=1))
        self.assertEqual(len(model.pairs), 1)

    def test_one_instance_per_class(self):
        """Test three classes with one instance each"""
        ids = ['a', 'b', 'c']
        model = ovo_train(identity_gram(ids), ['A', 'B', 'C'], SvmConfig(C=10, threads=1))

        self.assertEqual(len(model.pairs), 3)
        for pair in model.pairs:
            self.assertEqual(pair.coefficients, (1.0, -1.0))
            self.assertEqual(pair.bias, 0.0)

        prediction = ovo_predict(model, identity_gram(ids))
        self.assertEqual(prediction.labels, ['A', 'B', 'C'])

    def test_all_zero_row_tie(self):
        """Test that a full tie goes to the lowest class index"""
        ids = ['a', 'b', 'c']
        model = ovo_train(identity_gram(ids), ['C', 'B', 'A'], SvmConfig(C=10, threads=1))
        cross = GramMatrix(values=np.zeros((1, 3)), row_ids=['t'], col_ids=ids)

        prediction = ovo_predict(model, cross)

        self.assertEqual(prediction.labels, ['A'])
        np.testing.assert_array_equal(prediction.votes, [[0, 0, 0]])

    def test_training_accuracy_on_separable_set(self):
        """Test 100% training accuracy with a large C"""
        gram = linear_gram(SEPARABLE_POINTS)
        labels = ['pos', 'pos', 'neg', 'neg']

        model = ovo_train(gram, labels, SvmConfig(C=1e3, threads=1))
        prediction = ovo_predict(model, gram)

        self.assertEqual(prediction.labels, labels)

    def test_rescaled_gram(self):
        """Test that K * 4 with C / 4 leaves decisions unchanged"""
        rng = np.random.default_rng(1)
        points = rng.normal(size=(20, 3))
        labels = ['a', 'b', 'c'] * 6 + ['a', 'b']
        gram = linear_gram(points)
        scaled = GramMatrix(values=gram.values * 4, row_ids=gram.row_ids, col_ids=gram.col_ids)

        model = ovo_train(gram, labels, SvmConfig(C=1.0, threads=1))
        scaled_model = ovo_train(scaled, labels, SvmConfig(C=0.25, threads=1))
        prediction = ovo_predict(model, gram)
        scaled_prediction = ovo_predict(scaled_model, scaled)

        self.assertEqual(prediction.labels, scaled_prediction.labels)
        np.testing.assert_allclose(prediction.decisions, scaled_prediction.decisions,
                                   rtol=1e-12, atol=1e-12)

    def test_parallel_training_matches(self):
        """Test that worker count does not change the model"""
        rng = np.random.default_rng(2)
        gram = linear_gram(rng.normal(size=(12, 3)))
        labels = ['a', 'b', 'c'] * 4

        single = ovo_train(gram, labels, SvmConfig(threads=1))
        double = ovo_train(gram, labels, SvmConfig(threads=2))

        self.assertEqual(dumps_model(single), dumps_model(double))

    def test_training_requires_square_labeled_input(self):
        """Test cross matrices, missing labels and a single class"""
        cross = linear_gram(SEPARABLE_POINTS, other=SEPARABLE_POINTS[:2])
        with self.assertRaises(SolverInputError):
            ovo_train(cross, ['a', 'b', 'a', 'b'])
        with self.assertRaises(SolverInputError):
            ovo_train(identity_gram(['a', 'b']), ['x', None])
        with self.assertRaises(SolverInputError):
            ovo_train(identity_gram(['a', 'b']), ['x', 'x'])

    def test_prediction_checks_fingerprint_and_columns(self):
        """Test cross matrices from other settings or other training sets"""
        ids = ['a', 'b']
        model = ovo_train(identity_gram(ids), ['x', 'y'], SvmConfig(threads=1))

        foreign = GramMatrix(values=np.eye(2), row_ids=ids, col_ids=ids, fingerprint='other')
        with self.assertRaises(FingerprintMismatch):
            ovo_predict(model, foreign)

        reordered = GramMatrix(values=np.eye(2), row_ids=ids, col_ids=['b', 'a'])
        with self.assertRaises(FingerprintMismatch):
            ovo_predict(model, reordered)


class EvaluateAccuracyTestCase(SimpleTestCase):
    """Test cases for evaluate_accuracy"""

    def test_all_correct(self):
        """Test accuracy 1.0"""
        self.assertEqual(evaluate_accuracy(['a', 'b'], ['a', 'b']).accuracy, 1.0)

    def test_none_correct(self):
        """Test accuracy 0.0"""
        self.assertEqual(evaluate_accuracy(['b', 'a'], ['a', 'b']).accuracy, 0.0)

    def test_three_of_four(self):
        """Test accuracy 0.75 and the confusion counts"""
        report = evaluate_accuracy(['pos', 'neg', 'pos', 'pos'], ['pos', 'neg', 'neg', 'pos'])

        self.assertEqual(report.accuracy, 0.75)
        self.assertEqual(report.correct, 3)
        self.assertEqual(report.labels, ('neg', 'pos'))
        np.testing.assert_array_equal(report.confusion, [[1, 1], [0, 2]])
        self.assertEqual(report.per_class()['neg'], {'gold': 2, 'predicted': 1, 'correct': 1})

    def test_length_mismatch(self):
        """Test unequal lengths and empty input"""
        for predicted, gold in ((['a'], ['a', 'b']), ([], [])):
            with self.assertRaises(ValidationError) as cm:
                evaluate_accuracy(predicted, gold)
            self.assertEqual(cm.exception.code, 'mismatch')


class ModelFileTestCase(SimpleTestCase):
    """Test cases for model serialization"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = Path(self._tmp.name)

        rng = np.random.default_rng(5)
        self.gram = linear_gram(rng.normal(size=(9, 2)))
        self.gram.fingerprint = 'f' * 64
        self.labels = ['a', 'b', 'c'] * 3

    def test_identical_models_identical_bytes(self):
        """Test that training twice gives byte-identical model files"""
        first = ovo_train(self.gram, self.labels, SvmConfig(threads=1))
        second = ovo_train(self.gram, self.labels, SvmConfig(threads=1))
        self.assertEqual(dumps_model(first), dumps_model(second))

    def test_save_load(self):
        """Test that a loaded model re-serializes to the same bytes and predicts the same"""
        model = ovo_train(self.gram, self.labels, SvmConfig(threads=1))
        path = self.tmp / 'model.json'

        save_model(model, path)
        restored = load_model(path)

        self.assertEqual(dumps_model(restored), path.read_text(encoding='utf-8'))
        self.assertEqual(restored.fingerprint, model.fingerprint)
        self.assertEqual(ovo_predict(restored, self.gram).labels,
                         ovo_predict(model, self.gram).labels)

    def test_tampered_model_rejected(self):
        """Test that an edited C no longer matches the stored fingerprint"""
        model = ovo_train(self.gram, self.labels, SvmConfig(C=1.0, threads=1))
        path = self.tmp / 'model.json'
        save_model(model, path)
        path.write_text(path.read_text(encoding='utf-8').replace('"C": 1.0', '"C": 2.0', 1),
                        encoding='utf-8')

        with self.assertRaises(ValidationError) as cm:
            load_model(path)

        self.assertEqual(cm.exception.code, 'parse')

    def test_not_a_model(self):
        """Test foreign JSON"""
        path = self.tmp / 'other.json'
        path.write_text('{"format": "something"}', encoding='utf-8')
        with self.assertRaises(ValidationError):
            load_model(path)
