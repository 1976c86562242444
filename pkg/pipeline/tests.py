"""
Unit Tests for the management commands, tuning, manifests and the self-test
"""
import argparse
import json
import tempfile
from io import StringIO
from pathlib import Path
from types import SimpleNamespace

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from corpus.sentences import Corpus, Sentence, dump_corpus
from kernels import anygram_algorithm
from kernels.config import KernelConfig
from kernels.formats import read_gram
from kernels.gram import gram_train
from oracle.generators import marker_corpus, marker_embedding_table, random_corpus, write_embedding_text
from pipeline.base import EXIT_DATA, EXIT_NOT_CONVERGED, EXIT_USAGE, float_list
from pipeline.management.commands.gram import Command as GramCommand
from pipeline.manifest import RunManifest, manifest_path, read_manifest
from pipeline.predictions import read_predictions, write_predictions
from pipeline.selftest import run_selftest
from pipeline.tuning import GridPoint, select_best, tune
from svm.config import SvmConfig
from svm.model_files import load_model
from svm.ovo import Prediction, ovo_train


class PipelineFixtureMixin:
    """Temporary marker corpora and vectors on disk."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = Path(self._tmp.name)

        self.train_corpus = marker_corpus(30, seed=1)
        self.test_corpus = marker_corpus(12, seed=2, prefix='t')
        self.train = self.path('train.jsonl')
        self.test = self.path('test.jsonl')
        self.vectors = self.path('vectors.txt')
        dump_corpus(self.train_corpus, self.train)
        dump_corpus(self.test_corpus, self.test)
        write_embedding_text(marker_embedding_table(), self.vectors)

    def path(self, name):
        return str(self.tmp / name)

    def call(self, name, *args):
        out = StringIO()
        call_command(name, *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def assert_exit(self, code, name, *args):
        with self.assertRaises(CommandError) as cm:
            self.call(name, *args)
        self.assertEqual(cm.exception.returncode, code, str(cm.exception))
        return cm.exception

    def train_model(self, *args):
        model = self.path('model.json')
        self.call('train', '--in', self.train, '--out', model, '--threads', '1', *args)
        return model


class GramCommandTestCase(PipelineFixtureMixin, SimpleTestCase):
    """Test cases for the gram command"""

    def test_csv_gram(self):
        """Test gram --kernel sm --lambda 0.5 --in train.jsonl --out k.csv"""
        out = self.path('k.csv')

        self.call('gram', '--kernel', 'sm', '--lambda', '0.5', '--in', self.train, '--out', out,
                  '--threads', '1')

        gram = read_gram(out)
        expected = gram_train(self.train_corpus, KernelConfig(decay=0.5), threads=1)
        self.assertEqual(gram.shape, (30, 30))
        self.assertEqual(gram.row_ids, tuple(self.train_corpus.ids))
        np.testing.assert_allclose(gram.values, expected.values, rtol=1e-11)

        manifest = read_manifest(manifest_path(out))
        self.assertEqual(manifest['command'], 'gram')
        self.assertEqual(manifest['config']['decay'], 0.5)
        self.assertIn('train', manifest['inputs'])

    def test_cross_gram_default_path(self):
        """Test that the test x train matrix lands next to the train matrix"""
        out = self.path('k.bin')

        self.call('gram', '--in', self.train, '--test', self.test, '--out', out, '--threads', '1')

        cross = read_gram(self.path('k.test.bin'))
        train = read_gram(out)
        manifest = read_manifest(manifest_path(out))
        self.assertEqual(cross.shape, (12, 30))
        self.assertEqual(cross.col_ids, train.row_ids)
        self.assertEqual(cross.fingerprint, train.fingerprint)
        self.assertEqual(train.manifest, manifest['digest'])
        self.assertEqual(cross.manifest, manifest['digest'])

    def test_reruns_are_reproducible(self):
        """Test identical bytes and manifest digests for identical runs"""
        out = self.path('k.bin')
        args = ('gram', '--kernel', 'wess', '--embeddings', self.vectors, '--in', self.train,
                '--out', out, '--threads', '1')

        self.call(*args)
        first_bytes = Path(out).read_bytes()
        first_digest = read_manifest(manifest_path(out))['digest']
        self.call(*args)

        self.assertEqual(Path(out).read_bytes(), first_bytes)
        self.assertEqual(read_manifest(manifest_path(out))['digest'], first_digest)

    def test_west_with_embeddings(self):
        """Test a WEST matrix over the marker vectors"""
        out = self.path('west.bin')

        self.call('gram', '--kernel', 'west', '--theta', '0.5', '--embeddings', self.vectors,
                  '--in', self.train, '--out', out, '--threads', '1')

        self.assertIsNotNone(read_gram(out).indefinite)

    def test_west_requires_theta(self):
        """Test gram --kernel west without --theta"""
        self.assert_exit(EXIT_USAGE, 'gram', '--kernel', 'west', '--embeddings', self.vectors,
                         '--in', self.train, '--out', self.path('k.bin'))

    def test_suffix_mode_requires_string_match(self):
        """Test gram --kernel wess --aspect-mode suffix"""
        self.assert_exit(EXIT_USAGE, 'gram', '--kernel', 'wess', '--aspect-mode', 'suffix',
                         '--embeddings', self.vectors, '--in', self.train,
                         '--out', self.path('k.bin'))

    def test_embedding_variant_needs_vectors(self):
        """Test gram --kernel wess without --embeddings"""
        self.assert_exit(EXIT_USAGE, 'gram', '--kernel', 'wess', '--in', self.train,
                         '--out', self.path('k.bin'))

    def test_bad_flag_value(self):
        """Test that argparse errors are usage errors"""
        self.assert_exit(EXIT_USAGE, 'gram', '--kernel', 'tree', '--in', self.train,
                         '--out', self.path('k.bin'))

    def test_missing_corpus(self):
        """Test that an unreadable input is a data error"""
        self.assert_exit(EXIT_DATA, 'gram', '--in', self.path('absent.jsonl'),
                         '--out', self.path('k.bin'))

    def test_malformed_corpus(self):
        """Test that a parse error is a data error and names the line"""
        bad = self.tmp / 'bad.jsonl'
        bad.write_text('{"id": "1", "tokens": ["a"]}\n{"id": "2", "tokens": ["a"], "aspect": [9]}\n',
                       encoding='utf-8')

        error = self.assert_exit(EXIT_DATA, 'gram', '--in', str(bad), '--out', self.path('k.bin'))

        self.assertIn('Line 2', str(error))

    def test_non_finite_vectors(self):
        """Test that a vector file with nan components is a data error with its line"""
        vectors = self.tmp / 'nan.txt'
        vectors.write_text('great nan 1\nawful 1 0\n', encoding='utf-8')

        error = self.assert_exit(EXIT_DATA, 'gram', '--kernel', 'wess', '--embeddings', str(vectors),
                                 '--in', self.train, '--out', self.path('k.bin'))

        self.assertIn('Line 1', str(error))


class TrainPredictEvalTestCase(PipelineFixtureMixin, SimpleTestCase):
    """Test cases for train, predict and eval"""

    def test_train_writes_model_and_manifest(self):
        """Test the model file, its manifest and the accuracy line"""
        model_path = self.path('model.json')

        output = self.call('train', '--in', self.train, '--out', model_path, '--C', '10',
                           '--threads', '1')

        model = load_model(model_path)
        self.assertEqual(model.classes, ('negative', 'neutral', 'positive'))
        self.assertEqual(len(model.pairs), 3)
        self.assertEqual(model.C, 10.0)
        self.assertEqual(model.manifest, read_manifest(manifest_path(model_path))['digest'])
        self.assertIn('Training accuracy:', output)

    def test_zero_C(self):
        """Test train --C 0"""
        self.assert_exit(EXIT_USAGE, 'train', '--in', self.train, '--out', self.path('m.json'),
                         '--C', '0')

    def test_unlabeled_training_corpus(self):
        """Test that training needs labels"""
        unlabeled = self.path('unlabeled.jsonl')
        dump_corpus(Corpus((Sentence(id='u', tokens=['good']),)), unlabeled)
        self.assert_exit(EXIT_DATA, 'train', '--in', unlabeled, '--out', self.path('m.json'))

    def test_predict_then_eval(self):
        """Test that eval over a predictions file matches eval over the model"""
        model = self.train_model()
        predictions = self.path('pred.csv')

        self.call('predict', '--model', model, '--test', self.test, '--out', predictions,
                  '--threads', '1')
        from_file = self.call('eval', '--test', self.test, '--predictions', predictions)
        in_process = self.call('eval', '--test', self.test, '--model', model, '--threads', '1')

        ids, labels, manifest = read_predictions(predictions)
        self.assertEqual(ids, self.test_corpus.ids)
        self.assertEqual(manifest, read_manifest(manifest_path(predictions))['digest'])
        accuracy_line = [line for line in from_file.splitlines() if line.startswith('Accuracy')]
        self.assertEqual(len(accuracy_line), 1)
        self.assertIn(accuracy_line[0], in_process)

    def test_eval_json_report(self):
        """Test the JSON accuracy report"""
        model = self.train_model()
        report_path = self.path('report.json')

        self.call('eval', '--test', self.test, '--model', model, '--out', report_path,
                  '--threads', '1')

        report = json.loads(Path(report_path).read_text(encoding='utf-8'))
        self.assertEqual(report['total'], 12)
        self.assertEqual(sum(map(sum, report['confusion'])), 12)
        self.assertGreaterEqual(report['accuracy'], 0.0)

    def test_eval_without_gold_labels(self):
        """Test eval on an unlabeled test corpus"""
        model = self.train_model()
        unlabeled = self.path('unlabeled.jsonl')
        dump_corpus(Corpus(tuple(
            Sentence(id=s.id, tokens=s.tokens) for s in self.test_corpus
        )), unlabeled)

        self.assert_exit(EXIT_DATA, 'eval', '--test', unlabeled, '--model', model)

    def test_eval_needs_a_source(self):
        """Test that eval requires --predictions or --model"""
        self.assert_exit(EXIT_USAGE, 'eval', '--test', self.test)

    def test_unknown_test_label(self):
        """Test a gold label the model never saw"""
        model = self.train_model()
        odd = self.path('odd.jsonl')
        dump_corpus(Corpus((Sentence(id='x', tokens=['great'], label='conflict'),)), odd)

        error = self.assert_exit(EXIT_DATA, 'predict', '--model', model, '--test', odd,
                                 '--out', self.path('p.csv'))

        self.assertIn('conflict', str(error))

    def test_train_from_mismatched_gram(self):
        """Test a precomputed Gram built with another lambda"""
        gram = self.path('g.bin')
        self.call('gram', '--lambda', '0.3', '--in', self.train, '--out', gram, '--threads', '1')

        self.assert_exit(EXIT_DATA, 'train', '--in', self.train, '--out', self.path('m.json'),
                         '--gram', gram, '--lambda', '0.5')

    def test_train_from_precomputed_text(self):
        """Test train --gram over a precomputed-kernel text file with spaced labels"""
        spaced = self.path('spaced.jsonl')
        dump_corpus(self.train_corpus.map(
            lambda s: Sentence(id=s.id, tokens=s.tokens, label=f'very {s.label}')
        ), spaced)
        gram = self.path('k.precomp')
        self.call('gram', '--in', spaced, '--out', gram, '--threads', '1')

        model_path = self.path('m.json')
        self.call('train', '--in', spaced, '--out', model_path, '--gram', gram, '--threads', '1')

        self.assertEqual(load_model(model_path).classes,
                         ('very negative', 'very neutral', 'very positive'))

    def test_predict_with_foreign_gram(self):
        """Test a precomputed cross Gram built with another lambda"""
        model = self.train_model('--lambda', '0.5')
        gram = self.path('g.bin')
        self.call('gram', '--lambda', '0.3', '--in', self.train, '--test', self.test,
                  '--out', gram, '--threads', '1')

        self.assert_exit(EXIT_DATA, 'predict', '--model', model, '--test', self.test,
                         '--out', self.path('p.csv'), '--gram', self.path('g.test.bin'))

    def test_changed_training_corpus(self):
        """Test that predict refuses a training corpus edited after training"""
        model = self.train_model()
        dump_corpus(marker_corpus(30, seed=9), self.train)

        self.assert_exit(EXIT_DATA, 'predict', '--model', model, '--test', self.test,
                         '--out', self.path('p.csv'))

    def test_strict_non_convergence(self):
        """Test exit status 3 when a classifier stops at the pass cap"""
        noisy = self.path('noisy.jsonl')
        dump_corpus(random_corpus(20, seed=3, labels=['a', 'b']), noisy)
        args = ('--in', noisy, '--max-passes', '1', '--tol', '1e-12', '--threads', '1')

        output = self.call('train', '--out', self.path('loose.json'), *args)
        self.assertIn('did not converge', output)

        self.assert_exit(EXIT_NOT_CONVERGED, 'train', '--out', self.path('strict.json'),
                         '--strict', *args)
        self.assertTrue(Path(self.path('strict.json')).exists())


class TuneTestCase(PipelineFixtureMixin, SimpleTestCase):
    """Test cases for grid search"""

    def test_tie_prefers_smaller_C(self):
        """Test that equal accuracy goes to the smallest C"""
        best = select_best([
            GridPoint(C=10.0, theta=None, accuracy=0.9),
            GridPoint(C=1.0, theta=None, accuracy=0.9),
            GridPoint(C=100.0, theta=None, accuracy=0.8),
        ])
        self.assertEqual(best.C, 1.0)

    def test_tie_prefers_smaller_theta(self):
        """Test that equal accuracy and C go to the smallest theta"""
        best = select_best([
            GridPoint(C=1.0, theta=0.7, accuracy=0.9),
            GridPoint(C=1.0, theta=0.3, accuracy=0.9),
        ])
        self.assertEqual(best.theta, 0.3)

    def test_similarity_score_ignores_theta_grid(self):
        """Test that WESS tuning skips the theta grid with a notice"""
        sim = marker_similarity()
        report = tune(self.train_corpus, self.test_corpus, {'variant': 'wess'}, sim,
                      C_grid=[1.0, 10.0], theta_grid=[0.3, 0.7], svm_config=SvmConfig(threads=1))

        self.assertEqual(len(report.points), 2)
        self.assertTrue(all(point.theta is None for point in report.points))
        self.assertEqual(len(report.notices), 1)

    def test_threshold_grid(self):
        """Test that WEST tunes every (theta, C) combination"""
        report = tune(self.train_corpus, self.test_corpus, {'variant': 'west'}, marker_similarity(),
                      C_grid=[1.0, 10.0], theta_grid=[0.3, 0.95], svm_config=SvmConfig(threads=1))

        self.assertEqual({(p.C, p.theta) for p in report.points},
                         {(1.0, 0.3), (10.0, 0.3), (1.0, 0.95), (10.0, 0.95)})
        self.assertEqual(report.best, select_best(report.points))

    def test_command_writes_report(self):
        """Test tune --out"""
        report_path = self.path('tune.json')

        output = self.call('tune', '--in', self.train, '--dev', self.test, '--C-grid', '1,10',
                           '--out', report_path, '--threads', '1')

        report = json.loads(Path(report_path).read_text(encoding='utf-8'))
        self.assertEqual([p['C'] for p in report['points']], [1.0, 10.0])
        self.assertIn('manifest', report)
        self.assertIn('Best: C=', output)

    def test_empty_C_grid(self):
        """Test tune --C-grid ''"""
        self.assert_exit(EXIT_USAGE, 'tune', '--in', self.train, '--dev', self.test,
                         '--C-grid', '')

    def test_west_with_empty_theta_grid(self):
        """Test WEST tuning without thresholds"""
        self.assert_exit(EXIT_USAGE, 'tune', '--kernel', 'west', '--embeddings', self.vectors,
                         '--in', self.train, '--dev', self.test, '--theta-grid', '')

    def test_unlabeled_dev(self):
        """Test tuning against an unlabeled development set"""
        unlabeled = self.path('dev.jsonl')
        dump_corpus(Corpus((Sentence(id='d', tokens=['great']),)), unlabeled)
        self.assert_exit(EXIT_DATA, 'tune', '--in', self.train, '--dev', unlabeled)


def marker_similarity():
    from embeddings.similarity import CosineSimilarity
    return CosineSimilarity(marker_embedding_table())


class SelftestTestCase(SimpleTestCase):
    """Test cases for the self-test suites"""

    def test_command_passes(self):
        """Test a reduced self-test run"""
        out = StringIO()
        call_command('selftest', '--pairs', '20', '--corpus-size', '12', stdout=out)
        self.assertIn('All suites passed', out.getvalue())

    def test_single_decay(self):
        """Test selftest --lambda"""
        out = StringIO()
        call_command('selftest', '--pairs', '10', '--corpus-size', '8', '--lambda', '1',
                     stdout=out)
        self.assertIn('oracle-sm', out.getvalue())

    def test_invalid_decay(self):
        """Test selftest --lambda 0"""
        with self.assertRaises(CommandError) as cm:
            call_command('selftest', '--lambda', '0', stdout=StringIO(), stderr=StringIO())
        self.assertEqual(cm.exception.returncode, EXIT_USAGE)

    def test_injected_fault_is_caught(self):
        """Test that a perturbed string-match kernel fails its oracle suite"""
        broken = SimpleNamespace(
            kernel_sm=lambda s1, s2, decay: anygram_algorithm.kernel_sm(s1, s2, decay) * 1.001 + 1e-6,
            kernel_west=anygram_algorithm.kernel_west,
            kernel_wess=anygram_algorithm.kernel_wess,
        )

        report = run_selftest(pairs=30, corpus_size=8, kernels=broken)
        suites = {suite.name: suite for suite in report.suites}

        self.assertFalse(report.passed)
        self.assertFalse(suites['oracle-sm'].passed)
        self.assertTrue(suites['oracle-west'].passed)
        self.assertTrue(suites['oracle-wess'].passed)

    def test_reports_every_suite(self):
        """Test suite names and the reported-only WEST note"""
        report = run_selftest(pairs=10, corpus_size=8)
        names = [suite.name for suite in report.suites]

        self.assertEqual(names, ['oracle-sm', 'oracle-west', 'oracle-wess', 'symmetry', 'psd'])
        self.assertTrue(report.passed)
        psd = report.suites[-1]
        self.assertTrue(any('reported only' in note for note in psd.notes))


class ExitStatusTestCase(PipelineFixtureMixin, SimpleTestCase):
    """Test cases for process exit statuses through run_from_argv"""

    def run_argv(self, *args):
        command = GramCommand(stdout=StringIO(), stderr=StringIO())
        with self.assertRaises(SystemExit) as cm:
            command.run_from_argv(['manage.py', 'gram', *args])
        return cm.exception.code

    def test_usage_error(self):
        """Test that a bad flag exits with status 1"""
        self.assertEqual(self.run_argv('--kernel', 'tree'), EXIT_USAGE)

    def test_data_error(self):
        """Test that a missing input exits with status 2"""
        code = self.run_argv('--in', self.path('absent.jsonl'), '--out', self.path('k.bin'))
        self.assertEqual(code, EXIT_DATA)


class ManifestTestCase(PipelineFixtureMixin, SimpleTestCase):
    """Test cases for run manifests and prediction files"""

    def test_digest_ignores_timings(self):
        """Test that timings are recorded but not digested"""
        first = RunManifest('gram', config={'decay': 0.5})
        second = RunManifest('gram', config={'decay': 0.5})
        first.add_input('train', self.train)
        second.add_input('train', self.train)
        with first.timed('phase'):
            pass
        second.timings['phase'] = 123.0

        self.assertEqual(first.digest, second.digest)
        self.assertIn('phase', first.as_dict()['timings'])

    def test_digest_tracks_inputs(self):
        """Test that input contents change the digest"""
        manifest = RunManifest('gram')
        manifest.add_input('train', self.train)
        before = manifest.digest
        dump_corpus(marker_corpus(5, seed=4), self.train)
        manifest.add_input('train', self.train)

        self.assertNotEqual(manifest.digest, before)

    def test_absent_optional_input(self):
        """Test that None inputs are skipped"""
        manifest = RunManifest('predict')
        manifest.add_input('gram', None)
        self.assertEqual(manifest.inputs, {})

    def test_prediction_file(self):
        """Test the prediction CSV layout"""
        gram = gram_train(self.train_corpus, KernelConfig(), threads=1)
        model = ovo_train(gram, self.train_corpus.labels, SvmConfig(threads=1))
        prediction = Prediction(labels=['positive', 'negative'],
                                decisions=np.array([[0.5, -1.0, 2.0], [0.0, 0.25, -0.125]]),
                                votes=np.zeros((2, 3)))
        path = self.path('pred.csv')

        write_predictions(path, ['a', 'b'], prediction, model, manifest='d1g3st')

        lines = Path(path).read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], '# manifest d1g3st')
        self.assertEqual(
            lines[1],
            'id,predicted,negative vs neutral,negative vs positive,neutral vs positive',
        )
        self.assertEqual(read_predictions(path), (['a', 'b'], ['positive', 'negative'], 'd1g3st'))

    def test_float_list(self):
        """Test the comma-separated number type"""
        self.assertEqual(float_list('1, 10,100'), [1.0, 10.0, 100.0])
        self.assertEqual(float_list(''), [])
        with self.assertRaises(argparse.ArgumentTypeError):
            float_list('1,x')
