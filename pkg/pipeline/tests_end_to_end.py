"""
End-to-end tests: corpus to Gram matrix to model to accuracy
"""
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.test import SimpleTestCase

from corpus.sentences import dump_corpus
from embeddings.similarity import CosineSimilarity
from kernels.config import KernelConfig
from kernels.gram import gram_cross, gram_train
from oracle.generators import marker_corpus, marker_embedding_table, swap_markers
from pipeline.predictions import read_predictions
from svm.config import SvmConfig
from svm.evaluation import evaluate_accuracy
from svm.model_files import load_model, model_to_dict
from svm.ovo import ovo_predict, ovo_train


def fit_and_score(train, test, config, sim=None):
    gram = gram_train(train, config, sim, threads=1)
    model = ovo_train(gram, train.labels, SvmConfig(threads=1))
    prediction = ovo_predict(model, gram_cross(test, train, config, sim, threads=1))
    return prediction, evaluate_accuracy(prediction.labels, test.labels)


class MarkerClassificationTestCase(SimpleTestCase):
    """Test cases for classification quality on the marker corpora"""

    def setUp(self):
        self.train = marker_corpus(100, seed=11)
        self.test = marker_corpus(40, seed=12, prefix='t')
        self.sim = CosineSimilarity(marker_embedding_table())

    def test_string_match_learns_markers(self):
        """Test that SM separates classes marked by shared words"""
        _prediction, report = fit_and_score(self.train, self.test, KernelConfig(variant='sm'))

        self.assertGreaterEqual(report.accuracy, 0.95)

    def test_similarity_score_transfers_to_synonyms(self):
        """Test that WESS generalizes to unseen synonyms where SM cannot"""
        swapped = swap_markers(self.test)

        _p, sm = fit_and_score(self.train, swapped, KernelConfig(variant='sm'))
        _p, wess = fit_and_score(self.train, swapped, KernelConfig(variant='wess'), self.sim)

        self.assertGreaterEqual(wess.accuracy, sm.accuracy + 0.10)
        self.assertGreaterEqual(wess.accuracy, 0.9)


class CommandPipelineTestCase(SimpleTestCase):
    """Test cases comparing the command pipeline with in-process calls"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = Path(self._tmp.name)

        self.train_corpus = marker_corpus(45, seed=21)
        self.test_corpus = marker_corpus(15, seed=22, prefix='t')
        self.train = str(self.tmp / 'train.jsonl')
        self.test = str(self.tmp / 'test.jsonl')
        dump_corpus(self.train_corpus, self.train)
        dump_corpus(self.test_corpus, self.test)

    def call(self, name, *args):
        out = StringIO()
        call_command(name, *args, '--threads', '1', stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_precomputed_gram_trains_the_same_model(self):
        """Test train --gram against train recomputing the matrix"""
        gram = str(self.tmp / 'k.bin')
        direct = str(self.tmp / 'direct.json')
        via_gram = str(self.tmp / 'via_gram.json')

        self.call('gram', '--in', self.train, '--out', gram)
        self.call('train', '--in', self.train, '--out', direct)
        self.call('train', '--in', self.train, '--out', via_gram, '--gram', gram)

        first = model_to_dict(load_model(direct))
        second = model_to_dict(load_model(via_gram))
        first.pop('manifest')
        second.pop('manifest')
        self.assertEqual(first, second)

    def test_predictions_match_in_process(self):
        """Test train, predict and eval against the library calls"""
        model = str(self.tmp / 'model.json')
        predictions = str(self.tmp / 'pred.csv')

        self.call('train', '--in', self.train, '--out', model)
        self.call('predict', '--model', model, '--test', self.test, '--out', predictions)
        output = self.call('eval', '--test', self.test, '--model', model)

        expected, report = fit_and_score(self.train_corpus, self.test_corpus, KernelConfig())
        _ids, predicted, _manifest = read_predictions(predictions)
        self.assertEqual(predicted, expected.labels)
        self.assertIn(f'({report.correct}/{report.total})', output)

    def test_predict_from_cross_gram(self):
        """Test predict --gram against rebuilding the cross matrix"""
        gram = str(self.tmp / 'k.bin')
        model = str(self.tmp / 'model.json')
        rebuilt = str(self.tmp / 'rebuilt.csv')
        precomputed = str(self.tmp / 'precomputed.csv')

        self.call('gram', '--in', self.train, '--test', self.test, '--out', gram)
        self.call('train', '--in', self.train, '--out', model, '--gram', gram)
        self.call('predict', '--model', model, '--test', self.test, '--out', rebuilt)
        self.call('predict', '--model', model, '--test', self.test, '--out', precomputed,
                  '--gram', str(self.tmp / 'k.test.bin'))

        self.assertEqual(read_predictions(rebuilt)[1], read_predictions(precomputed)[1])
