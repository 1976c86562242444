"""
Predict labels for a test corpus with a trained model
"""

from corpus.sentences import load_corpus
from pipeline.base import AnygramCommand
from pipeline.manifest import RunManifest
from pipeline.predictions import write_predictions
from pipeline.training import check_known_labels, predict_corpus
from svm.model_files import load_model


class Command(AnygramCommand):
    help = 'Predict labels for a test corpus'
    uses_kernel_flags = False

    def add_arguments(self, parser):
        parser.add_argument('--model', required=True, help='Model file from the train command')
        parser.add_argument('--test', required=True, help='Test corpus')
        parser.add_argument('--out', required=True, help='Predictions file (CSV)')
        parser.add_argument('--gram', default=None,
                            help='Precomputed test x train Gram (default: rebuilt from the model inputs)')
        parser.add_argument('--threads', type=int, default=None,
                            help='Worker count (default: all cores)')

    def run(self, **options):
        self.banner('ANY-GRAM PREDICTION')
        model = load_model(options['model'])
        test = load_corpus(options['test'])
        check_known_labels(model, test)

        manifest = RunManifest('predict', config={
            'model_fingerprint': model.fingerprint,
            'kernel': model.kernel_config,
        })
        manifest.add_input('model', options['model'])
        manifest.add_input('test', options['test'])
        manifest.add_input('gram', options['gram'])

        with manifest.timed('predict'):
            prediction = predict_corpus(model, test, options['gram'], options['threads'])

        manifest.add_output(options['out'])
        write_predictions(options['out'], test.ids, prediction, model, manifest.digest)
        manifest.write(options['out'])

        self.stdout.write(self.style.SUCCESS(
            f"\n{len(prediction.labels)} predictions -> {options['out']}"
        ))
