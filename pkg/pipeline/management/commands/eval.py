"""
Accuracy of predictions against a gold-labeled corpus
"""

import json

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from corpus.sentences import load_corpus
from pipeline.base import AnygramCommand
from pipeline.predictions import read_predictions
from pipeline.training import check_known_labels, predict_corpus, require_labels
from svm.evaluation import evaluate_accuracy
from svm.model_files import load_model


class Command(AnygramCommand):
    help = 'Report accuracy and confusion counts for a predictions file or a model'
    uses_kernel_flags = False

    def add_arguments(self, parser):
        parser.add_argument('--test', required=True, help='Gold-labeled test corpus')
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--predictions', default=None, help='Predictions file from predict')
        source.add_argument('--model', default=None, help='Model file; predicts in process')
        parser.add_argument('--out', default=None, help='Optional JSON report')
        parser.add_argument('--threads', type=int, default=None,
                            help='Worker count (default: all cores)')

    def run(self, **options):
        self.banner('ANY-GRAM EVALUATION')
        test = load_corpus(options['test'])
        require_labels(test, 'test')

        if options['predictions']:
            ids, predicted, _manifest = read_predictions(options['predictions'])
            if ids != test.ids:
                raise ValidationError(
                    _('Prediction ids do not match the test corpus in order.'),
                    code='mismatch',
                )
        else:
            model = load_model(options['model'])
            check_known_labels(model, test)
            predicted = predict_corpus(model, test, threads=options['threads']).labels

        report = evaluate_accuracy(predicted, test.labels)

        self.stdout.write(self.style.SUCCESS(
            f'\nAccuracy: {report.accuracy * 100:.2f}% ({report.correct}/{report.total})'
        ))
        self.stdout.write('\nConfusion (rows gold, columns predicted):')
        width = max(len(label) for label in report.labels) + 2
        self.stdout.write(' ' * width + ''.join(f'{label:>{width}}' for label in report.labels))
        for label, row in zip(report.labels, report.confusion):
            self.stdout.write(f'{label:<{width}}' + ''.join(f'{count:>{width}}' for count in row))

        if options['out']:
            with open(options['out'], 'w', encoding='utf-8') as out:
                json.dump(report.as_dict(), out, indent=2)
                out.write('\n')
            self.stdout.write(f"Report: {options['out']}")
