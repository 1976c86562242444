"""
Train a one-versus-one SVM on an any-gram Gram matrix
"""

from django.conf import settings
from django.core.management.base import CommandError

from corpus.sentences import load_corpus
from kernels.gram import embedding_digest, gram_train
from pipeline.base import EXIT_NOT_CONVERGED, AnygramCommand
from pipeline.manifest import RunManifest
from pipeline.training import load_precomputed_gram, model_inputs, require_labels
from svm.config import SvmConfig
from svm.evaluation import evaluate_accuracy
from svm.model_files import save_model
from svm.ovo import ovo_predict, ovo_train
from svm.validators import SOLVERS


class Command(AnygramCommand):
    help = 'Train a one-versus-one SVM over a precomputed any-gram kernel'

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='train', required=True,
                            help='Labeled training corpus')
        parser.add_argument('--out', required=True, help='Model file (JSON)')
        parser.add_argument('--gram', default=None,
                            help='Train Gram written by the gram command (skips recomputation)')
        parser.add_argument('--C', dest='C', type=float, default=None,
                            help=f'Error/margin trade-off (default: {settings.ANYGRAM_DEFAULT_C})')
        parser.add_argument('--tol', type=float, default=None,
                            help=f'KKT tolerance (default: {settings.ANYGRAM_SVM_TOL})')
        parser.add_argument('--max-passes', type=int, default=None,
                            help='Solver cap in passes over the data (default: 10 * N)')
        parser.add_argument('--seed', type=int, default=None,
                            help='Seed for working-pair tie-breaking')
        parser.add_argument('--solver', choices=SOLVERS, default='smo',
                            help='Built-in SMO or scikit-learn SVC')
        parser.add_argument('--strict', action='store_true',
                            help='Exit with status 3 when a classifier does not converge')
        super().add_arguments(parser)

    def run(self, **options):
        self.banner('ANY-GRAM SVM TRAINING')
        config = self.kernel_config(options)
        svm_config = SvmConfig(
            C=options['C'],
            tol=options['tol'],
            max_passes=options['max_passes'],
            seed=options['seed'],
            solver=options['solver'],
            threads=options['threads'],
        )
        sim = self.similarity(options)
        train = load_corpus(options['train'])
        require_labels(train, 'training')

        manifest = RunManifest('train', config={
            **config.as_dict(),
            **{f'svm_{k}': v for k, v in svm_config.as_dict().items()},
            'embeddings': options['embeddings'] if config.uses_embeddings else None,
        })
        manifest.add_input('train', options['train'])
        manifest.add_input('gram', options['gram'])

        fingerprint = config.fingerprint(embedding_digest(sim))
        with manifest.timed('gram_train'):
            if options['gram']:
                gram = load_precomputed_gram(options['gram'], train, fingerprint)
                self.stdout.write(f"Using precomputed Gram {options['gram']}")
            else:
                gram = gram_train(train, config, sim, threads=options['threads'])

        with manifest.timed('ovo_train'):
            model = ovo_train(gram, train.labels, svm_config)
        model.kernel_config = config.as_dict()
        model.inputs = model_inputs(options['train'], sim, options['embeddings'])

        training = evaluate_accuracy(ovo_predict(model, gram).labels, train.labels)

        manifest.add_output(options['out'])
        model.manifest = manifest.digest
        save_model(model, options['out'])
        manifest.write(options['out'])

        self.stdout.write(self.style.SUCCESS(
            f"\nModel: {len(model.classes)} classes, {len(model.pairs)} classifiers -> {options['out']}"
        ))
        self.stdout.write(
            f'Training accuracy: {training.accuracy * 100:.2f}% ({training.correct}/{training.total})'
        )

        if not model.converged:
            message = (f'{sum(not p.converged for p in model.pairs)} classifier(s) did not converge '
                       f'(worst KKT violation {model.worst_violation:.3e})')
            self.stdout.write(self.style.WARNING(message))
            if options['strict']:
                raise CommandError(message, returncode=EXIT_NOT_CONVERGED)
