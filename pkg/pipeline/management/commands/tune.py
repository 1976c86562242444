"""
Tune C (and theta for WEST) on a development set
"""

import json

from django.conf import settings

from corpus.sentences import load_corpus
from pipeline.base import AnygramCommand, float_list
from pipeline.manifest import RunManifest
from pipeline.training import require_labels
from pipeline.tuning import tune
from svm.config import SvmConfig
from svm.validators import SOLVERS


class Command(AnygramCommand):
    help = 'Grid-search C (and theta for WEST) by development-set accuracy'

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='train', required=True, help='Labeled training corpus')
        parser.add_argument('--dev', required=True, help='Labeled development corpus')
        parser.add_argument('--out', default=None, help='Optional JSON tuning report')
        parser.add_argument('--C-grid', dest='C_grid', type=float_list,
                            default=list(settings.ANYGRAM_C_GRID),
                            help='Comma-separated C values (default: %(default)s)')
        parser.add_argument('--theta-grid', dest='theta_grid', type=float_list,
                            default=list(settings.ANYGRAM_THETA_GRID),
                            help='Comma-separated thresholds for WEST (default: %(default)s)')
        parser.add_argument('--tol', type=float, default=None, help='KKT tolerance')
        parser.add_argument('--max-passes', type=int, default=None, help='Solver pass cap')
        parser.add_argument('--seed', type=int, default=None, help='Solver tie-breaking seed')
        parser.add_argument('--solver', choices=SOLVERS, default='smo')
        super().add_arguments(parser)

    def run(self, **options):
        self.banner('ANY-GRAM TUNING')
        # theta comes from the grid; validate everything else up front
        base = self.kernel_config(options, theta=0.0 if options['kernel'] == 'west' else None,
                                  with_theta=False)
        svm_config = SvmConfig(
            tol=options['tol'],
            max_passes=options['max_passes'],
            seed=options['seed'],
            solver=options['solver'],
            threads=options['threads'],
        )
        if options['theta'] is not None:
            self.stdout.write(self.style.WARNING('--theta is ignored by tune; use --theta-grid'))

        sim = self.similarity(options)
        train = load_corpus(options['train'])
        dev = load_corpus(options['dev'])
        require_labels(train, 'training')
        require_labels(dev, 'development')

        kernel_options = {k: v for k, v in base.as_dict().items() if k != 'theta'}
        manifest = RunManifest('tune', config={
            **kernel_options,
            'C_grid': options['C_grid'],
            'theta_grid': options['theta_grid'] if base.variant.value == 'west' else [],
            'embeddings': options['embeddings'] if base.uses_embeddings else None,
        })
        manifest.add_input('train', options['train'])
        manifest.add_input('dev', options['dev'])

        with manifest.timed('tune'):
            report = tune(train, dev, kernel_options, sim, options['C_grid'],
                          options['theta_grid'], svm_config)

        for notice in report.notices:
            self.stdout.write(self.style.WARNING(notice))

        self.stdout.write(f"\n{'C':>10} {'theta':>8} {'dev acc':>9}")
        for point in report.points:
            theta = '-' if point.theta is None else f'{point.theta:g}'
            self.stdout.write(f'{point.C:>10g} {theta:>8} {point.accuracy * 100:>8.2f}%')

        best = report.best
        best_theta = '' if best.theta is None else f', theta={best.theta:g}'
        self.stdout.write(self.style.SUCCESS(
            f'\nBest: C={best.C:g}{best_theta} (dev accuracy {best.accuracy * 100:.2f}%)'
        ))

        if options['out']:
            manifest.add_output(options['out'])
            data = report.as_dict()
            data['manifest'] = manifest.digest
            with open(options['out'], 'w', encoding='utf-8') as out:
                json.dump(data, out, indent=2)
                out.write('\n')
            manifest.write(options['out'])
            self.stdout.write(f"Report: {options['out']}")
