"""
Property self-test: oracle equivalence, symmetry and PSD suites
"""

from django.core.management.base import CommandError

from kernels.validators import validate_decay_factor
from pipeline.base import EXIT_DATA, AnygramCommand
from pipeline.selftest import DEFAULT_DECAYS, run_selftest


class Command(AnygramCommand):
    help = 'Check the kernels against brute-force oracles on generated data'
    uses_kernel_flags = False

    def add_arguments(self, parser):
        parser.add_argument('--pairs', type=int, default=200,
                            help='Random sentence pairs per variant (default: 200)')
        parser.add_argument('--seed', type=int, default=0, help='Data generation seed')
        parser.add_argument('--lambda', dest='decay', type=float, default=None,
                            help='Check a single decay factor instead of 0.3, 0.5 and 1.0')
        parser.add_argument('--corpus-size', type=int, default=50,
                            help='Sentences in the PSD corpora (default: 50)')
        parser.add_argument('--threads', type=int, default=1, help='Gram workers')

    def run(self, **options):
        if options['decay'] is not None:
            validate_decay_factor(options['decay'])
        decays = (options['decay'],) if options['decay'] is not None else DEFAULT_DECAYS

        self.banner('ANY-GRAM SELF-TEST')
        report = run_selftest(
            pairs=options['pairs'],
            seed=options['seed'],
            decays=decays,
            corpus_size=options['corpus_size'],
            threads=options['threads'],
        )

        for suite in report.suites:
            status = self.style.SUCCESS('PASS') if suite.passed else self.style.ERROR('FAIL')
            self.stdout.write(f'{status} {suite.name:<12} {suite.checked:>5} checks  {suite.seconds:6.2f}s')
            for note in suite.notes:
                self.stdout.write(f'     {note}')
            for failure in suite.failures:
                self.stdout.write(self.style.ERROR(f'     {failure}'))

        if not report.passed:
            failed = ', '.join(s.name for s in report.suites if not s.passed)
            raise CommandError(f'Self-test failed: {failed}', returncode=EXIT_DATA)
        self.stdout.write(self.style.SUCCESS('\nAll suites passed'))
