"""
Shared pieces of the management commands: kernel flags, embedding loading
and translation of failures into exit codes
"""

import argparse
import logging
import sys

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from django.utils.translation import gettext_lazy as _

from embeddings.similarity import CosineSimilarity
from embeddings.table import CACHE_MAGIC, load_embedding_cache, load_embeddings
from kernels.config import KernelConfig
from kernels.gram import FingerprintMismatch
from svm.smo import SolverInputError

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOT_CONVERGED = 3


def float_list(value):
    """argparse type for comma-separated numbers; '' is an empty list."""
    try:
        return [float(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected comma-separated numbers, got {value!r}')


def load_table(path, expected_dim=None, lowercase_lookup=None):
    """Text vectors or a binary cache, told apart by the cache magic."""
    with open(path, 'rb') as handle:
        head = handle.read(len(CACHE_MAGIC))
    if head == CACHE_MAGIC:
        table = load_embedding_cache(path)
        if expected_dim is not None and table.dim != expected_dim:
            raise ValidationError(
                _('Embedding cache has dimension %(found)s, expected %(expected)s.'),
                code='dimension',
                params={'found': table.dim, 'expected': expected_dim},
            )
        return table
    return load_embeddings(path, expected_dim=expected_dim, lowercase_lookup=lowercase_lookup)


class AnygramCommand(BaseCommand):
    """
    Base for the pipeline commands.

    Subclasses implement run(**options). Configuration errors exit with 1,
    data errors with 2; argparse errors are raised as CommandError so they
    exit with 1 as well.
    """

    uses_kernel_flags = True

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            self.stderr.write(f'{e.__class__.__name__}: {e}')
            sys.exit(e.returncode)

    def add_arguments(self, parser):
        if self.uses_kernel_flags:
            self.add_kernel_arguments(parser)

    def add_kernel_arguments(self, parser):
        group = parser.add_argument_group('kernel')
        group.add_argument('--kernel', choices=['sm', 'west', 'wess'], default='sm',
                           help='Any-gram variant (default: sm)')
        group.add_argument('--lambda', dest='decay', type=float, default=None,
                           help=f'Decay factor in (0, 1] (default: {settings.ANYGRAM_DEFAULT_LAMBDA})')
        group.add_argument('--theta', type=float, default=None,
                           help='Similarity threshold in [-1, 1]; WEST only')
        group.add_argument('--normalize', action='store_true',
                           help='Normalize to K(a,b) / sqrt(K(a,a) K(b,b))')
        group.add_argument('--aspect-mode', choices=['none', 'suffix', 'flag'], default='none',
                           help='Aspect-term marking: suffix (SM) or vector flag (WEST/WESS)')
        group.add_argument('--suffix', default=None,
                           help=f'Aspect suffix (default: {settings.ANYGRAM_DEFAULT_SUFFIX})')
        group.add_argument('--embeddings', default=None,
                           help='Word vectors (text format or binary cache); required for WEST/WESS')
        group.add_argument('--expected-dim', type=int, default=None,
                           help='Required vector dimensionality')
        group.add_argument('--lowercase-lookup', action=argparse.BooleanOptionalAction, default=None,
                           help='Lowercase tokens before vector lookup')
        group.add_argument('--threads', type=int, default=None,
                           help='Worker count (default: all cores)')

    # ------------------------------------------------------------------
    # Option resolution
    # ------------------------------------------------------------------

    def kernel_config(self, options, theta=None, with_theta=True):
        return KernelConfig(
            variant=options['kernel'],
            decay=options['decay'],
            theta=options['theta'] if with_theta else theta,
            normalize=options['normalize'],
            aspect_mode=options['aspect_mode'],
            suffix=options['suffix'],
        )

    def similarity(self, options):
        """CosineSimilarity for WEST/WESS, None for SM."""
        if options['kernel'] == 'sm':
            if options.get('embeddings'):
                self.stdout.write(self.style.WARNING('SM ignores --embeddings'))
            return None
        if not options.get('embeddings'):
            raise ValidationError(
                _('The %(variant)s kernel needs --embeddings.'),
                code='config',
                params={'variant': options['kernel'].upper()},
            )
        table = load_table(options['embeddings'], options['expected_dim'], options['lowercase_lookup'])
        self.stdout.write(f'Loaded {len(table)} vectors of dimension {table.dim}')
        return CosineSimilarity(table)

    def banner(self, title):
        self.stdout.write(self.style.WARNING('=' * 70))
        self.stdout.write(self.style.WARNING(title))
        self.stdout.write(self.style.WARNING('=' * 70))

    # ------------------------------------------------------------------
    # Error translation
    # ------------------------------------------------------------------

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except CommandError:
            raise
        except ValidationError as e:
            code = getattr(e, 'code', None)
            message = ' '.join(str(m) for m in e.messages)
            self.stderr.write(self.style.ERROR(message))
            logger.error(message)
            raise CommandError(message, returncode=EXIT_USAGE if code == 'config' else EXIT_DATA)
        except (FingerprintMismatch, SolverInputError) as e:
            logger.error(str(e))
            raise CommandError(str(e), returncode=EXIT_DATA)
        except OSError as e:
            logger.error(str(e))
            raise CommandError(str(e), returncode=EXIT_DATA)

    def run(self, **options):
        raise NotImplementedError('subclasses of AnygramCommand must provide a run() method')
