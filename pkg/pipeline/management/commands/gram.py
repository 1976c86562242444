"""
Compute train (and optionally test x train) Gram matrices
"""

from pathlib import Path

from corpus.sentences import load_corpus
from kernels.formats import FORMATS, infer_gram_format, write_gram
from kernels.gram import gram_cross, gram_train
from pipeline.base import AnygramCommand
from pipeline.manifest import RunManifest


def default_test_output(out):
    out = Path(out)
    return out.with_name(f'{out.stem}.test{out.suffix}')


class Command(AnygramCommand):
    help = 'Compute any-gram Gram matrices for a corpus (and a test corpus against it)'

    def add_arguments(self, parser):
        parser.add_argument('--in', dest='train', required=True,
                            help='Training corpus (.jsonl or .tsv)')
        parser.add_argument('--test', default=None,
                            help='Optional test corpus; writes a test x train matrix')
        parser.add_argument('--out', required=True,
                            help='Train Gram output path')
        parser.add_argument('--test-out', default=None,
                            help='Cross Gram output path (default: <out stem>.test<suffix>)')
        parser.add_argument('--format', choices=FORMATS, default=None,
                            help='bin, csv or precomp (default: from the --out suffix, else bin)')
        super().add_arguments(parser)

    def run(self, **options):
        self.banner('ANY-GRAM GRAM MATRIX')
        config = self.kernel_config(options)
        sim = self.similarity(options)
        train = load_corpus(options['train'])
        test = load_corpus(options['test']) if options['test'] else None

        out = Path(options['out'])
        fmt = options['format'] or infer_gram_format(out)
        test_out = Path(options['test_out']) if options['test_out'] else default_test_output(out)

        manifest = RunManifest('gram', config={
            **config.as_dict(),
            'embeddings': options['embeddings'] if config.uses_embeddings else None,
            'format': fmt,
        })
        manifest.add_input('train', options['train'])
        manifest.add_input('test', options['test'])
        if config.uses_embeddings:
            manifest.config['embeddings_digest'] = sim.table.digest

        self.stdout.write(f'\nTraining sentences: {len(train)}')
        with manifest.timed('gram_train'):
            gram = gram_train(train, config, sim, threads=options['threads'])
        if gram.indefinite:
            self.stdout.write(self.style.WARNING(
                'WEST Gram matrix is indefinite; written anyway (see log for eigenvalues)'
            ))

        cross = None
        if test is not None:
            self.stdout.write(f'Test sentences: {len(test)}')
            with manifest.timed('gram_cross'):
                cross = gram_cross(test, train, config, sim, threads=options['threads'])

        manifest.add_output(out)
        if cross is not None:
            manifest.add_output(test_out)
        gram.manifest = manifest.digest
        write_gram(gram, out, fmt)
        if cross is not None:
            cross.manifest = manifest.digest
            write_gram(cross, test_out, fmt)
        manifest_file = manifest.write(out)

        self.stdout.write(self.style.SUCCESS(f'\nTrain Gram {gram.shape[0]}x{gram.shape[1]} -> {out}'))
        if cross is not None:
            self.stdout.write(self.style.SUCCESS(
                f'Cross Gram {cross.shape[0]}x{cross.shape[1]} -> {test_out}'
            ))
        self.stdout.write(f'Manifest: {manifest_file}')
