"""
Model assembly and the cross-Gram rebuild used at prediction time
"""

import logging

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from corpus.sentences import load_corpus
from embeddings.similarity import CosineSimilarity
from kernels.config import KernelConfig
from kernels.formats import read_gram
from kernels.gram import gram_cross
from svm.ovo import ovo_predict

from .base import load_table
from .manifest import file_digest

logger = logging.getLogger(__name__)


def model_inputs(train_path, sim=None, embeddings_path=None):
    """Everything predict needs to rebuild the cross Gram matrix."""
    inputs = {'train': {'path': str(train_path), 'sha256': file_digest(train_path)}}
    if sim is not None:
        inputs['embeddings'] = {
            'path': str(embeddings_path),
            'digest': sim.table.digest,
            'dim': sim.table.dim,
            'lowercase_lookup': sim.table.lowercase_lookup,
        }
    return inputs


def require_labels(corpus, role):
    if not corpus.is_labeled:
        missing = next(s.id for s in corpus if s.label is None)
        raise ValidationError(
            _('The %(role)s corpus must be labeled; sentence %(id)r has no label.'),
            code='unlabeled',
            params={'role': role, 'id': missing},
        )


def load_precomputed_gram(path, corpus, fingerprint):
    """
    Read a train Gram matrix written by the gram command.

    The binary format carries ids and a fingerprint, both checked; the text
    formats take them from the corpus and the current kernel flags.
    """
    gram = read_gram(path, row_ids=corpus.ids, col_ids=corpus.ids)
    if gram.fingerprint:
        gram.require_fingerprint(fingerprint)
    else:
        gram.fingerprint = fingerprint
    if list(gram.row_ids) != corpus.ids or list(gram.col_ids) != corpus.ids:
        raise ValidationError(
            _('Gram matrix %(path)s does not cover the training corpus in order.'),
            code='mismatch',
            params={'path': str(path)},
        )
    gram.row_labels = tuple(label or '' for label in corpus.labels)
    return gram


def rebuild_cross_gram(model, test, threads=None):
    """
    Test x train Gram matrix under the model's kernel settings.

    Raises:
        ValidationError: training corpus or embeddings changed since training
    """
    train_info = model.inputs.get('train') or {}
    train_path = train_info.get('path')
    if not train_path:
        raise ValidationError(_('The model does not record its training corpus.'), code='parse')
    if file_digest(train_path) != train_info.get('sha256'):
        raise ValidationError(
            _('Training corpus %(path)s changed since the model was trained.'),
            code='mismatch',
            params={'path': train_path},
        )
    train = load_corpus(train_path)

    config = KernelConfig.from_dict(model.kernel_config)
    sim = None
    if config.uses_embeddings:
        info = model.inputs.get('embeddings') or {}
        table = load_table(info.get('path'), info.get('dim'), info.get('lowercase_lookup'))
        if table.digest != info.get('digest'):
            raise ValidationError(
                _('Embeddings %(path)s changed since the model was trained.'),
                code='mismatch',
                params={'path': info.get('path')},
            )
        sim = CosineSimilarity(table)

    return gram_cross(test, train, config, sim, threads=threads)


def check_known_labels(model, test):
    unknown = sorted({s.label for s in test if s.label is not None} - set(model.classes))
    if unknown:
        raise ValidationError(
            _('Test labels %(labels)s were never seen in training (model classes: %(classes)s).'),
            code='unknown_label',
            params={'labels': ', '.join(unknown), 'classes': ', '.join(model.classes)},
        )


def predict_corpus(model, test, gram_path=None, threads=None):
    """ovo_predict over a precomputed cross Gram, or one rebuilt from the model inputs."""
    if gram_path:
        cross = read_gram(gram_path, row_ids=test.ids, col_ids=model.train_ids)
        if not cross.fingerprint:
            cross.fingerprint = model.kernel_fingerprint
        if list(cross.row_ids) != test.ids:
            raise ValidationError(
                _('Gram matrix %(path)s rows do not match the test corpus.'),
                code='mismatch',
                params={'path': str(gram_path)},
            )
    else:
        cross = rebuild_cross_gram(model, test, threads=threads)
    return ovo_predict(model, cross)
