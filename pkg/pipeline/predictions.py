"""
Prediction files

CSV with one row per test instance in input order: id, predicted label and
one decision-value column per class pair. The first line records the
manifest digest of the run that wrote it.
"""

import logging

import pandas as pd
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

logger = logging.getLogger(__name__)

MANIFEST_PREFIX = '# manifest '


def pair_column(positive, negative):
    return f'{positive} vs {negative}'


def write_predictions(path, ids, prediction, model, manifest=''):
    frame = pd.DataFrame({'id': list(ids), 'predicted': list(prediction.labels)})
    for column, pair in enumerate(model.pairs):
        name = pair_column(model.classes[pair.positive], model.classes[pair.negative])
        frame[name] = prediction.decisions[:, column]

    with open(path, 'w', encoding='utf-8', newline='') as out:
        out.write(f'{MANIFEST_PREFIX}{manifest}\n')
        frame.to_csv(out, index=False, float_format='%.12g')
    logger.info(f"Wrote {len(frame)} predictions to {path}")


def read_predictions(path):
    """
    Returns:
        tuple: (ids, predicted labels, manifest digest)
    """
    with open(path, 'r', encoding='utf-8') as handle:
        first = handle.readline()
        manifest = ''
        if first.startswith(MANIFEST_PREFIX):
            manifest = first[len(MANIFEST_PREFIX):].strip()
        else:
            handle.seek(0)
        frame = pd.read_csv(handle, dtype=str, keep_default_na=False)

    if 'id' not in frame.columns or 'predicted' not in frame.columns:
        raise ValidationError(
            _('%(path)s is not a predictions file (needs "id" and "predicted" columns).'),
            code='parse',
            params={'path': str(path)},
        )
    return frame['id'].tolist(), frame['predicted'].tolist(), manifest
