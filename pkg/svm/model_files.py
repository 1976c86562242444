"""
Model files
JSON with a fixed field order so that identical models serialize to
identical bytes
"""

import json
import logging

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .ovo import BinaryClassifier, SvmModel

logger = logging.getLogger(__name__)

MODEL_FORMAT = 'anygram-svm'
MODEL_VERSION = 1


def model_to_dict(model):
    return {
        'format': MODEL_FORMAT,
        'version': MODEL_VERSION,
        'classes': list(model.classes),
        'C': model.C,
        'kernel_fingerprint': model.kernel_fingerprint,
        'fingerprint': model.fingerprint,
        'kernel_config': model.kernel_config,
        'svm_config': model.svm_config,
        'inputs': model.inputs,
        'manifest': model.manifest,
        'train_ids': list(model.train_ids),
        'pairs': [
            {
                'classes': [model.classes[pair.positive], model.classes[pair.negative]],
                'bias': pair.bias,
                'support': [
                    [index, coefficient]
                    for index, coefficient in zip(pair.support, pair.coefficients)
                ],
                'converged': pair.converged,
                'violation': pair.violation,
                'iterations': pair.iterations,
                'clamped_steps': pair.clamped_steps,
            }
            for pair in model.pairs
        ],
    }


def dumps_model(model):
    return json.dumps(model_to_dict(model), indent=1, ensure_ascii=False) + '\n'


def save_model(model, path):
    with open(path, 'w', encoding='utf-8', newline='') as out:
        out.write(dumps_model(model))
    logger.info(f"Saved model with {len(model.pairs)} classifiers to {path}")


def load_model(path):
    """
    Read a model written by save_model.

    Raises:
        ValidationError: not a model file, unsupported version, or the
            stored fingerprint does not match the content
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = json.load(handle)
    except json.JSONDecodeError as e:
        raise ValidationError(
            _('Model file %(path)s is not valid JSON (line %(line)s).'),
            code='parse',
            params={'path': str(path), 'line': e.lineno},
        ) from e

    if not isinstance(data, dict) or data.get('format') != MODEL_FORMAT:
        raise ValidationError(_('%(path)s is not a model file.'), code='parse',
                              params={'path': str(path)})
    if data.get('version') != MODEL_VERSION:
        raise ValidationError(
            _('Model version %(found)s is not supported (expected %(expected)s).'),
            code='parse',
            params={'found': data.get('version'), 'expected': MODEL_VERSION},
        )

    classes = tuple(data['classes'])
    position = {label: k for k, label in enumerate(classes)}
    pairs = [
        BinaryClassifier(
            positive=position[entry['classes'][0]],
            negative=position[entry['classes'][1]],
            support=tuple(int(index) for index, _coef in entry['support']),
            coefficients=tuple(float(coef) for _index, coef in entry['support']),
            bias=float(entry['bias']),
            converged=entry['converged'],
            violation=entry['violation'],
            iterations=entry['iterations'],
            clamped_steps=entry['clamped_steps'],
        )
        for entry in data['pairs']
    ]
    model = SvmModel(
        classes=classes,
        pairs=pairs,
        train_ids=tuple(data['train_ids']),
        kernel_fingerprint=data['kernel_fingerprint'],
        C=float(data['C']),
        svm_config=data.get('svm_config', {}),
        kernel_config=data.get('kernel_config', {}),
        inputs=data.get('inputs', {}),
        manifest=data.get('manifest', ''),
    )
    if model.fingerprint != data.get('fingerprint'):
        raise ValidationError(
            _('Model file %(path)s is corrupt: stored fingerprint does not match its content.'),
            code='parse',
            params={'path': str(path)},
        )
    return model
