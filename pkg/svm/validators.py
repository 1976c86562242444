# svm/validators.py
"""
Validators for classifier settings and inputs.
"""
import math

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

SOLVERS = ('smo', 'libsvm')


def validate_margin_parameter(value):
    """C must be a positive finite number."""
    if value is None or not math.isfinite(value) or value <= 0:
        raise ValidationError(
            _('The error/margin trade-off C must be positive. Got: %(value)s'),
            code='config',
            params={'value': value},
        )


def validate_tolerance(value):
    if value is None or not math.isfinite(value) or value <= 0:
        raise ValidationError(
            _('The KKT tolerance must be positive. Got: %(value)s'),
            code='config',
            params={'value': value},
        )


def validate_max_passes(value):
    if value is not None and (isinstance(value, bool) or not isinstance(value, int) or value < 1):
        raise ValidationError(
            _('max_passes must be a positive integer. Got: %(value)r'),
            code='config',
            params={'value': value},
        )


def validate_solver(value):
    if value not in SOLVERS:
        raise ValidationError(
            _('Unknown solver %(value)r; choose one of %(choices)s.'),
            code='config',
            params={'value': value, 'choices': ', '.join(SOLVERS)},
        )


def validate_prediction_lengths(predicted, gold):
    """Predictions and gold labels must pair up one to one."""
    if len(predicted) != len(gold):
        raise ValidationError(
            _('%(predicted)s predictions for %(gold)s gold labels.'),
            code='mismatch',
            params={'predicted': len(predicted), 'gold': len(gold)},
        )
    if not gold:
        raise ValidationError(_('Nothing to evaluate: no gold labels.'), code='mismatch')
