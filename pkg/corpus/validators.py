# corpus/validators.py
"""
Validators for tokenized sentence records.
"""
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _


def _where(line):
    return f'Line {line}' if line is not None else 'Sentence'


# ============================================================================
# RECORD VALIDATORS
# ============================================================================

def validate_sentence_id(value, line=None):
    """Validate that an instance id is a non-empty string."""
    if not isinstance(value, str) or not value:
        raise ValidationError(
            _('%(where)s: "id" must be a non-empty string. Got: %(value)r'),
            code='parse',
            params={'where': _where(line), 'line': line, 'value': value},
        )


def validate_tokens(value, line=None):
    """Validate a non-empty list of non-empty token strings."""
    if not isinstance(value, (list, tuple)) or not value:
        raise ValidationError(
            _('%(where)s: "tokens" must be a non-empty list of strings.'),
            code='parse',
            params={'where': _where(line), 'line': line},
        )
    for position, token in enumerate(value):
        if not isinstance(token, str) or not token:
            raise ValidationError(
                _('%(where)s: token %(position)s must be a non-empty string. Got: %(value)r'),
                code='parse',
                params={'where': _where(line), 'line': line, 'position': position, 'value': token},
            )


def validate_label(value, line=None):
    """Validate an optional class label."""
    if value is not None and not isinstance(value, str):
        raise ValidationError(
            _('%(where)s: "label" must be a string. Got: %(value)r'),
            code='parse',
            params={'where': _where(line), 'line': line, 'value': value},
        )


def validate_aspect_indices(value, token_count, line=None):
    """Validate aspect positions are integers inside the sentence."""
    for index in value:
        # bool is an int subclass; true/false in JSON are not positions
        if isinstance(index, bool) or not isinstance(index, int):
            raise ValidationError(
                _('%(where)s: aspect index %(value)r is not an integer.'),
                code='parse',
                params={'where': _where(line), 'line': line, 'value': index},
            )
        if index < 0 or index >= token_count:
            raise ValidationError(
                _('%(where)s: aspect index %(value)s is out of range for %(count)s tokens.'),
                code='aspect_range',
                params={'where': _where(line), 'line': line, 'value': index, 'count': token_count},
            )


def validate_tsv_token(value, line=None):
    """TSV rows join tokens with spaces and fields with tabs."""
    if '\t' in value or ' ' in value:
        raise ValidationError(
            _('%(where)s: token %(value)r contains a tab or space and cannot be written as TSV.'),
            code='parse',
            params={'where': _where(line), 'line': line, 'value': value},
        )


def validate_suffix(value):
    """Validate the aspect-term suffix."""
    if not value:
        raise ValidationError(_('Aspect suffix must be a non-empty string.'), code='config')
