# embeddings/validators.py
"""
Validators for pretrained vector files.
"""
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _


def validate_vector_dimension(found, expected, line):
    """Every row of a table has the same number of components."""
    if found != expected:
        raise ValidationError(
            _('Line %(line)s: vector has %(found)s components, expected %(expected)s.'),
            code='dimension',
            params={'line': line, 'found': found, 'expected': expected},
        )


def validate_expected_dim(value):
    """Validate a requested embedding dimensionality."""
    if value is not None and value <= 0:
        raise ValidationError(
            _('Expected dimension must be a positive integer. Got: %(value)s'),
            code='config',
            params={'value': value},
        )
