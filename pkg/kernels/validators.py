# kernels/validators.py
"""
Validators for kernel configuration.
"""
import math

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _


# ============================================================================
# PARAMETER VALIDATORS
# ============================================================================

def validate_decay_factor(value):
    """Decay factor lambda must lie in (0, 1]."""
    if value is None or not math.isfinite(value) or value <= 0 or value > 1:
        raise ValidationError(
            _('Decay factor lambda must be in (0, 1]. Got: %(value)s'),
            code='config',
            params={'value': value},
        )


def validate_similarity_threshold(value):
    """Similarity threshold theta must lie in [-1, 1]."""
    if value is None or not math.isfinite(value) or value < -1 or value > 1:
        raise ValidationError(
            _('Similarity threshold theta must be in [-1, 1]. Got: %(value)s'),
            code='config',
            params={'value': value},
        )


# ============================================================================
# COMBINATION VALIDATORS
# ============================================================================

def validate_variant_options(variant, theta, aspect_mode):
    """
    theta belongs to WEST only; suffix marking to SM only; vector flags to
    the embedding variants only.
    """
    if variant == 'west' and theta is None:
        raise ValidationError(
            _('The WEST kernel requires a similarity threshold (theta).'),
            code='config',
        )
    if variant != 'west' and theta is not None:
        raise ValidationError(
            _('A similarity threshold (theta) only applies to the WEST kernel, not %(variant)s.'),
            code='config',
            params={'variant': variant.upper()},
        )
    if aspect_mode == 'suffix' and variant != 'sm':
        raise ValidationError(
            _('Aspect mode "suffix" is only valid with the SM kernel, not %(variant)s.'),
            code='config',
            params={'variant': variant.upper()},
        )
    if aspect_mode == 'flag' and variant == 'sm':
        raise ValidationError(
            _('Aspect mode "flag" is only valid with the WEST or WESS kernels.'),
            code='config',
        )


def validate_similarity_presence(variant, sim):
    """Embedding variants need a similarity function; SM must not get one."""
    if variant != 'sm' and sim is None:
        raise ValidationError(
            _('The %(variant)s kernel needs word embeddings (a similarity function).'),
            code='config',
            params={'variant': variant.upper()},
        )
    if variant == 'sm' and sim is not None:
        raise ValidationError(
            _('The SM kernel compares surface strings and takes no similarity function.'),
            code='config',
        )
