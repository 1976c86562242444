"""
Kernel configuration and fingerprints
"""

import hashlib
import json
from dataclasses import asdict, dataclass
from enum import Enum

from django.conf import settings

from corpus.validators import validate_suffix

from .validators import (
    validate_decay_factor,
    validate_similarity_threshold,
    validate_variant_options,
)


class Variant(str, Enum):
    SM = 'sm'
    WEST = 'west'
    WESS = 'wess'


class AspectMode(str, Enum):
    NONE = 'none'
    SUFFIX = 'suffix'
    FLAG = 'flag'


@dataclass(frozen=True)
class KernelConfig:
    """
    Resolved kernel settings.

    Attributes:
        variant: SM, WEST or WESS
        decay: decay factor lambda in (0, 1]
        theta: similarity threshold, WEST only
        normalize: report K(a,b) / sqrt(K(a,a) K(b,b))
        aspect_mode: none, suffix (SM) or flag (WEST/WESS)
        suffix: token suffix used by aspect_mode=suffix
    """

    variant: Variant = Variant.SM
    decay: float | None = None
    theta: float | None = None
    normalize: bool = False
    aspect_mode: AspectMode = AspectMode.NONE
    suffix: str | None = None

    def __post_init__(self):
        object.__setattr__(self, 'variant', Variant(self.variant))
        object.__setattr__(self, 'aspect_mode', AspectMode(self.aspect_mode))
        if self.decay is None:
            object.__setattr__(self, 'decay', settings.ANYGRAM_DEFAULT_LAMBDA)
        if self.suffix is None:
            object.__setattr__(self, 'suffix', settings.ANYGRAM_DEFAULT_SUFFIX)
        object.__setattr__(self, 'decay', float(self.decay))
        if self.theta is not None:
            object.__setattr__(self, 'theta', float(self.theta))

        validate_decay_factor(self.decay)
        if self.theta is not None:
            validate_similarity_threshold(self.theta)
        validate_suffix(self.suffix)
        validate_variant_options(self.variant.value, self.theta, self.aspect_mode.value)

    @property
    def uses_embeddings(self):
        return self.variant is not Variant.SM

    def as_dict(self):
        data = asdict(self)
        data['variant'] = self.variant.value
        data['aspect_mode'] = self.aspect_mode.value
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def fingerprint(self, embedding_digest=''):
        """
        Stable digest of everything that changes kernel values.

        Gram matrices and models carry it so that matrices built under
        different settings are never mixed.
        """
        payload = self.as_dict()
        payload['embeddings'] = embedding_digest if self.uses_embeddings else ''
        canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()
