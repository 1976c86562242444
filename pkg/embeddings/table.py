"""
Pretrained word-vector tables
Text-format loader and a version-stamped binary cache
"""

import hashlib
import logging
import struct
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .validators import validate_expected_dim, validate_vector_dimension

logger = logging.getLogger(__name__)

OOV_STRING_MATCH = 'string-match-fallback'

CACHE_MAGIC = b'AGKEMB'
CACHE_VERSION = 1
# magic, version, dim, count, lowercase flag, hex digest
_CACHE_HEADER = struct.Struct('<6sHIQ?64s')


@dataclass(frozen=True)
class EmbeddingTable:
    """
    Immutable token -> vector map of a fixed dimension.

    Vectors with zero norm stay stored but are reported as missing by
    lookup(), so callers fall back to the OOV policy.
    """

    dim: int
    vectors: dict = field(repr=False)
    lowercase_lookup: bool = True
    oov_policy: str = OOV_STRING_MATCH
    digest: str = ''

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, token):
        return self.lookup(token) is not None

    def key(self, token):
        """Lookup key for a surface token."""
        return token.lower() if self.lowercase_lookup else token

    def lookup(self, token):
        """Vector for a token, or None when out of vocabulary or zero-norm."""
        vector = self.vectors.get(self.key(token))
        if vector is None or not np.any(vector):
            return None
        return vector


def _freeze(vector):
    vector.setflags(write=False)
    return vector


def _is_word2vec_header(parts):
    return len(parts) == 2 and all(part.isdigit() for part in parts)


def _numbered_parts(handle, hasher):
    for line_no, raw in enumerate(handle, start=1):
        hasher.update(raw)
        parts = raw.decode('utf-8').rstrip('\r\n').split()
        if parts:
            yield line_no, parts


def _without_word2vec_header(lines):
    """
    Drop a leading "<count> <dim>" line. It counts as a header only when the
    next line has dim components (or, for count 0, when nothing follows);
    otherwise it is a one-component vector.
    """
    first = next(lines, None)
    if first is None:
        return
    line_no, parts = first
    if line_no != 1 or not _is_word2vec_header(parts):
        yield first
        yield from lines
        return

    second = next(lines, None)
    if second is None:
        is_header = int(parts[0]) == 0
    else:
        is_header = len(second[1]) - 1 == int(parts[1])
    if not is_header:
        yield first
    if second is not None:
        yield second
    yield from lines


def load_embeddings(path, expected_dim=None, lowercase_lookup=None):
    """
    Load whitespace-separated text vectors (token then d floats per line).

    Args:
        path (str | Path): UTF-8 vector file; a leading "<count> <dim>"
            header line is skipped when the next line has dim components
        expected_dim (int): Required dimensionality, if known
        lowercase_lookup (bool): Lowercase tokens before lookup;
            defaults to ANYGRAM_LOWERCASE_LOOKUP

    Returns:
        EmbeddingTable: First occurrence wins for duplicate tokens
    """
    validate_expected_dim(expected_dim)
    if lowercase_lookup is None:
        lowercase_lookup = settings.ANYGRAM_LOWERCASE_LOOKUP

    vectors = {}
    dim = expected_dim
    duplicates = 0
    hasher = hashlib.sha256()

    with open(path, 'rb') as handle:
        for line_no, parts in _without_word2vec_header(_numbered_parts(handle, hasher)):
            token, values = parts[0], parts[1:]
            if dim is None:
                if not values:
                    raise ValidationError(
                        _('Line %(line)s: token %(token)r has no vector components.'),
                        code='dimension',
                        params={'line': line_no, 'token': token},
                    )
                dim = len(values)
            validate_vector_dimension(len(values), dim, line_no)

            try:
                vector = np.asarray(values, dtype=np.float64)
            except ValueError as e:
                raise ValidationError(
                    _('Line %(line)s: unparseable number in vector for %(token)r.'),
                    code='parse',
                    params={'line': line_no, 'token': token},
                ) from e
            if not np.all(np.isfinite(vector)):
                raise ValidationError(
                    _('Line %(line)s: vector for %(token)r has non-finite components.'),
                    code='parse',
                    params={'line': line_no, 'token': token},
                )

            # Stored under the lookup key so lowercased lookups find cased entries
            key = token.lower() if lowercase_lookup else token
            if key in vectors:
                duplicates += 1
                continue
            vectors[key] = _freeze(vector)

    if duplicates:
        logger.warning(f"{duplicates} duplicate tokens in {path}; kept first occurrences")
    logger.info(f"Loaded {len(vectors)} vectors of dimension {dim} from {path}")

    return EmbeddingTable(
        dim=dim or 0,
        vectors=vectors,
        lowercase_lookup=lowercase_lookup,
        digest=hasher.hexdigest(),
    )


# ============================================================================
# BINARY CACHE
# ============================================================================

def save_embedding_cache(table, path):
    """Write the table as header, token list and row-major float64 matrix."""
    tokens = list(table.vectors)
    matrix = np.vstack([table.vectors[t] for t in tokens]) if tokens else np.zeros((0, table.dim))
    with open(path, 'wb') as handle:
        handle.write(_CACHE_HEADER.pack(
            CACHE_MAGIC,
            CACHE_VERSION,
            table.dim,
            len(tokens),
            table.lowercase_lookup,
            table.digest.encode('ascii').ljust(64, b'\0'),
        ))
        for token in tokens:
            encoded = token.encode('utf-8')
            handle.write(struct.pack('<I', len(encoded)))
            handle.write(encoded)
        handle.write(matrix.astype('<f8').tobytes(order='C'))
    logger.info(f"Cached {len(tokens)} vectors to {path}")


def load_embedding_cache(path):
    """Read a table written by save_embedding_cache."""
    with open(path, 'rb') as handle:
        data = handle.read()

    if len(data) < _CACHE_HEADER.size:
        raise ValidationError(_('Embedding cache %(path)s is truncated.'), code='parse',
                              params={'path': str(path)})
    magic, version, dim, count, lowercase, digest = _CACHE_HEADER.unpack_from(data, 0)
    if magic != CACHE_MAGIC:
        raise ValidationError(_('%(path)s is not an embedding cache.'), code='parse',
                              params={'path': str(path)})
    if version != CACHE_VERSION:
        raise ValidationError(
            _('Embedding cache version %(found)s is not supported (expected %(expected)s).'),
            code='parse',
            params={'found': version, 'expected': CACHE_VERSION},
        )

    offset = _CACHE_HEADER.size
    tokens = []
    for _index in range(count):
        (length,) = struct.unpack_from('<I', data, offset)
        offset += 4
        tokens.append(data[offset:offset + length].decode('utf-8'))
        offset += length

    matrix = np.frombuffer(data, dtype='<f8', count=count * dim, offset=offset)
    matrix = matrix.reshape(count, dim).astype(np.float64)
    vectors = {token: _freeze(matrix[i].copy()) for i, token in enumerate(tokens)}

    return EmbeddingTable(
        dim=dim,
        vectors=vectors,
        lowercase_lookup=bool(lowercase),
        digest=digest.rstrip(b'\0').decode('ascii'),
    )
