"""
Gram matrix files
Precomputed-kernel text for SVM tools, CSV, and an internal binary format
"""

import json
import logging
import string
import struct
from pathlib import Path
from urllib.parse import quote, unquote

import numpy as np
import pandas as pd
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .gram import GramMatrix

logger = logging.getLogger(__name__)

FORMATS = ('bin', 'csv', 'precomp')
SIGNIFICANT_DIGITS = 12

BINARY_MAGIC = b'AGKGRAM\0'
BINARY_VERSION = 1
# magic, version, rows, cols, indefinite (-1 unknown, 0 no, 1 yes)
_BINARY_HEADER = struct.Struct('<8sHQQb')

_SUFFIXES = {
    '.bin': 'bin',
    '.csv': 'csv',
    '.precomp': 'precomp',
    '.txt': 'precomp',
    '.svm': 'precomp',
}


def infer_gram_format(path):
    return _SUFFIXES.get(Path(path).suffix.lower(), 'bin')


def _number(value):
    return f'{value:.{SIGNIFICANT_DIGITS}g}'


# Label field of the precomputed-kernel text: unlabeled rows are written as
# "0", so a real "0" label and any whitespace or "%" are percent-encoded.
UNLABELED_FIELD = '0'
_LABEL_SAFE = string.punctuation.replace('%', '')


def encode_label(label):
    if not label:
        return UNLABELED_FIELD
    if label == UNLABELED_FIELD:
        return '%30'
    return quote(label, safe=_LABEL_SAFE)


def decode_label(field):
    return '' if field == UNLABELED_FIELD else unquote(field)


# ============================================================================
# WRITERS
# ============================================================================

def write_gram(gram, path, format=None):
    """
    Write a Gram matrix.

    Args:
        gram (GramMatrix): Matrix to write
        path (str | Path): Destination
        format (str): 'bin', 'csv' or 'precomp'; inferred from the suffix
    """
    format = format or infer_gram_format(path)
    if format == 'bin':
        _write_binary(gram, path)
    elif format == 'csv':
        _write_csv(gram, path)
    elif format == 'precomp':
        _write_precomputed(gram, path)
    else:
        raise ValidationError(_('Unknown Gram format %(format)r.'), code='config',
                              params={'format': format})
    logger.info(f"Wrote {gram.shape[0]}x{gram.shape[1]} Gram ({format}) to {path}")


def _write_precomputed(gram, path):
    # <label> 0:<serial> 1:<K(row, col1)> ... N:<K(row, colN)>
    labels = gram.row_labels or ('',) * gram.shape[0]
    with open(path, 'w', encoding='utf-8') as out:
        for serial, (label, row) in enumerate(zip(labels, gram.values), start=1):
            parts = [encode_label(label), f'0:{serial}']
            parts.extend(f'{k}:{_number(v)}' for k, v in enumerate(row, start=1))
            out.write(' '.join(parts) + '\n')


def _write_csv(gram, path):
    frame = pd.DataFrame(gram.values, index=list(gram.row_ids), columns=list(gram.col_ids))
    frame.index.name = 'id'
    frame.to_csv(path, float_format=f'%.{SIGNIFICANT_DIGITS}g')


def _write_binary(gram, path):
    metadata = {
        'row_ids': list(gram.row_ids),
        'col_ids': list(gram.col_ids),
        'row_labels': list(gram.row_labels),
        'fingerprint': gram.fingerprint,
        'manifest': gram.manifest,
    }
    encoded = json.dumps(metadata, ensure_ascii=False, separators=(',', ':')).encode('utf-8')
    indefinite = -1 if gram.indefinite is None else int(gram.indefinite)

    with open(path, 'wb') as out:
        out.write(_BINARY_HEADER.pack(
            BINARY_MAGIC, BINARY_VERSION, gram.shape[0], gram.shape[1], indefinite
        ))
        out.write(np.ascontiguousarray(gram.values, dtype='<f8').tobytes(order='C'))
        out.write(struct.pack('<I', len(encoded)))
        out.write(encoded)


# ============================================================================
# READERS
# ============================================================================

def read_gram(path, format=None, row_ids=None, col_ids=None):
    """
    Read a Gram matrix.

    The precomputed-text format stores no ids; row_ids and col_ids name
    them, otherwise 1-based serials are used.
    """
    format = format or infer_gram_format(path)
    if format == 'bin':
        return _read_binary(path)
    if format == 'csv':
        return _read_csv(path)
    if format == 'precomp':
        return _read_precomputed(path, row_ids, col_ids)
    raise ValidationError(_('Unknown Gram format %(format)r.'), code='config',
                          params={'format': format})


def _read_precomputed(path, row_ids=None, col_ids=None):
    labels = []
    rows = []
    with open(path, 'r', encoding='utf-8') as handle:
        for line_no, raw in enumerate(handle, start=1):
            parts = raw.split()
            if not parts:
                continue
            labels.append(parts[0])
            values = {}
            try:
                for token in parts[1:]:
                    index, value = token.split(':', 1)
                    values[int(index)] = float(value)
            except ValueError as e:
                raise ValidationError(
                    _('Line %(line)s: malformed precomputed-kernel entry.'),
                    code='parse',
                    params={'line': line_no},
                ) from e
            values.pop(0, None)
            rows.append([values[k] for k in sorted(values)])

    width = len(rows[0]) if rows else len(col_ids or ())
    if any(len(row) != width for row in rows):
        raise ValidationError(_('Precomputed-kernel rows have different lengths.'), code='parse')

    row_ids = row_ids or [str(i) for i in range(1, len(rows) + 1)]
    col_ids = col_ids or [str(j) for j in range(1, width + 1)]
    return GramMatrix(
        values=np.array(rows, dtype=np.float64).reshape(len(rows), width),
        row_ids=row_ids,
        col_ids=col_ids,
        row_labels=tuple(decode_label(label) for label in labels),
    )


def _read_csv(path):
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    row_ids = frame.iloc[:, 0].tolist()
    col_ids = [str(column) for column in frame.columns[1:]]
    try:
        values = frame.iloc[:, 1:].astype(np.float64).to_numpy()
    except ValueError as e:
        raise ValidationError(_('CSV Gram %(path)s has non-numeric cells.'), code='parse',
                              params={'path': str(path)}) from e
    return GramMatrix(values=values, row_ids=row_ids, col_ids=col_ids)


def _read_binary(path):
    with open(path, 'rb') as handle:
        data = handle.read()

    if len(data) < _BINARY_HEADER.size:
        raise ValidationError(_('Gram file %(path)s is truncated.'), code='parse',
                              params={'path': str(path)})
    magic, version, n_rows, n_cols, indefinite = _BINARY_HEADER.unpack_from(data, 0)
    if magic != BINARY_MAGIC:
        raise ValidationError(_('%(path)s is not a binary Gram file.'), code='parse',
                              params={'path': str(path)})
    if version != BINARY_VERSION:
        raise ValidationError(
            _('Gram file version %(found)s is not supported (expected %(expected)s).'),
            code='parse',
            params={'found': version, 'expected': BINARY_VERSION},
        )

    offset = _BINARY_HEADER.size
    count = n_rows * n_cols
    values = np.frombuffer(data, dtype='<f8', count=count, offset=offset)
    offset += count * 8
    (length,) = struct.unpack_from('<I', data, offset)
    offset += 4
    metadata = json.loads(data[offset:offset + length].decode('utf-8'))

    return GramMatrix(
        values=values.astype(np.float64).reshape(n_rows, n_cols),
        row_ids=metadata['row_ids'],
        col_ids=metadata['col_ids'],
        fingerprint=metadata['fingerprint'],
        row_labels=metadata['row_labels'],
        indefinite=None if indefinite < 0 else bool(indefinite),
        manifest=metadata.get('manifest', ''),
    )
