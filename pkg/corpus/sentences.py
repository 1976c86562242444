"""
Tokenized sentence corpora
Loading, serialization and aspect-term marking for kernel inputs
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .validators import (
    validate_aspect_indices,
    validate_label,
    validate_sentence_id,
    validate_suffix,
    validate_tokens,
    validate_tsv_token,
)

logger = logging.getLogger(__name__)

FORMATS = ('jsonl', 'tsv')
TSV_COLUMNS = ['id', 'tokens', 'label', 'aspect']


@dataclass(frozen=True)
class Sentence:
    """
    One classification instance: a pre-tokenized sentence, its optional
    label and the positions of its aspect-term tokens.
    """

    id: str
    tokens: tuple
    label: str | None = None
    aspect_indices: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'tokens', tuple(self.tokens))
        object.__setattr__(self, 'aspect_indices', frozenset(self.aspect_indices))
        validate_sentence_id(self.id)
        validate_tokens(self.tokens)
        validate_label(self.label)
        validate_aspect_indices(self.aspect_indices, len(self.tokens))

    def __len__(self):
        return len(self.tokens)

    def items(self):
        """(token, is_aspect) pairs in sentence order."""
        return tuple(
            (token, position in self.aspect_indices)
            for position, token in enumerate(self.tokens)
        )


@dataclass(frozen=True)
class Corpus:
    """Sentences in file order; ids are unique."""

    sentences: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'sentences', tuple(self.sentences))
        seen = set()
        for sentence in self.sentences:
            if sentence.id in seen:
                raise ValidationError(
                    _('Duplicate sentence id %(id)r.'),
                    code='duplicate_id',
                    params={'id': sentence.id},
                )
            seen.add(sentence.id)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, index):
        return self.sentences[index]

    @property
    def ids(self):
        return [s.id for s in self.sentences]

    @property
    def labels(self):
        return [s.label for s in self.sentences]

    @property
    def label_set(self):
        """Distinct labels present, in first-seen order."""
        return tuple(dict.fromkeys(s.label for s in self.sentences if s.label is not None))

    @property
    def is_labeled(self):
        return all(s.label is not None for s in self.sentences)

    def map(self, func):
        """New corpus with func applied to every sentence."""
        return Corpus(tuple(func(s) for s in self.sentences))


# ============================================================================
# ASPECT TERMS
# ============================================================================

def mark_aspect_suffix(sentence, suffix=None):
    """
    Append a suffix to every aspect-term token.

    Args:
        sentence (Sentence): Sentence to rewrite
        suffix (str): Suffix to attach; defaults to ANYGRAM_DEFAULT_SUFFIX

    Returns:
        Sentence: Copy with rewritten tokens; aspect positions are preserved
    """
    suffix = settings.ANYGRAM_DEFAULT_SUFFIX if suffix is None else suffix
    validate_suffix(suffix)
    tokens = tuple(
        token + suffix if position in sentence.aspect_indices else token
        for position, token in enumerate(sentence.tokens)
    )
    return replace(sentence, tokens=tokens)


def expand_aspect_instances(sentence, aspect_terms):
    """
    One instance per aspect term of a sentence.

    Args:
        sentence (Sentence): Source sentence; its aspect_indices are ignored
        aspect_terms (list): (positions, label) per aspect term

    Returns:
        list: Sentences with ids "<id>#<k>", k counted from 1
    """
    return [
        replace(
            sentence,
            id=f'{sentence.id}#{k}',
            label=label,
            aspect_indices=frozenset(positions),
        )
        for k, (positions, label) in enumerate(aspect_terms, start=1)
    ]


# ============================================================================
# LOADING
# ============================================================================

def infer_format(path):
    suffix = Path(path).suffix.lower().lstrip('.')
    if suffix in FORMATS:
        return suffix
    raise ValidationError(
        _('Cannot infer corpus format from %(path)s; use one of %(formats)s.'),
        code='config',
        params={'path': str(path), 'formats': ', '.join(FORMATS)},
    )


def load_corpus(path, format=None):
    """
    Load a tokenized, optionally labeled corpus.

    Args:
        path (str | Path): JSONL or TSV file
        format (str): 'jsonl' or 'tsv'; inferred from the suffix when None

    Returns:
        Corpus: Sentences in file order
    """
    format = format or infer_format(path)
    if format not in FORMATS:
        raise ValidationError(
            _('Unknown corpus format %(format)r.'),
            code='config',
            params={'format': format},
        )

    sentences = _read_jsonl(path) if format == 'jsonl' else _read_tsv(path)
    corpus = _build_corpus(sentences)
    logger.info(
        f"Loaded {len(corpus)} sentences from {path} "
        f"({len(corpus.label_set)} labels)"
    )
    return corpus


def _build_corpus(numbered_sentences):
    seen = {}
    for line, sentence in numbered_sentences:
        if sentence.id in seen:
            raise ValidationError(
                _('Line %(line)s: duplicate id %(id)r (first seen on line %(first)s).'),
                code='duplicate_id',
                params={'line': line, 'id': sentence.id, 'first': seen[sentence.id]},
            )
        seen[sentence.id] = line
    return Corpus(tuple(sentence for _line, sentence in numbered_sentences))


def _make_sentence(line, sentence_id, tokens, label, aspect):
    validate_sentence_id(sentence_id, line)
    validate_tokens(tokens, line)
    validate_label(label, line)
    validate_aspect_indices(aspect, len(tokens), line)
    return Sentence(
        id=sentence_id,
        tokens=tuple(tokens),
        label=label,
        aspect_indices=frozenset(aspect),
    )


def _read_jsonl(path):
    numbered = []
    with open(path, 'r', encoding='utf-8') as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ValidationError(
                    _('Line %(line)s: invalid JSON (%(error)s).'),
                    code='parse',
                    params={'line': line_no, 'error': e.msg},
                ) from e
            if not isinstance(record, dict):
                raise ValidationError(
                    _('Line %(line)s: expected a JSON object.'),
                    code='parse',
                    params={'line': line_no},
                )
            aspect = record.get('aspect')
            aspect = [] if aspect is None else aspect
            if not isinstance(aspect, list):
                raise ValidationError(
                    _('Line %(line)s: "aspect" must be a list of integers.'),
                    code='parse',
                    params={'line': line_no},
                )
            numbered.append((
                line_no,
                _make_sentence(
                    line_no,
                    record.get('id'),
                    record.get('tokens'),
                    record.get('label'),
                    aspect,
                ),
            ))
    return numbered


def _read_tsv(path):
    numbered = []
    with open(path, 'r', encoding='utf-8', newline='') as handle:
        for line_no, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            fields = raw.rstrip('\r\n').split('\t')
            if len(fields) > len(TSV_COLUMNS):
                raise ValidationError(
                    _('Line %(line)s: malformed TSV row '
                      '(expected at most %(limit)s fields, saw %(count)s).'),
                    code='parse',
                    params={'line': line_no, 'limit': len(TSV_COLUMNS), 'count': len(fields)},
                )
            sentence_id, token_field, label, aspect_field = fields + [''] * (len(TSV_COLUMNS) - len(fields))

            tokens = token_field.split(' ') if token_field else []
            try:
                aspect = [int(part) for part in aspect_field.split(',')] if aspect_field else []
            except ValueError as e:
                raise ValidationError(
                    _('Line %(line)s: aspect indices must be comma-separated integers. Got: %(value)r'),
                    code='parse',
                    params={'line': line_no, 'value': aspect_field},
                ) from e
            numbered.append((line_no, _make_sentence(line_no, sentence_id, tokens, label or None, aspect)))
    return numbered


# ============================================================================
# SERIALIZATION
# ============================================================================

def dump_corpus(corpus, path, format=None):
    """Write a corpus so that load_corpus reads it back unchanged."""
    format = format or infer_format(path)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        for line_no, sentence in enumerate(corpus, start=1):
            if format == 'jsonl':
                record = {'id': sentence.id, 'tokens': list(sentence.tokens)}
                if sentence.label is not None:
                    record['label'] = sentence.label
                if sentence.aspect_indices:
                    record['aspect'] = sorted(sentence.aspect_indices)
                handle.write(json.dumps(record, ensure_ascii=False) + '\n')
            else:
                for token in sentence.tokens:
                    validate_tsv_token(token, line_no)
                fields = [
                    sentence.id,
                    ' '.join(sentence.tokens),
                    sentence.label or '',
                    ','.join(str(i) for i in sorted(sentence.aspect_indices)),
                ]
                handle.write('\t'.join(fields) + '\n')
    logger.info(f"Wrote {len(corpus)} sentences to {path}")
