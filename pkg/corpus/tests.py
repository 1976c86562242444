"""
Unit Tests for corpus loading, serialization and aspect marking
"""
import json
import tempfile
from pathlib import Path

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from corpus.sentences import (
    Corpus,
    Sentence,
    dump_corpus,
    expand_aspect_instances,
    infer_format,
    load_corpus,
    mark_aspect_suffix,
)

GOOD_FAST_SERVICE = ['Good', ',', 'fast', 'service', '.']


class CorpusFileMixin:
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.tmp = Path(self._tmp.name)

    def write(self, name, text):
        path = self.tmp / name
        path.write_text(text, encoding='utf-8')
        return path

    def write_jsonl(self, name, records):
        return self.write(name, ''.join(json.dumps(r) + '\n' for r in records))


class SentenceTestCase(SimpleTestCase):
    """Test cases for the Sentence type"""

    def test_tokens_and_aspects_are_frozen(self):
        """Test that tokens become a tuple and aspect indices a frozenset"""
        sentence = Sentence(id='1', tokens=['a', 'b'], aspect_indices=[1])

        self.assertEqual(sentence.tokens, ('a', 'b'))
        self.assertEqual(sentence.aspect_indices, frozenset({1}))
        self.assertEqual(len(sentence), 2)

    def test_items_mark_aspect_positions(self):
        """Test (token, is_aspect) pairs"""
        sentence = Sentence(id='1', tokens=GOOD_FAST_SERVICE, aspect_indices={3})

        self.assertEqual(sentence.items()[3], ('service', True))
        self.assertEqual(sentence.items()[0], ('Good', False))

    def test_empty_tokens_rejected(self):
        """Test that a sentence needs at least one token"""
        with self.assertRaises(ValidationError):
            Sentence(id='1', tokens=[])

    def test_empty_token_rejected(self):
        """Test that every token must be non-empty"""
        with self.assertRaises(ValidationError):
            Sentence(id='1', tokens=['a', ''])

    def test_aspect_index_out_of_range(self):
        """Test aspect positions beyond the sentence"""
        with self.assertRaises(ValidationError) as cm:
            Sentence(id='1', tokens=['a', 'b'], aspect_indices={2})
        self.assertEqual(cm.exception.code, 'aspect_range')

    def test_duplicate_ids_rejected_by_corpus(self):
        """Test that ids are unique within a corpus"""
        with self.assertRaises(ValidationError) as cm:
            Corpus((Sentence(id='x', tokens=['a']), Sentence(id='x', tokens=['b'])))
        self.assertEqual(cm.exception.code, 'duplicate_id')


class LoadCorpusTestCase(CorpusFileMixin, SimpleTestCase):
    """Test cases for load_corpus"""

    def test_jsonl_example_sentence(self):
        """Test the single-sentence JSONL example"""
        path = self.write_jsonl('one.jsonl', [{
            'id': '1', 'tokens': GOOD_FAST_SERVICE, 'label': 'positive', 'aspect': [3],
        }])

        corpus = load_corpus(path)

        self.assertEqual(len(corpus), 1)
        self.assertEqual(corpus[0].aspect_indices, frozenset({3}))
        self.assertEqual(corpus[0].label, 'positive')
        self.assertEqual(corpus.label_set, ('positive',))

    def test_empty_file(self):
        """Test that an empty file gives an empty corpus"""
        for name in ('empty.jsonl', 'empty.tsv'):
            corpus = load_corpus(self.write(name, ''))
            self.assertEqual(len(corpus), 0)
            self.assertEqual(corpus.label_set, ())

    def test_aspect_out_of_range_reports_line(self):
        """Test the error for "aspect":[9] on a five-token sentence"""
        path = self.write_jsonl('bad.jsonl', [
            {'id': '1', 'tokens': ['a']},
            {'id': '2', 'tokens': GOOD_FAST_SERVICE, 'aspect': [9]},
        ])

        with self.assertRaises(ValidationError) as cm:
            load_corpus(path)

        self.assertEqual(cm.exception.code, 'aspect_range')
        self.assertEqual(cm.exception.params['line'], 2)
        self.assertIn('Line 2', cm.exception.messages[0])

    def test_invalid_json_reports_line(self):
        """Test that malformed JSON is reported with its line number"""
        path = self.write('bad.jsonl', '{"id": "1", "tokens": ["a"]}\n{not json\n')

        with self.assertRaises(ValidationError) as cm:
            load_corpus(path)

        self.assertEqual(cm.exception.code, 'parse')
        self.assertEqual(cm.exception.params['line'], 2)

    def test_duplicate_id_reports_both_lines(self):
        """Test duplicate ids across lines"""
        path = self.write_jsonl('dup.jsonl', [
            {'id': 'a', 'tokens': ['x']},
            {'id': 'b', 'tokens': ['y']},
            {'id': 'a', 'tokens': ['z']},
        ])

        with self.assertRaises(ValidationError) as cm:
            load_corpus(path)

        self.assertEqual(cm.exception.code, 'duplicate_id')
        self.assertEqual(cm.exception.params['line'], 3)
        self.assertEqual(cm.exception.params['first'], 1)

    def test_blank_lines_skipped_but_counted(self):
        """Test that blank lines do not shift reported line numbers"""
        path = self.write('gap.jsonl', '{"id": "1", "tokens": ["a"]}\n\n{"id": "2", "tokens": []}\n')

        with self.assertRaises(ValidationError) as cm:
            load_corpus(path)

        self.assertEqual(cm.exception.params['line'], 3)

    def test_tsv_columns(self):
        """Test the TSV layout with optional label and aspect columns"""
        path = self.write('c.tsv', '1\tGood , fast service .\tpositive\t0,3\n2\tslow\n')

        corpus = load_corpus(path)

        self.assertEqual(corpus[0].tokens, tuple(GOOD_FAST_SERVICE))
        self.assertEqual(corpus[0].aspect_indices, frozenset({0, 3}))
        self.assertIsNone(corpus[1].label)
        self.assertEqual(corpus[1].aspect_indices, frozenset())
        self.assertFalse(corpus.is_labeled)

    def test_tsv_bad_aspect_field(self):
        """Test non-integer aspect indices in TSV"""
        path = self.write('c.tsv', '1\ta b\tpos\tx\n')

        with self.assertRaises(ValidationError) as cm:
            load_corpus(path)

        self.assertEqual(cm.exception.params['line'], 1)

    def test_tsv_extra_field_on_first_row(self):
        """Test a five-field first row"""
        path = self.write('c.tsv', '1\tgood food\tpositive\t0\textra\n2\tslow\tnegative\n')

        with self.assertRaises(ValidationError) as cm:
            load_corpus(path)

        self.assertEqual(cm.exception.code, 'parse')
        self.assertEqual(cm.exception.params['line'], 1)
        self.assertIn('Line 1', cm.exception.messages[0])

    def test_tsv_extra_field_on_later_row(self):
        """Test a five-field row after valid rows"""
        path = self.write('c.tsv', '1\tslow\n2\tgood food\tpositive\t0\textra\n')

        with self.assertRaises(ValidationError) as cm:
            load_corpus(path)

        self.assertEqual(cm.exception.params['line'], 2)

    def test_label_set_in_first_seen_order(self):
        """Test that label_set follows the file, not the alphabet"""
        path = self.write('c.tsv', '1\ta\tpositive\n2\tb\tnegative\n3\tc\tpositive\n4\td\tneutral\n')

        self.assertEqual(load_corpus(path).label_set, ('positive', 'negative', 'neutral'))

    def test_file_order_preserved(self):
        """Test that iteration follows file order"""
        path = self.write_jsonl('order.jsonl', [
            {'id': k, 'tokens': ['t']} for k in ('z', 'a', 'm')
        ])

        self.assertEqual(load_corpus(path).ids, ['z', 'a', 'm'])

    def test_unknown_suffix(self):
        """Test that the format must be inferable"""
        with self.assertRaises(ValidationError):
            infer_format('corpus.xml')


class RoundTripTestCase(CorpusFileMixin, SimpleTestCase):
    """Test cases for dump_corpus followed by load_corpus"""

    def setUp(self):
        super().setUp()
        self.corpus = Corpus((
            Sentence(id='1', tokens=GOOD_FAST_SERVICE, label='positive', aspect_indices={3}),
            Sentence(id='2', tokens=['meh'], label=None),
            Sentence(id='3', tokens=['Bad', 'food', 'and', 'bad', 'staff'], label='negative',
                     aspect_indices={1, 4}),
        ))

    def test_jsonl_round_trip(self):
        """Test load(dump(corpus)) == corpus for JSONL"""
        path = self.tmp / 'out.jsonl'
        dump_corpus(self.corpus, path)
        self.assertEqual(load_corpus(path), self.corpus)

    def test_tsv_round_trip(self):
        """Test load(dump(corpus)) == corpus for TSV"""
        path = self.tmp / 'out.tsv'
        dump_corpus(self.corpus, path)
        self.assertEqual(load_corpus(path), self.corpus)

    def test_tsv_rejects_tokens_with_spaces(self):
        """Test that TSV cannot hold tokens containing spaces"""
        corpus = Corpus((Sentence(id='1', tokens=['New York']),))
        with self.assertRaises(ValidationError):
            dump_corpus(corpus, self.tmp / 'out.tsv')

    @settings(max_examples=40, deadline=None)
    @given(st.lists(
        st.tuples(
            st.lists(st.text(alphabet='abcXYZ_.,!', min_size=1, max_size=4), min_size=1, max_size=6),
            st.one_of(st.none(), st.sampled_from(['pos', 'neg', 'neu'])),
        ),
        max_size=8,
    ))
    def test_round_trip_property(self, records):
        """Test the round trip on generated corpora in both formats"""
        corpus = Corpus(tuple(
            Sentence(id=f's{k}', tokens=tokens, label=label, aspect_indices={len(tokens) - 1})
            for k, (tokens, label) in enumerate(records)
        ))
        for name in ('gen.jsonl', 'gen.tsv'):
            path = self.tmp / name
            dump_corpus(corpus, path)
            self.assertEqual(load_corpus(path), corpus)


class AspectMarkingTestCase(SimpleTestCase):
    """Test cases for mark_aspect_suffix and expand_aspect_instances"""

    def test_suffix_on_aspect_token(self):
        """Test "Good , fast service_AT ." """
        sentence = Sentence(id='1', tokens=GOOD_FAST_SERVICE, aspect_indices={3})

        marked = mark_aspect_suffix(sentence, '_AT')

        self.assertEqual(marked.tokens, ('Good', ',', 'fast', 'service_AT', '.'))
        self.assertEqual(marked.aspect_indices, frozenset({3}))

    def test_no_aspects_is_identity(self):
        """Test that no aspect indices leaves tokens unchanged"""
        sentence = Sentence(id='1', tokens=GOOD_FAST_SERVICE)
        self.assertEqual(mark_aspect_suffix(sentence, '_AT'), sentence)

    def test_two_aspects(self):
        """Test aspect={0,3}"""
        sentence = Sentence(id='1', tokens=GOOD_FAST_SERVICE, aspect_indices={0, 3})

        marked = mark_aspect_suffix(sentence, '_AT')

        self.assertEqual(marked.tokens, ('Good_AT', ',', 'fast', 'service_AT', '.'))

    def test_default_suffix_from_settings(self):
        """Test the configured default suffix"""
        sentence = Sentence(id='1', tokens=['pizza'], aspect_indices={0})
        self.assertEqual(mark_aspect_suffix(sentence).tokens, ('pizza_AT',))

    def test_length_preserved(self):
        """Test that marking never changes the token count"""
        sentence = Sentence(id='1', tokens=GOOD_FAST_SERVICE, aspect_indices={1, 2, 4})
        self.assertEqual(len(mark_aspect_suffix(sentence, '_X')), len(sentence))

    def test_empty_suffix_rejected(self):
        """Test that the suffix must be non-empty"""
        with self.assertRaises(ValidationError):
            mark_aspect_suffix(Sentence(id='1', tokens=['a']), '')

    def test_expand_instances(self):
        """Test one instance per aspect term"""
        sentence = Sentence(id='r7', tokens=['Great', 'food', 'but', 'rude', 'staff'])

        instances = expand_aspect_instances(sentence, [({1}, 'positive'), ({4}, 'negative')])

        self.assertEqual([s.id for s in instances], ['r7#1', 'r7#2'])
        self.assertEqual(instances[0].aspect_indices, frozenset({1}))
        self.assertEqual(instances[1].label, 'negative')
        self.assertEqual(instances[1].tokens, sentence.tokens)
