"""
Unit Tests for the any-gram kernel algorithms and kernel configuration
"""
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from hypothesis import example, given, settings, strategies as st

from embeddings.similarity import CosineSimilarity
from kernels.anygram_algorithm import compute_kernel, kernel_sm, kernel_wess, kernel_west
from kernels.config import AspectMode, KernelConfig, Variant
from oracle.generators import random_embedding_table, random_sentence_pairs

tokens = st.lists(st.sampled_from('abcde'), min_size=1, max_size=10)


def constant_sim(value):
    return lambda a, b: value


def indicator_sim(a, b):
    return 1.0 if a[0] == b[0] else 0.0


class KernelSmTestCase(SimpleTestCase):
    """Test cases for the string-match kernel"""

    def test_single_match(self):
        """Test ["good"] vs ["good"]"""
        self.assertEqual(kernel_sm(['good'], ['good'], 0.5), 0.5)

    def test_shared_bigram(self):
        """Test ["a","b","c"] vs ["a","b","d"]"""
        self.assertEqual(kernel_sm(['a', 'b', 'c'], ['a', 'b', 'd'], 0.5), 1.25)

    def test_no_match(self):
        """Test ["x"] vs ["y"]"""
        self.assertEqual(kernel_sm(['x'], ['y'], 0.5), 0.0)

    def test_repeated_token(self):
        """Test ["a","a"] vs ["a"]"""
        self.assertEqual(kernel_sm(['a', 'a'], ['a'], 0.5), 1.0)

    def test_self_kernel_of_three_tokens(self):
        """Test 3 unigram, 2 bigram and 1 trigram self-pairs"""
        decay = 0.3
        value = kernel_sm(['a', 'b', 'c'], ['a', 'b', 'c'], decay)
        self.assertAlmostEqual(value, 3 * decay + 2 * decay ** 2 + decay ** 3, places=15)

    def test_empty_sentence(self):
        """Test that an empty sequence has kernel 0"""
        self.assertEqual(kernel_sm([], ['a'], 0.5), 0.0)

    @settings(max_examples=100, deadline=None)
    @given(tokens, tokens)
    @example(['a', 'a', 'b'], ['a', 'b', 'a'])
    def test_symmetry(self, s1, s2):
        """Test K(s1, s2) == K(s2, s1)"""
        self.assertAlmostEqual(kernel_sm(s1, s2, 0.5), kernel_sm(s2, s1, 0.5), delta=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(tokens, tokens)
    def test_unit_decay_counts_matches(self, s1, s2):
        """Test that lambda = 1 gives an integer count of matching n-gram pairs"""
        value = kernel_sm(s1, s2, 1.0)
        self.assertGreaterEqual(value, 0.0)
        self.assertAlmostEqual(value, round(value), delta=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(tokens, tokens, st.sampled_from('abcdef'))
    def test_monotone_growth(self, s1, s2, token):
        """Test that appending the same token to both never decreases the kernel"""
        before = kernel_sm(s1, s2, 0.5)
        after = kernel_sm(s1 + [token], s2 + [token], 0.5)
        self.assertGreaterEqual(after, before)


class KernelWestTestCase(SimpleTestCase):
    """Test cases for the similarity-threshold kernel"""

    def test_above_threshold(self):
        """Test sim 0.9 against theta 0.8"""
        self.assertEqual(kernel_west(['u'], ['v'], 0.5, 0.8, constant_sim(0.9)), 0.5)

    def test_below_threshold(self):
        """Test sim 0.9 against theta 0.95"""
        self.assertEqual(kernel_west(['u'], ['v'], 0.5, 0.95, constant_sim(0.9)), 0.0)

    def test_threshold_is_inclusive(self):
        """Test that sim == theta counts as a match"""
        self.assertEqual(kernel_west(['u'], ['v'], 0.5, 0.7, constant_sim(0.7)), 0.5)

    def test_strict_threshold_reduces_to_string_match(self):
        """Test theta above every cross-token cosine on random pairs"""
        sim = CosineSimilarity(random_embedding_table(seed=3))
        for s1, s2 in random_sentence_pairs(60, seed=11):
            self.assertEqual(
                kernel_west(s1, s2, 0.5, 1.0, sim),
                kernel_sm(s1, s2, 0.5),
            )

    def test_all_match_threshold(self):
        """Test theta = -1, where every token pair matches"""
        sim = CosineSimilarity(random_embedding_table(seed=5))
        value = kernel_west(['a', 'b'], ['c', 'd'], 0.5, -1.0, sim)
        # 4 unigram pairs and 1 bigram pair
        self.assertEqual(value, 4 * 0.5 + 0.25)


class KernelWessTestCase(SimpleTestCase):
    """Test cases for the similarity-score kernel"""

    def test_single_cell(self):
        """Test sim 0.6 with lambda 0.5"""
        self.assertAlmostEqual(kernel_wess(['u'], ['v'], 0.5, constant_sim(0.6)), 0.3, places=15)

    def test_all_similar(self):
        """Test a 2x2 pair with every similarity 1"""
        self.assertEqual(kernel_wess(['a', 'b'], ['c', 'd'], 0.5, constant_sim(1.0)), 2.25)

    def test_all_dissimilar(self):
        """Test a pair with every similarity 0"""
        self.assertEqual(kernel_wess(['a', 'b'], ['c', 'd'], 0.5, constant_sim(0.0)), 0.0)

    def test_indicator_equals_string_match_on_aligned_pairs(self):
        """
        Test that an exact-match indicator reproduces the string-match kernel
        when every match lies on an unbroken diagonal
        """
        permutation = ['we', 'loved', 'the', 'crispy', 'crust', 'here']
        for a in range(1, len(permutation) + 1):
            for b in range(1, len(permutation) + 1):
                s1, s2 = permutation[:a], permutation[:b]
                self.assertEqual(
                    kernel_wess(s1, s2, 0.5, indicator_sim),
                    kernel_sm(s1, s2, 0.5),
                )

    @settings(max_examples=100, deadline=None)
    @given(tokens, tokens, st.sampled_from([0.3, 0.5, 1.0]))
    def test_indicator_bounds_string_match(self, s1, s2, decay):
        """Test that the indicator score never falls below the string-match kernel"""
        self.assertGreaterEqual(
            kernel_wess(s1, s2, decay, indicator_sim) + 1e-12,
            kernel_sm(s1, s2, decay),
        )

    def test_symmetry_under_cosine(self):
        """Test K(s1, s2) == K(s2, s1) with a symmetric similarity"""
        sim = CosineSimilarity(random_embedding_table(seed=1))
        for s1, s2 in random_sentence_pairs(40, seed=2):
            self.assertAlmostEqual(
                kernel_wess(s1, s2, 0.5, sim), kernel_wess(s2, s1, 0.5, sim), delta=1e-12
            )


class KernelConfigTestCase(SimpleTestCase):
    """Test cases for KernelConfig validation and fingerprints"""

    def test_defaults(self):
        """Test the configured decay and suffix defaults"""
        config = KernelConfig()

        self.assertIs(config.variant, Variant.SM)
        self.assertEqual(config.decay, 0.5)
        self.assertEqual(config.suffix, '_AT')
        self.assertFalse(config.normalize)
        self.assertFalse(config.uses_embeddings)

    def test_west_requires_theta(self):
        """Test WEST without theta"""
        with self.assertRaises(ValidationError) as cm:
            KernelConfig(variant='west')
        self.assertEqual(cm.exception.code, 'config')

    def test_theta_only_for_west(self):
        """Test theta given to SM and WESS"""
        for variant in ('sm', 'wess'):
            with self.assertRaises(ValidationError):
                KernelConfig(variant=variant, theta=0.5)

    def test_suffix_mode_only_for_string_match(self):
        """Test aspect_mode=suffix with WESS"""
        with self.assertRaises(ValidationError) as cm:
            KernelConfig(variant='wess', aspect_mode='suffix')
        self.assertEqual(cm.exception.code, 'config')

    def test_flag_mode_only_for_embeddings(self):
        """Test aspect_mode=flag with SM"""
        with self.assertRaises(ValidationError):
            KernelConfig(variant='sm', aspect_mode='flag')

    def test_decay_range(self):
        """Test lambda outside (0, 1]"""
        for decay in (0.0, -0.1, 1.5, float('nan')):
            with self.assertRaises(ValidationError):
                KernelConfig(decay=decay)
        self.assertEqual(KernelConfig(decay=1).decay, 1.0)

    def test_theta_range(self):
        """Test theta outside [-1, 1]"""
        with self.assertRaises(ValidationError):
            KernelConfig(variant='west', theta=1.5)
        self.assertEqual(KernelConfig(variant='west', theta=-1).theta, -1.0)

    def test_round_trip_through_dict(self):
        """Test from_dict(as_dict())"""
        config = KernelConfig(variant='west', decay=0.3, theta=0.7, normalize=True,
                              aspect_mode='flag')
        self.assertEqual(KernelConfig.from_dict(config.as_dict()), config)
        self.assertIs(config.aspect_mode, AspectMode.FLAG)

    def test_fingerprint_tracks_settings(self):
        """Test that value-changing settings change the fingerprint"""
        base = KernelConfig(variant='wess')

        self.assertEqual(base.fingerprint('x'), KernelConfig(variant='wess').fingerprint('x'))
        self.assertNotEqual(base.fingerprint('x'), base.fingerprint('y'))
        self.assertNotEqual(base.fingerprint('x'),
                            KernelConfig(variant='wess', normalize=True).fingerprint('x'))
        self.assertNotEqual(base.fingerprint('x'),
                            KernelConfig(variant='wess', decay=0.4).fingerprint('x'))

    def test_string_match_ignores_embeddings(self):
        """Test that SM fingerprints do not depend on an embedding digest"""
        config = KernelConfig()
        self.assertEqual(config.fingerprint('x'), config.fingerprint('y'))

    def test_compute_kernel_dispatch(self):
        """Test compute_kernel for each variant"""
        sim = constant_sim(0.9)
        self.assertEqual(compute_kernel(['a'], ['a'], KernelConfig()), 0.5)
        self.assertEqual(
            compute_kernel(['u'], ['v'], KernelConfig(variant='west', theta=0.8), sim), 0.5
        )
        self.assertAlmostEqual(
            compute_kernel(['u'], ['v'], KernelConfig(variant='wess'), sim), 0.45, places=15
        )
