"""
Self-test suites run by `manage.py selftest`

Oracle equivalence for the three kernels, symmetry, and positive
semidefiniteness of SM and WESS Gram matrices on generated data.
"""

import logging
import time
from dataclasses import dataclass, field

from embeddings.similarity import CosineSimilarity
from kernels import anygram_algorithm
from kernels.config import KernelConfig
from kernels.gram import definiteness_report, gram_train
from oracle.brute_force import oracle_sm, oracle_wess, oracle_west
from oracle.generators import ALPHABET, random_corpus, random_embedding_table, random_sentence_pairs

logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-9
SYMMETRY_TOLERANCE = 1e-12
DEFAULT_DECAYS = (0.3, 0.5, 1.0)
DEFAULT_THETAS = (0.3, 0.7)
MAX_REPORTED_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def fail(self, message):
        if len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(message)
        else:
            self.failures[-1] = f'... and more ({message})'


@dataclass
class SelftestReport:
    suites: list

    @property
    def passed(self):
        return all(suite.passed for suite in self.suites)


class _CachedSimilarity:
    def __init__(self, sim):
        self.sim = sim
        self.cache = {}

    def __call__(self, a, b):
        key = (a, b)
        if key not in self.cache:
            self.cache[key] = self.sim(a, b)
        return self.cache[key]


def _close(value, expected):
    return abs(value - expected) <= RELATIVE_TOLERANCE * max(1.0, abs(expected))


def _oracle_suite(name, pairs, check):
    suite = SuiteResult(name)
    started = time.perf_counter()
    for k, (s1, s2) in enumerate(pairs):
        value, expected, detail = check(k, s1, s2)
        suite.checked += 1
        if not _close(value, expected):
            suite.fail(f'{detail} {list(s1.tokens)} vs {list(s2.tokens)}: dp={value!r} oracle={expected!r}')
    suite.seconds = time.perf_counter() - started
    return suite


def run_selftest(pairs=200, seed=0, decays=DEFAULT_DECAYS, thetas=DEFAULT_THETAS,
                 corpus_size=50, kernels=anygram_algorithm, threads=1):
    """
    Run every suite and return a SelftestReport.

    Args:
        pairs (int): Random sentence pairs per variant
        seed (int): Seed for data generation
        decays (tuple): Decay factors cycled over the pairs
        thetas (tuple): WEST thresholds cycled over the pairs
        corpus_size (int): Sentences in the PSD corpora
        kernels (module): Provides kernel_sm, kernel_west and kernel_wess
        threads (int): Gram workers for the PSD suite
    """
    sentence_pairs = random_sentence_pairs(pairs, seed=seed)
    table = random_embedding_table(ALPHABET, dim=8, seed=seed)
    sim = _CachedSimilarity(CosineSimilarity(table))
    suites = []

    def decay_for(k):
        return decays[k % len(decays)]

    def check_sm(k, s1, s2):
        decay = decay_for(k)
        return kernels.kernel_sm(s1, s2, decay), oracle_sm(s1, s2, decay), f'lambda={decay}'

    def check_west(k, s1, s2):
        decay, theta = decay_for(k), thetas[k % len(thetas)]
        return (
            kernels.kernel_west(s1, s2, decay, theta, sim),
            oracle_west(s1, s2, decay, theta, sim),
            f'lambda={decay} theta={theta}',
        )

    def check_wess(k, s1, s2):
        decay = decay_for(k)
        return kernels.kernel_wess(s1, s2, decay, sim), oracle_wess(s1, s2, decay, sim), f'lambda={decay}'

    suites.append(_oracle_suite('oracle-sm', sentence_pairs, check_sm))
    suites.append(_oracle_suite('oracle-west', sentence_pairs, check_west))
    suites.append(_oracle_suite('oracle-wess', sentence_pairs, check_wess))
    suites.append(_symmetry_suite(sentence_pairs, decays, thetas, sim, kernels))
    suites.append(_psd_suite(corpus_size, seed, table, threads))

    for suite in suites:
        level = logging.INFO if suite.passed else logging.ERROR
        logger.log(level, f"Suite {suite.name}: {suite.checked} checks, "
                          f"{len(suite.failures)} failures, {suite.seconds:.2f}s")
    return SelftestReport(suites)


def _symmetry_suite(sentence_pairs, decays, thetas, sim, kernels):
    suite = SuiteResult('symmetry')
    started = time.perf_counter()
    for k, (s1, s2) in enumerate(sentence_pairs):
        decay = decays[k % len(decays)]
        theta = thetas[k % len(thetas)]
        variants = (
            ('sm', lambda a, b: kernels.kernel_sm(a, b, decay)),
            ('west', lambda a, b: kernels.kernel_west(a, b, decay, theta, sim)),
            ('wess', lambda a, b: kernels.kernel_wess(a, b, decay, sim)),
        )
        for name, kernel in variants:
            forward, backward = kernel(s1, s2), kernel(s2, s1)
            suite.checked += 1
            if abs(forward - backward) > SYMMETRY_TOLERANCE * max(1.0, abs(forward)):
                suite.fail(f'{name}: K(a,b)={forward!r} K(b,a)={backward!r}')
    suite.seconds = time.perf_counter() - started
    return suite


def _psd_suite(corpus_size, seed, table, threads):
    suite = SuiteResult('psd')
    started = time.perf_counter()
    corpus = random_corpus(corpus_size, seed=seed + 1)
    cosine = CosineSimilarity(table)

    checks = (
        ('sm', KernelConfig(variant='sm', decay=0.5), None, True),
        ('wess', KernelConfig(variant='wess', decay=0.5), cosine, True),
        ('west', KernelConfig(variant='west', decay=0.5, theta=0.5), cosine, False),
    )
    for name, config, similarity, asserted in checks:
        gram = gram_train(corpus, config, similarity, threads=threads)
        report = definiteness_report(gram)
        note = (f'{name}: min eigenvalue {report.min_eigenvalue:.3e}, '
                f'max {report.max_eigenvalue:.3e}')
        if not asserted:
            suite.notes.append(f'{note} (reported only)')
            continue
        suite.checked += 1
        suite.notes.append(note)
        if not report.is_psd:
            suite.fail(f'{name} Gram matrix is not positive semidefinite ({note})')
    suite.seconds = time.perf_counter() - started
    return suite

