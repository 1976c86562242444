"""
One-versus-one multiclass classification over precomputed kernels

One binary problem per unordered class pair, trained on the sub-Gram of
that pair's instances. Prediction is by vote over the pairwise decision
values.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from joblib import Parallel, delayed

from kernels.gram import FingerprintMismatch, resolve_threads

from .config import SvmConfig
from .smo import SolverInputError, smo_solve

logger = logging.getLogger(__name__)


@dataclass
class BinaryClassifier:
    """
    Decision function f(x) = sum_s coefficients[s] * K(x, x_support[s]) + bias,
    positive for the first class of the pair.
    """

    positive: int
    negative: int
    support: tuple
    coefficients: tuple
    bias: float
    converged: bool = True
    violation: float = 0.0
    iterations: int = 0
    clamped_steps: int = 0

    def decision(self, cross_values):
        """Decision values for every row of a test x train kernel matrix."""
        if not self.support:
            return np.full(cross_values.shape[0], self.bias, dtype=np.float64)
        columns = cross_values[:, list(self.support)]
        return columns @ np.asarray(self.coefficients, dtype=np.float64) + self.bias


@dataclass
class SvmModel:
    """
    Trained one-versus-one model.

    pairs follow combinations(range(len(classes)), 2); support indices are
    positions in train_ids.
    """

    classes: tuple
    pairs: list
    train_ids: tuple
    kernel_fingerprint: str
    C: float
    svm_config: dict = field(default_factory=dict)
    kernel_config: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    manifest: str = ''

    @property
    def fingerprint(self):
        """Kernel fingerprint combined with C."""
        payload = f'{self.kernel_fingerprint}:C={self.C!r}'
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()

    @property
    def converged(self):
        return all(pair.converged for pair in self.pairs)

    @property
    def worst_violation(self):
        return max((pair.violation for pair in self.pairs), default=0.0)


def _train_pair(K, labels, positive, negative, classes, config):
    members = [k for k, label in enumerate(labels) if label in (classes[positive], classes[negative])]
    y = np.array([1.0 if labels[k] == classes[positive] else -1.0 for k in members])
    result = smo_solve(K[np.ix_(members, members)], y, config)

    coefficients = result.dual_coefficients(y)
    support = [k for k, alpha in enumerate(result.alphas) if alpha > 0]
    return BinaryClassifier(
        positive=positive,
        negative=negative,
        support=tuple(members[k] for k in support),
        coefficients=tuple(float(coefficients[k]) for k in support),
        bias=result.bias,
        converged=result.converged,
        violation=result.violation,
        iterations=result.iterations,
        clamped_steps=result.clamped_steps,
    )


def ovo_train(gram, labels, config=None):
    """
    Train k(k-1)/2 binary classifiers.

    Args:
        gram (GramMatrix): Square train Gram matrix
        labels (sequence): Class label per row
        config (SvmConfig): Solver settings

    Returns:
        SvmModel: classes sorted; pairs in (0,1), (0,2), ... order
    """
    config = config or SvmConfig()
    if not gram.is_train:
        raise SolverInputError("Training needs a square train Gram matrix (row ids == column ids)")
    labels = list(labels)
    if len(labels) != gram.shape[0]:
        raise SolverInputError(f"{len(labels)} labels for {gram.shape[0]} training instances")
    if any(label is None or label == '' for label in labels):
        raise SolverInputError("Every training instance needs a label")

    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise SolverInputError(f"At least two classes are needed, found {len(classes)}")

    index_pairs = list(combinations(range(len(classes)), 2))
    logger.info(
        f"Training {len(index_pairs)} one-versus-one classifiers over {len(classes)} classes "
        f"(N={len(labels)}, C={config.C:g}, solver={config.solver})"
    )

    threads = min(resolve_threads(config.threads), len(index_pairs))
    if threads == 1:
        pairs = [
            _train_pair(gram.values, labels, a, b, classes, config) for a, b in index_pairs
        ]
    else:
        pairs = Parallel(n_jobs=threads)(
            delayed(_train_pair)(gram.values, labels, a, b, classes, config)
            for a, b in index_pairs
        )

    for pair in pairs:
        if not pair.converged:
            logger.warning(
                f"Classifier {classes[pair.positive]} vs {classes[pair.negative]} did not converge "
                f"(violation {pair.violation:.3e})"
            )

    return SvmModel(
        classes=classes,
        pairs=list(pairs),
        train_ids=gram.row_ids,
        kernel_fingerprint=gram.fingerprint,
        C=config.C,
        svm_config=config.as_dict(),
    )


@dataclass
class Prediction:
    labels: list
    decisions: np.ndarray
    votes: np.ndarray


def _vote(decisions, model):
    k = len(model.classes)
    votes = np.zeros((decisions.shape[0], k), dtype=np.int64)
    strength = np.zeros((decisions.shape[0], k), dtype=np.float64)
    for column, pair in enumerate(model.pairs):
        values = decisions[:, column]
        for winner, mask in ((pair.positive, values > 0), (pair.negative, values < 0)):
            votes[mask, winner] += 1
            strength[mask, winner] += np.abs(values[mask])

    winners = []
    for row in range(decisions.shape[0]):
        # most votes, then largest winning |decision| sum, then lowest index
        best = min(range(k), key=lambda c: (-votes[row, c], -strength[row, c], c))
        winners.append(best)
    return winners, votes


def ovo_predict(model, cross):
    """
    Predict labels for the rows of a test x train Gram matrix.

    A decision value of exactly 0 is an abstention.

    Raises:
        FingerprintMismatch: the matrix was built under other kernel settings
            or over other training instances
    """
    cross.require_fingerprint(model.kernel_fingerprint)
    if tuple(cross.col_ids) != tuple(model.train_ids):
        raise FingerprintMismatch(
            "Cross Gram columns do not match the model's training instances"
        )

    decisions = np.column_stack(
        [pair.decision(cross.values) for pair in model.pairs]
    ) if model.pairs else np.zeros((cross.shape[0], 0))
    decisions = decisions.reshape(cross.shape[0], len(model.pairs))

    winners, votes = _vote(decisions, model)
    return Prediction(
        labels=[model.classes[w] for w in winners],
        decisions=decisions,
        votes=votes,
    )
