"""
Accuracy and confusion counts
"""

from dataclasses import dataclass

import numpy as np
from sklearn.metrics import accuracy_score, confusion_matrix

from .validators import validate_prediction_lengths


@dataclass
class AccuracyReport:
    accuracy: float
    labels: tuple
    confusion: np.ndarray
    total: int

    @property
    def correct(self):
        return int(np.trace(self.confusion))

    def per_class(self):
        """{label: {'gold': n, 'predicted': n, 'correct': n}}"""
        return {
            label: {
                'gold': int(self.confusion[k].sum()),
                'predicted': int(self.confusion[:, k].sum()),
                'correct': int(self.confusion[k, k]),
            }
            for k, label in enumerate(self.labels)
        }

    def as_dict(self):
        return {
            'accuracy': self.accuracy,
            'total': self.total,
            'correct': self.correct,
            'labels': list(self.labels),
            'confusion': self.confusion.tolist(),
        }


def evaluate_accuracy(predicted, gold):
    """
    Fraction of exact label matches plus a confusion matrix.

    Rows of the confusion matrix are gold labels, columns predictions, both
    in sorted label order.
    """
    predicted = [str(label) for label in predicted]
    gold = [str(label) for label in gold]
    validate_prediction_lengths(predicted, gold)

    labels = tuple(sorted(set(gold) | set(predicted)))
    return AccuracyReport(
        accuracy=float(accuracy_score(gold, predicted)),
        labels=labels,
        confusion=confusion_matrix(gold, predicted, labels=list(labels)),
        total=len(gold),
    )
