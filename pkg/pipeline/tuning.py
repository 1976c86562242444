"""
Grid search over C (and theta for WEST) on a development set
"""

import logging
from dataclasses import dataclass, field, replace

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from kernels.config import KernelConfig, Variant
from kernels.gram import gram_cross, gram_train
from svm.config import SvmConfig
from svm.evaluation import evaluate_accuracy
from svm.ovo import ovo_predict, ovo_train

logger = logging.getLogger(__name__)


@dataclass
class GridPoint:
    C: float
    theta: float | None
    accuracy: float
    converged: bool = True

    def as_dict(self):
        return {
            'C': self.C,
            'theta': self.theta,
            'accuracy': self.accuracy,
            'converged': self.converged,
        }


@dataclass
class TuningReport:
    points: list
    best: GridPoint
    notices: list = field(default_factory=list)

    def as_dict(self):
        return {
            'points': [p.as_dict() for p in self.points],
            'best': self.best.as_dict(),
            'notices': list(self.notices),
        }


def select_best(points):
    """Highest accuracy; ties go to the smallest C, then the smallest theta."""
    return min(
        points,
        key=lambda p: (-p.accuracy, p.C, p.theta if p.theta is not None else float('-inf')),
    )


def tune(train, dev, kernel_config, sim=None, C_grid=None, theta_grid=None, svm_config=None):
    """
    Train on train for every grid point and score on dev.

    Args:
        train (Corpus): Labeled training corpus
        dev (Corpus): Labeled development corpus
        kernel_config (dict): KernelConfig fields except theta
        sim (callable): Token similarity for WEST/WESS
        C_grid (list[float]): Values of C
        theta_grid (list[float]): Thresholds, used by WEST only
        svm_config (SvmConfig): Remaining solver settings

    Returns:
        TuningReport
    """
    C_grid = [float(c) for c in (C_grid or [])]
    theta_grid = [float(t) for t in (theta_grid or [])]
    variant = Variant(kernel_config.get('variant', 'sm'))
    svm_config = svm_config or SvmConfig()
    notices = []

    if not C_grid:
        raise ValidationError(_('The C grid is empty.'), code='config')
    if variant is Variant.WEST and not theta_grid:
        raise ValidationError(_('The theta grid is empty; WEST needs at least one threshold.'),
                              code='config')
    if not train.is_labeled or not dev.is_labeled:
        raise ValidationError(_('Tuning needs labeled training and development sets.'),
                              code='unlabeled')

    if variant is not Variant.WEST:
        thetas = [None]
        if theta_grid:
            notice = (f"{variant.value.upper()} has no similarity threshold; "
                      f"theta grid {theta_grid} ignored")
            logger.warning(notice)
            notices.append(notice)
    else:
        thetas = theta_grid

    options = {k: v for k, v in kernel_config.items() if k != 'theta'}
    points = []
    for theta in thetas:
        config = KernelConfig(**options, theta=theta)
        train_gram = gram_train(train, config, sim, threads=svm_config.threads)
        dev_gram = gram_cross(dev, train, config, sim, threads=svm_config.threads)
        for C in C_grid:
            model = ovo_train(train_gram, train.labels, replace(svm_config, C=C))
            predicted = ovo_predict(model, dev_gram).labels
            accuracy = evaluate_accuracy(predicted, dev.labels).accuracy
            logger.info(f"Grid point C={C:g} theta={theta}: dev accuracy {accuracy:.4f}")
            points.append(GridPoint(C=C, theta=theta, accuracy=accuracy, converged=model.converged))

    best = select_best(points)
    logger.info(f"Best grid point: C={best.C:g} theta={best.theta} accuracy={best.accuracy:.4f}")
    return TuningReport(points=points, best=best, notices=notices)
