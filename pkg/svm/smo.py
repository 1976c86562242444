"""
Binary soft-margin SVM dual solver over a precomputed Gram matrix

    min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,  Q_ij = y_i y_j K_ij

Sequential minimal optimization with maximal-violating-pair working-set
selection, as in libsvm. Candidate order for ties is a seeded permutation,
so runs are reproducible.
"""

import logging
from dataclasses import dataclass

import numpy as np
from sklearn.svm import SVC

from .config import SvmConfig

logger = logging.getLogger(__name__)

# Curvature used in place of a non-positive one; the step then runs to an
# endpoint of the feasible segment
TAU = 1e-12
SYMMETRY_TOLERANCE = 1e-9


class SolverInputError(ValueError):
    """Gram matrix or labels do not form a valid binary problem."""


@dataclass
class SmoResult:
    alphas: np.ndarray
    bias: float
    converged: bool
    violation: float
    iterations: int
    clamped_steps: int = 0

    def dual_coefficients(self, labels):
        return self.alphas * np.asarray(labels, dtype=np.float64)

    @property
    def support(self):
        return np.flatnonzero(self.alphas > 0)


def _check_problem(gram, labels):
    K = np.asarray(getattr(gram, 'values', gram), dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)

    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise SolverInputError(f"Gram matrix must be square, got shape {K.shape}")
    if y.shape != (K.shape[0],):
        raise SolverInputError(f"{y.shape[0] if y.ndim else 0} labels for a {K.shape[0]}x{K.shape[0]} Gram matrix")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise SolverInputError("Labels must be +1 or -1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise SolverInputError("Both labels +1 and -1 must be present")

    scale = max(1.0, float(np.max(np.abs(K))))
    if np.max(np.abs(K - K.T)) > SYMMETRY_TOLERANCE * scale:
        raise SolverInputError("Gram matrix is not symmetric")
    return K, y


def _select_working_pair(alphas, gradient, y, C, order):
    """
    Maximal violating pair.

    Returns (i, j, violation) where violation = m - M is the gap between
    the largest -y*G over the "up" set and the smallest over the "low" set.
    """
    v = -y * gradient
    up = ((y > 0) & (alphas < C)) | ((y < 0) & (alphas > 0))
    low = ((y > 0) & (alphas > 0)) | ((y < 0) & (alphas < C))
    if not up.any() or not low.any():
        return -1, -1, 0.0

    ordered = v[order]
    i = order[np.argmax(np.where(up[order], ordered, -np.inf))]
    j = order[np.argmin(np.where(low[order], ordered, np.inf))]
    return int(i), int(j), float(v[i] - v[j])


def _bias(alphas, gradient, y, C):
    v = -y * gradient
    free = (alphas > 0) & (alphas < C)
    if free.any():
        return float(np.mean(v[free]))

    up = ((y > 0) & (alphas < C)) | ((y < 0) & (alphas > 0))
    low = ((y > 0) & (alphas > 0)) | ((y < 0) & (alphas < C))
    return float((np.max(v[up]) + np.min(v[low])) / 2.0)


def _update_pair(alphas, Q, gradient, y, i, j, C):
    """
    Analytic two-variable step, clipped to the box.

    Returns True when the curvature was non-positive and the step was
    taken to an endpoint.
    """
    old_i, old_j = alphas[i], alphas[j]
    clamped = False

    if y[i] != y[j]:
        quad = Q[i, i] + Q[j, j] + 2.0 * Q[i, j]
        if quad <= 0:
            quad, clamped = TAU, True
        delta = (-gradient[i] - gradient[j]) / quad
        diff = old_i - old_j
        a_i = old_i + delta
        a_j = old_j + delta
        if diff > 0:
            if a_j < 0:
                a_j, a_i = 0.0, diff
        elif a_i < 0:
            a_i, a_j = 0.0, -diff
        if diff > 0:
            if a_i > C:
                a_i, a_j = C, C - diff
        elif a_j > C:
            a_j, a_i = C, C + diff
    else:
        quad = Q[i, i] + Q[j, j] - 2.0 * Q[i, j]
        if quad <= 0:
            quad, clamped = TAU, True
        delta = (gradient[i] - gradient[j]) / quad
        total = old_i + old_j
        a_i = old_i - delta
        a_j = old_j + delta
        if total > C:
            if a_i > C:
                a_i, a_j = C, total - C
        elif a_j < 0:
            a_j, a_i = 0.0, total
        if total > C:
            if a_j > C:
                a_j, a_i = C, total - C
        elif a_i < 0:
            a_i, a_j = 0.0, total

    alphas[i], alphas[j] = a_i, a_j
    gradient += Q[:, i] * (a_i - old_i) + Q[:, j] * (a_j - old_j)
    return clamped


def _solve_smo(K, y, config):
    n = K.shape[0]
    Q = (y[:, None] * y[None, :]) * K
    alphas = np.zeros(n, dtype=np.float64)
    gradient = -np.ones(n, dtype=np.float64)
    order = np.random.default_rng(config.seed).permutation(n)
    cap = config.iteration_cap(n)

    iterations = 0
    clamped_steps = 0
    converged = False
    while True:
        i, j, violation = _select_working_pair(alphas, gradient, y, config.C, order)
        if i < 0 or violation <= config.tol:
            converged = True
            break
        if iterations >= cap:
            break
        clamped_steps += _update_pair(alphas, Q, gradient, y, i, j, config.C)
        iterations += 1

    return SmoResult(
        alphas=alphas,
        bias=_bias(alphas, gradient, y, config.C),
        converged=converged,
        violation=max(violation, 0.0),
        iterations=iterations,
        clamped_steps=clamped_steps,
    )


def _solve_libsvm(K, y, config):
    n = K.shape[0]
    classifier = SVC(
        C=config.C,
        kernel='precomputed',
        tol=config.tol,
        max_iter=config.iteration_cap(n) if config.max_passes is not None else -1,
        shrinking=False,
    )
    classifier.fit(K, y)

    alphas = np.zeros(n, dtype=np.float64)
    alphas[classifier.support_] = np.abs(classifier.dual_coef_[0])
    alphas = np.minimum(alphas, config.C)

    coefficients = alphas * y
    decision = classifier.decision_function(K)
    bias = float(np.mean(decision - K @ coefficients))

    gradient = (y * (K @ coefficients)) - 1.0
    _i, _j, violation = _select_working_pair(alphas, gradient, y, config.C, np.arange(n))
    iterations = getattr(classifier, 'n_iter_', [0])
    return SmoResult(
        alphas=alphas,
        bias=bias,
        converged=classifier.fit_status_ == 0,
        violation=max(violation, 0.0),
        iterations=int(np.sum(iterations)),
    )


def smo_solve(gram, labels, config=None):
    """
    Solve one binary soft-margin problem.

    Args:
        gram (GramMatrix | ndarray): Symmetric n x n kernel matrix
        labels (sequence): +1 / -1 per instance, both present
        config (SvmConfig): C, tolerance, iteration cap, seed, solver

    Returns:
        SmoResult: alphas in [0, C], bias b with f(x) = sum a_i y_i K(x, x_i) + b,
            and convergence diagnostics

    Raises:
        SolverInputError: non-square or asymmetric Gram, bad labels, one class
    """
    config = config or SvmConfig()
    K, y = _check_problem(gram, labels)

    if config.solver == 'libsvm':
        result = _solve_libsvm(K, y, config)
    else:
        result = _solve_smo(K, y, config)

    if result.clamped_steps:
        logger.warning(
            f"{result.clamped_steps} SMO steps met non-positive curvature "
            f"(indefinite Gram matrix); clamped to interval endpoints"
        )
    if not result.converged:
        logger.warning(
            f"SMO did not converge after {result.iterations} updates; "
            f"KKT violation {result.violation:.3e} > tol {config.tol:g}"
        )
    return result
