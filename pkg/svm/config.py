"""
Classifier configuration
"""

from dataclasses import asdict, dataclass

from django.conf import settings

from .validators import (
    validate_margin_parameter,
    validate_max_passes,
    validate_solver,
    validate_tolerance,
)


@dataclass(frozen=True)
class SvmConfig:
    """
    Attributes:
        C: error/margin trade-off
        tol: KKT tolerance
        max_passes: solver cap in passes of N pair updates (None = 10 * N)
        seed: fixes the tie-breaking order of working-pair selection
        solver: 'smo' (built in) or 'libsvm' (scikit-learn SVC)
        threads: workers for the one-versus-one problems (0 = all cores)
    """

    C: float | None = None
    tol: float | None = None
    max_passes: int | None = None
    seed: int | None = None
    solver: str = 'smo'
    threads: int | None = None

    def __post_init__(self):
        if self.C is None:
            object.__setattr__(self, 'C', settings.ANYGRAM_DEFAULT_C)
        if self.tol is None:
            object.__setattr__(self, 'tol', settings.ANYGRAM_SVM_TOL)
        if self.seed is None:
            object.__setattr__(self, 'seed', settings.ANYGRAM_SEED)
        object.__setattr__(self, 'C', float(self.C))
        object.__setattr__(self, 'tol', float(self.tol))

        validate_margin_parameter(self.C)
        validate_tolerance(self.tol)
        validate_max_passes(self.max_passes)
        validate_solver(self.solver)

    def iteration_cap(self, n):
        """Pair updates allowed for an n-instance problem."""
        passes = self.max_passes if self.max_passes is not None else 10 * n
        return passes * max(1, n)

    def as_dict(self):
        data = asdict(self)
        data.pop('threads')
        return data
