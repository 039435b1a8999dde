"""
Проверка ограниченности экстремального решения по точкам у складки
"""
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.errors import TooFewSamples
from src.exponents.constants import ProblemParams
from src.exponents.stability import min_stable_dimension
from src.navierbvp.solver import Branch

logger = logging.getLogger(__name__)

REGIME_BOUNDED = 'bounded'
REGIME_TREND = 'trend'

# Допустимое относительное изменение sup u у складки между сетками N и 2N
GRID_CHANGE_TOL = 0.01


@dataclass(frozen=True)
class RegularityReport:
    n: int
    p: float
    n_p: int
    regime: str
    grid_sizes: Tuple[int, ...]
    fold_sup_norms: Tuple[float, ...]
    relative_change: float
    bounded: bool
    passed: bool


def extremal_regularity_report(params: ProblemParams, branches: Sequence[Branch]) -> RegularityReport:
    """
    sup u при λ ≈ λ* на нескольких сетках

    Экстремальное решение приближается точками минимальной ветви у складки.
    При n < n_p(p) требуется ограниченность и сходимость по сетке,
    при n ≥ n_p только сообщается тенденция.
    """
    if not branches:
        raise TooFewSamples("нужна хотя бы одна ветвь")
    n_p = min_stable_dimension(params.p)
    ordered = sorted(branches, key=lambda branch: branch.grid_size)
    sups = tuple(branch.sup_norm_star for branch in ordered)
    sizes = tuple(branch.grid_size for branch in ordered)

    relative_change = float('nan')
    if len(sups) >= 2 and sups[-1] != 0:
        relative_change = abs(sups[-1] - sups[-2]) / abs(sups[-1])

    bounded = all(np.isfinite(sups)) and all(branch.fold_detected for branch in ordered)

    if params.n < n_p:
        regime = REGIME_BOUNDED
        grid_stable = len(sups) < 2 or relative_change <= GRID_CHANGE_TOL
        passed = bounded and grid_stable
        logger.info(
            f"n={params.n} < n_p={n_p}: sup u у складки {sups}, изменение {relative_change:.3e}, "
            f"{'OK' if passed else 'FAIL'}"
        )
    else:
        regime = REGIME_TREND
        passed = True
        trend = ordered[-1].sup_norms[-5:]
        logger.info(f"n={params.n} ≥ n_p={n_p}: только тенденция, последние sup u = {np.round(trend, 6).tolist()}")

    return RegularityReport(
        n=params.n,
        p=params.p,
        n_p=n_p,
        regime=regime,
        grid_sizes=sizes,
        fold_sup_norms=sups,
        relative_change=relative_change,
        bounded=bounded,
        passed=passed,
    )
