"""
Рост интеграла ∫_{B_R}(v² + |u|^{p+1}) по R
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.errors import DomainError, TooFewSamples
from src.exponents.constants import derive_constants, sphere_area
from src.radialode.field import RadialField
from src.radialode.nonlinearity import PowerNonlinearity

logger = logging.getLogger(__name__)

# Допуск на показатель роста сверх n - 4(p+1)/(p-1)
GROWTH_TOL = 0.05


@dataclass(frozen=True)
class GrowthFit:
    """Результат подгонки I(R) ≈ C·R^exponent"""

    constant: float
    exponent: float
    bound: float
    degenerate: bool

    @property
    def within_bound(self) -> bool:
        return self.degenerate or self.exponent <= self.bound + GROWTH_TOL


def growth_integral(field: RadialField, radii) -> np.ndarray:
    """ω∫_{B_R}(v² + |u|^{p+1}) из накопленных столбцов"""
    s = field.state(radii)
    p = field.params.p
    return sphere_area(field.n) * (s.vsq + (p + 1.0) * (0.5 * s.vsq - s.vol))


def growth_bound_check(
    field: RadialField,
    radii,
    fit_window: Optional[Tuple[float, float]] = None,
) -> GrowthFit:
    """
    Подгонка log I(R) от log R методом наименьших квадратов

    Args:
        field: Решение Δ²u = |u|^{p-1}u
        radii: Радиусы R внутри сетки
        fit_window: Необязательный отрезок [R_lo, R_hi] для подгонки

    Returns:
        GrowthFit; при I ≡ 0 подгонка помечается вырожденной
    """
    if not isinstance(field.nonlinearity, PowerNonlinearity):
        raise DomainError("оценка роста определена только для |u|^{p-1}u")
    field.params.require_supercritical('growth_bound_check')
    radii = np.asarray(radii, dtype=float)
    if fit_window is not None:
        radii = radii[(radii >= fit_window[0]) & (radii <= fit_window[1])]
    if len(radii) < 2:
        raise TooFewSamples("для подгонки роста нужно ≥ 2 радиусов")
    bound = field.n - 2.0 * derive_constants(field.params).gamma - 4.0

    values = growth_integral(field, radii)
    if np.all(values == 0) or np.any(values <= 0):
        logger.warning("Интеграл роста не положителен: подгонка вырождена")
        return GrowthFit(constant=0.0, exponent=float('nan'), bound=bound, degenerate=True)

    exponent, log_constant = np.polyfit(np.log(radii), np.log(values), 1)
    fit = GrowthFit(constant=float(np.exp(log_constant)), exponent=float(exponent), bound=bound, degenerate=False)
    logger.info(f"Показатель роста {fit.exponent:.5f} при границе {bound:.5f}")
    return fit
