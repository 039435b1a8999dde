"""
Плотность Θ(0, u) = lim_{r→0} E(r; 0, u)
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.errors import DomainError, TooFewSamples
from src.energy.monotonicity import energy_radial, lowest_energy_radius
from src.exponents.constants import derive_constants
from src.radialode.field import RadialField

logger = logging.getLogger(__name__)

MIN_SAMPLES = 4


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    """Значения E на убывающих радиусах и экстраполяция к r = 0"""

    center: float
    radii: np.ndarray
    values: np.ndarray
    extrapolated: float

    def is_consistent(self, tolerance: float) -> bool:
        """E неубывающая, поэтому предел не превосходит наименьшего значения"""
        return self.extrapolated <= float(np.min(self.values)) + tolerance


def default_density_radii(field: RadialField, count: int = 8) -> np.ndarray:
    """Окно [max(r_min, 10³·r₀), 100 раз больше], по убыванию"""
    low = max(lowest_energy_radius(field), 1e3 * field.origin_start)
    high = min(field.r_max, 100.0 * low)
    return np.geomspace(high, low, count)


def density_estimate(
    field: RadialField,
    center: float = 0.0,
    radii: Optional[Sequence[float]] = None,
) -> DensityEstimate:
    """
    Экстраполяция E(r) при r → 0

    Для решения, гладкого в нуле, E(r) = c·r^{2γ} + d·r^{2γ+2} + ...,
    для однородного E постоянна; оба случая укладываются в модель
    Θ + c·r^{2γ} + d·r^{2γ+2}, подгоняемую методом наименьших квадратов.

    Args:
        field: Радиальное решение
        center: Центр шара (поддерживается только 0)
        radii: Убывающая последовательность радиусов

    Returns:
        DensityEstimate
    """
    if center != 0:
        raise DomainError("для радиального поля плотность считается только в центре симметрии")
    radii = default_density_radii(field) if radii is None else np.asarray(radii, dtype=float)
    if len(radii) < MIN_SAMPLES:
        raise TooFewSamples(f"для экстраполяции нужно ≥ {MIN_SAMPLES} радиусов, получено {len(radii)}")
    if np.any(np.diff(radii) >= 0):
        raise DomainError("радиусы для плотности должны строго убывать")

    gamma = derive_constants(field.params).gamma
    values = np.array([energy_radial(field, r) for r in radii])
    scaled = radii / radii[0]
    basis = np.column_stack([
        np.ones_like(scaled),
        scaled ** (2 * gamma),
        scaled ** (2 * gamma + 2),
    ])
    coefficients, *_ = np.linalg.lstsq(basis, values, rcond=None)
    estimate = DensityEstimate(
        center=center,
        radii=radii,
        values=values,
        extrapolated=float(coefficients[0]),
    )
    tolerance = 1e-6 * max(1.0, float(np.max(np.abs(values))))
    if not estimate.is_consistent(tolerance):
        logger.warning(
            f"Θ = {estimate.extrapolated:.6g} больше min E = {np.min(values):.6g}: нарушена монотонность"
        )
    return estimate
