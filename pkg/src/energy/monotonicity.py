"""
Монотонная энергия E(r; 0, u) в радиальной редукции и ее производная
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.config import Config
from src.errors import DomainError, GridRangeError, VerificationFailure
from src.exponents.constants import ProblemParams, derive_constants, sphere_area
from src.radialode.field import RadialField
from src.radialode.nonlinearity import PowerNonlinearity
from src.radialode.stencils import five_point_derivative

logger = logging.getLogger(__name__)

# Шаг численного дифференцирования относительно r
DERIVATIVE_STEP = 1e-3


@dataclass(frozen=True)
class EnergyTerms:
    """Слагаемые E в точке r: объемное, граничное с u² и граничное с w²"""

    volume: float
    lower_order: float
    defect: float

    @property
    def total(self) -> float:
        return self.volume + self.lower_order + self.defect

    @property
    def magnitude(self) -> float:
        return abs(self.volume) + abs(self.lower_order) + abs(self.defect)


def scaling_exponent(field: RadialField) -> float:
    sigma = field.nonlinearity.scaling_exponent
    if sigma is None:
        raise DomainError(f"энергия не определена для нелинейности {field.nonlinearity.name}")
    return sigma


def lowest_energy_radius(field: RadialField) -> float:
    """Ниже 2·r₀ значения загрязнены стартом по Тейлору"""
    return max(field.r_min, 2.0 * field.origin_start)


def check_radius(field: RadialField, r, operation: str):
    field.require_inside(r, operation)
    if np.any(np.asarray(r) < 2.0 * field.origin_start * (1.0 - 1e-12)):
        raise GridRangeError(
            f"{operation}: r ниже 2·r₀ = {2.0 * field.origin_start:.3g}, значения у начала не надежны"
        )


def energy_terms(field: RadialField, r, sigma: Optional[float] = None) -> EnergyTerms:
    """
    Слагаемые E для масштабного показателя σ

    E = ω r^{2σ+4-n}·vol
      + ω(σ/2)(n-2-σ)[(2σ+2) r^{2σ} u² + 2 r^{2σ+1} u u']
      + ω r^{2σ+2}(σ w² + r w w'),   w = σu/r + u'
    """
    sigma = scaling_exponent(field) if sigma is None else sigma
    n = field.n
    omega = sphere_area(n)
    s = field.state(r)
    r = np.asarray(r, dtype=float)
    ddu = field.second_derivative(r, s.du, s.v)
    w = sigma * s.u / r + s.du
    dw = sigma * s.du / r - sigma * s.u / r ** 2 + ddu

    volume = omega * r ** (2 * sigma + 4 - n) * s.vol
    lower_order = omega * 0.5 * sigma * (n - 2 - sigma) * (
        (2 * sigma + 2) * r ** (2 * sigma) * s.u ** 2 + 2 * r ** (2 * sigma + 1) * s.u * s.du
    )
    defect = omega * r ** (2 * sigma + 2) * (sigma * w ** 2 + r * w * dw)
    return EnergyTerms(volume=volume, lower_order=lower_order, defect=defect)


def defect_density(field: RadialField, r, sigma: Optional[float] = None):
    """ω r^{2σ+1}(σu/r + u')²: подынтегральное выражение дефекта однородности"""
    sigma = scaling_exponent(field) if sigma is None else sigma
    s = field.state(r)
    r = np.asarray(r, dtype=float)
    w = sigma * s.u / r + s.du
    return sphere_area(field.n) * r ** (2 * sigma + 1) * w ** 2


def energy_radial(field: RadialField, r: float) -> float:
    """
    E(r; 0, u) для Δ²u = |u|^{p-1}u

    Args:
        field: Радиальное решение
        r: Радиус внутри сетки, не меньше 2·r₀

    Returns:
        Значение энергии
    """
    field.params.require_supercritical('energy_radial')
    if not isinstance(field.nonlinearity, PowerNonlinearity):
        raise DomainError("energy_radial определена только для |u|^{p-1}u")
    check_radius(field, r, 'energy_radial')
    return float(energy_terms(field, r).total)


def difference_step(r: float, low: float, high: float) -> float:
    """Шаг 10⁻³·r, уменьшенный так, чтобы хотя бы односторонний шаблон помещался в [low, high]"""
    h = DERIVATIVE_STEP * r
    while r + 4 * h > high and r - 4 * h < low:
        h /= 2.0
        if h < 1e-12 * r:
            raise GridRangeError(f"интервал [{low:.6g}, {high:.6g}] слишком узок для дифференцирования")
    return h


def _difference(func, r: float, h: float, low: float, high: float) -> float:
    """5-точечная производная: центральная внутри, односторонняя у краев сетки"""
    if r - 2 * h >= low and r + 2 * h <= high:
        return five_point_derivative(func, r, h)
    sign = 1.0 if r + 4 * h <= high else -1.0
    values = [func(r + sign * k * h) for k in range(5)]
    return sign * (-25 * values[0] + 48 * values[1] - 36 * values[2] + 16 * values[3] - 3 * values[4]) / (12.0 * h)


def energy_radial_unexpanded(field: RadialField, r: float) -> float:
    """
    E по исходному определению: производные граничных членов берутся численно

    Независимая проверка аналитического раскрытия в energy_radial.
    """
    field.params.require_supercritical('energy_radial_unexpanded')
    check_radius(field, r, 'energy_radial_unexpanded')
    sigma = scaling_exponent(field)
    n = field.n
    omega = sphere_area(n)
    coef = 0.5 * sigma * (n - 2 - sigma)

    def u_sphere(x):
        return omega * x ** (2 * sigma + 1) * float(field.state(x).u) ** 2

    def w_sphere(x):
        s = field.state(x)
        return omega * x ** (2 * sigma) * float(sigma * s.u / x + s.du) ** 2

    low, high = lowest_energy_radius(field), field.r_max
    h = difference_step(r, low, high)
    s = field.state(r)
    volume = omega * r ** (2 * sigma + 4 - n) * float(s.vol)
    sphere_term = coef * omega * r ** (2 * sigma) * float(s.u) ** 2
    return float(
        volume
        + sphere_term
        + coef * _difference(u_sphere, r, h, low, high)
        + 0.5 * r ** 3 * _difference(w_sphere, r, h, low, high)
    )


@dataclass(frozen=True, eq=False)
class EnergyProfile:
    """E(r), dE/dr и нижняя граница производной на наборе радиусов"""

    radii: np.ndarray
    E: np.ndarray
    dE: np.ndarray
    lower_bound: np.ndarray
    slack: np.ndarray

    @property
    def monotone(self) -> bool:
        return bool(np.all(self.dE >= -self.slack))

    @property
    def bound_holds(self) -> bool:
        return bool(np.all(self.dE >= self.lower_bound - self.slack))

    @property
    def min_defect(self) -> float:
        """min(dE - lowerBound); отрицательные значения в пределах slack допустимы"""
        return float(np.min(self.dE - self.lower_bound))

    def assert_monotone(self):
        if not self.monotone:
            index = int(np.argmin(self.dE + self.slack))
            raise VerificationFailure(
                f"E убывает при r={self.radii[index]:.6g}: dE={self.dE[index]:.3e}, slack={self.slack[index]:.3e}"
            )
        if not self.bound_holds:
            index = int(np.argmin(self.dE - self.lower_bound + self.slack))
            raise VerificationFailure(
                f"нарушена нижняя граница при r={self.radii[index]:.6g}: "
                f"dE - bound = {self.dE[index] - self.lower_bound[index]:.3e}"
            )


def build_profile(field: RadialField, radii, sigma: float, constant: float, rel_tol: float) -> EnergyProfile:
    """Общий расчет профиля для любого масштабного показателя σ и константы c нижней границы"""
    radii = np.asarray(radii, dtype=float)
    check_radius(field, radii, 'energy_profile')
    low, high = lowest_energy_radius(field), field.r_max

    def energy(x):
        return float(energy_terms(field, x, sigma).total)

    E = np.empty_like(radii)
    dE = np.empty_like(radii)
    slack = np.empty_like(radii)
    for i, r in enumerate(radii):
        terms = energy_terms(field, r, sigma)
        E[i] = float(terms.total)
        h = difference_step(r, low, high)
        dE[i] = _difference(energy, r, h, low, high)
        tol_energy = 100.0 * rel_tol * float(terms.magnitude)
        slack[i] = 10.0 * tol_energy / h

    lower_bound = constant * defect_density(field, radii, sigma)
    return EnergyProfile(radii=radii, E=E, dE=dE, lower_bound=np.asarray(lower_bound, dtype=float), slack=slack)


def energy_profile(field: RadialField, radii, rel_tol: Optional[float] = None) -> EnergyProfile:
    """
    Профиль E с производной и нижней границей cNP·ω r^{2γ+1}(γu/r + u')²

    Args:
        field: Решение Δ²u = |u|^{p-1}u
        radii: Радиусы внутри сетки
        rel_tol: Относительный допуск интегратора, из которого строится slack

    Returns:
        EnergyProfile; нарушения монотонности логируются, но не бросаются
    """
    params: ProblemParams = field.params
    params.require_supercritical('energy_profile')
    if not isinstance(field.nonlinearity, PowerNonlinearity):
        raise DomainError("energy_profile определена только для |u|^{p-1}u")
    constants = derive_constants(params)
    rel_tol = Config.REL_TOL if rel_tol is None else rel_tol
    profile = build_profile(field, radii, constants.gamma, constants.cNP, rel_tol)
    if not (profile.monotone and profile.bound_holds):
        logger.warning(
            f"Профиль энергии n={params.n}, p={params.p}: monotone={profile.monotone}, "
            f"min(dE - bound)={profile.min_defect:.3e}"
        )
    return profile
