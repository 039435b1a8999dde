"""
Независимые проверки: конечно-разностная невязка и квадратичная форма устойчивости
"""
import logging
from typing import List, Tuple

import numpy as np
from scipy import integrate

from src.errors import SupportViolation, TooFewSamples
from src.exponents.constants import sphere_area
from src.radialode.field import RadialField
from src.radialode.stencils import centered_derivatives, radial_laplacian

logger = logging.getLogger(__name__)

# Насколько малы должны быть значения пробной функции на краях ее сетки
SUPPORT_RTOL = 1e-12


def _interior_residuals(field: RadialField) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if len(field) < 5:
        raise TooFewSamples(f"невязка требует ≥ 5 узлов, получено {len(field)}")
    n = field.n
    r = field.radii[2:-2]
    d_u = centered_derivatives(field.u, field.radii, order=1)[0]
    d_du = centered_derivatives(field.du, field.radii, order=1)[0]
    d_dv = centered_derivatives(field.dv, field.radii, order=1)[0]
    u = field.u[2:-2]
    slope_residual = d_u - field.du[2:-2]
    laplacian_residual = d_du + (n - 1) * field.du[2:-2] / r - field.v[2:-2]
    equation_residual = d_dv + (n - 1) * field.dv[2:-2] / r - field.nonlinearity.force(u)
    return slope_residual, laplacian_residual, equation_residual


def residual(field: RadialField) -> float:
    """
    max |Δ²u - f(u)| во внутренних узлах по конечным разностям

    Все столбцы проверяются независимо: u' = du, Δu = v и Δv = f(u).
    """
    return float(max(np.max(np.abs(part)) for part in _interior_residuals(field)))


def residual_scale(field: RadialField) -> float:
    """1 + max(|f(u)|, |v|) во внутренних узлах"""
    u = field.u[2:-2]
    return float(1.0 + max(np.max(np.abs(field.nonlinearity.force(u))), np.max(np.abs(field.v[2:-2]))))


def relative_residual(field: RadialField) -> float:
    return residual(field) / residual_scale(field)


def stability_form(field: RadialField, radii, phi) -> float:
    """
    Λ_u(φ) = ∫|Δφ|² - ∫f'(u)φ² по мере ω r^{n-1} dr

    Args:
        field: Радиальное решение
        radii: Сетка пробной функции (внутри сетки поля)
        phi: Значения φ, обращающиеся в ноль на обоих краях

    Returns:
        Значение квадратичной формы
    """
    radii = np.asarray(radii, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if radii.shape != phi.shape:
        raise SupportViolation("сетка и значения пробной функции разной длины")
    if not field.contains(radii):
        raise SupportViolation(
            f"носитель пробной функции [{radii[0]:.4g}, {radii[-1]:.4g}] выходит за сетку поля "
            f"[{field.r_min:.4g}, {field.r_max:.4g}]"
        )
    peak = np.max(np.abs(phi))
    if peak == 0:
        return 0.0
    if abs(phi[0]) > SUPPORT_RTOL * peak or abs(phi[-1]) > SUPPORT_RTOL * peak:
        raise SupportViolation("пробная функция не обращается в ноль на краях своей сетки")

    n = field.n
    u = field.state(radii).u
    lap_phi = radial_laplacian(phi, radii, n)
    weight = radii ** (n - 1)

    # интегрирование по log r: dr = r·d(log r)
    log_r = np.log(radii)
    kinetic = integrate.simpson(lap_phi ** 2 * weight * radii, x=log_r)
    potential = integrate.simpson(field.nonlinearity.derivative(u) * phi ** 2 * weight * radii, x=log_r)
    return float(sphere_area(n) * (kinetic - potential))


def smooth_step(x: np.ndarray) -> np.ndarray:
    """Бесконечно гладкая ступенька: 0 при x ≤ 0, 1 при x ≥ 1"""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        left = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        right = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return left / (left + right)


def hardy_rellich_profile(
    n: int,
    log_inner: float,
    log_outer: float,
    width: float = 2.0,
    shift: float = 0.0,
    samples_per_decade: int = 400,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Усеченный почти-экстремал неравенства Харди–Реллиха

    φ = r^{-(n-4)/2 + shift}·η(log r), η = 1 на [log_inner, log_outer]
    и гладко спадает до нуля на отрезках длины width.
    """
    t_start, t_end = log_inner - width, log_outer + width
    decades = (t_end - t_start) / np.log(10.0)
    count = max(int(decades * samples_per_decade) + 1, 20)
    t = np.linspace(t_start, t_end, count)
    cutoff = smooth_step((t - t_start) / width) * smooth_step((t_end - t) / width)
    radii = np.exp(t)
    return radii, radii ** (-(n - 4) / 2.0 + shift) * cutoff


def hardy_rellich_family(n: int, count: int = 20) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Набор пробных функций с разными плато, ширинами спада и сдвигами показателя"""
    family = []
    plateaus = (1.0, 2.0, 4.0, 6.0, 8.0)
    widths = (1.0, 2.0)
    shifts = (0.0, 0.5)
    for plateau in plateaus:
        for width in widths:
            for shift in shifts:
                family.append(hardy_rellich_profile(n, -plateau / 2, plateau / 2, width, shift))
                if len(family) == count:
                    return family
    return family
