"""
Калибровка целых радиальных решений методом стрельбы по b = Δu(0)
"""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from src.config import Config
from src.errors import BracketNotFound, DomainError
from src.exponents.constants import ProblemParams, derive_constants
from src.radialode.field import RadialField
from src.radialode.integrator import (
    EVENT_BLOWUP,
    EVENT_CROSSING,
    EVENT_NONE,
    IntegrationConfig,
    integrate,
)

logger = logging.getLogger(__name__)

# Граница доверия: траектории концов интервала расходятся больше, чем на эту долю
TRUST_SEPARATION = 1e-3

# Пробные траектории интегрируются до r_max·CLASSIFY_REACH, пока не сработает событие
CLASSIFY_REACH = 1e4

# Хвост убывает степенным образом: абсолютный допуск не должен скрывать Δu и (Δu)'
FINE_ABS_TOL = 1e-200

MAX_DOUBLINGS = 60
MAX_BISECTIONS = 200


@dataclass(frozen=True, eq=False)
class ShootingResult:
    """
    Итог стрельбы для u(0) = a

    trust_radius может превышать r_max поля: поле обрезается по min(trust_radius, r_max).
    """

    a: float
    b_star: float
    field: RadialField
    decay_exponent: float
    bracket: Tuple[float, float]
    trust_radius: float
    bracket_events: Tuple[str, str]
    amplitude_ratio: float
    iterations: int
    converged: bool

    @property
    def expected_decay(self) -> float:
        return -derive_constants(self.field.params).gamma


@dataclass(frozen=True, eq=False)
class _Bracket:
    """Интервал [lo, hi] с траекториями концов для нормированной задачи a = 1"""

    lo: float
    hi: float
    lo_field: RadialField
    hi_field: RadialField
    iterations: int

    @property
    def width(self) -> float:
        return abs(self.hi - self.lo)


def decay_fit(field: RadialField) -> float:
    """Наклон log|u| от log r на последней декаде сетки"""
    window = field.radii >= field.r_max / 10.0
    if np.count_nonzero(window) < 2 or np.any(field.u[window] == 0):
        logger.warning("Недостаточно точек для оценки скорости убывания")
        return float('nan')
    slope, _ = np.polyfit(np.log(field.radii[window]), np.log(np.abs(field.u[window])), 1)
    return float(slope)


def _trust_radius(low: RadialField, high: RadialField) -> float:
    """Первый радиус, где u на концах интервала расходятся больше TRUST_SEPARATION"""
    r_end = min(low.r_max, high.r_max)
    radii = low.radii[low.radii <= r_end]
    u_low = low.state(radii).u
    u_high = high.state(radii).u
    scale = np.maximum(np.abs(u_low), np.abs(u_high))
    separated = np.abs(u_high - u_low) > TRUST_SEPARATION * scale
    if not np.any(separated):
        return float(r_end)
    index = int(np.argmax(separated))
    return float(radii[max(index - 1, 1)])


def _fine(cfg: IntegrationConfig) -> IntegrationConfig:
    return replace(cfg, abs_tol=min(cfg.abs_tol, FINE_ABS_TOL))


def _classify(params: ProblemParams, b: float, cfg: IntegrationConfig) -> RadialField:
    """Траектория a = 1 до первого события; 'none' значит, что b неотличим от b* на этом радиусе"""
    return integrate(params, 1.0, b, cfg)


def _bracket_normalized(params: ProblemParams, cfg: IntegrationConfig, tolerance: float) -> _Bracket:
    """Бисекция для a = 1 между пересечением нуля (lo) и взрывом (hi)"""
    reach = replace(_fine(cfg), r_max=cfg.r_max * CLASSIFY_REACH)

    hi = 0.0
    hi_field = _classify(params, hi, reach)
    if hi_field.event != EVENT_BLOWUP:
        raise BracketNotFound(
            f"при b=0 ожидался взрыв до r={reach.r_max:.3g}, получено событие '{hi_field.event}' (увеличьте r_max)"
        )

    lo = -1.0
    lo_field = _classify(params, lo, reach)
    doublings = 0
    while lo_field.event != EVENT_CROSSING:
        if lo_field.event == EVENT_BLOWUP:
            hi, hi_field = lo, lo_field
        # 'none' не сдвигает hi: сторона b* для этой точки неизвестна
        lo *= 2.0
        doublings += 1
        if doublings > MAX_DOUBLINGS:
            raise BracketNotFound(f"не найдено b с пересечением нуля вплоть до b={lo:.3g}")
        lo_field = _classify(params, lo, reach)

    logger.info(f"Интервал стрельбы найден: [{lo:.6g}, {hi:.6g}] (n={params.n}, p={params.p})")

    iterations = 0
    while abs(hi - lo) > tolerance * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or iterations >= MAX_BISECTIONS:
            break
        iterations += 1
        trial = _classify(params, mid, reach)
        logger.debug(f"bisection #{iterations}: b={mid!r} -> {trial.event} at r={trial.r_max:.4g}")
        if trial.event == EVENT_CROSSING:
            lo, lo_field = mid, trial
        elif trial.event == EVENT_BLOWUP:
            hi, hi_field = mid, trial
        else:
            logger.warning(
                f"⚠️ b={mid!r} не классифицирован до r={reach.r_max:.3g}: "
                f"разрешение интегратора исчерпано при ширине {abs(hi - lo):.3e}"
            )
            break

    return _Bracket(lo=lo, hi=hi, lo_field=lo_field, hi_field=hi_field, iterations=iterations)


def shoot_entire(
    params: ProblemParams,
    a: float,
    cfg: Optional[IntegrationConfig] = None,
    tolerance: Optional[float] = None,
) -> ShootingResult:
    """
    Найти Δu(0) = b*, отделяющий пересечение нуля от взрыва

    Бисекция ведется для a = 1, результат переносится масштабированием
    b*(a) = a^{1+2/γ}·b*(1), u_a(r) = a·u_1(a^{1/γ} r).

    Args:
        params: Суперкритическая пара (n, p)
        a: u(0) > 0
        cfg: Настройки интегратора
        tolerance: Относительная ширина итогового интервала

    Returns:
        ShootingResult с полем, обрезанным по радиусу доверия
    """
    params.require_supercritical('shoot_entire')
    if a <= 0:
        raise DomainError(f"shoot_entire: требуется a > 0, получено a={a}")
    cfg = cfg or IntegrationConfig.from_config()
    tolerance = tolerance if tolerance is not None else Config.SHOOTING_TOL
    gamma = derive_constants(params).gamma

    bracket = _bracket_normalized(params, cfg, tolerance)
    converged = bracket.width <= tolerance * max(abs(bracket.lo), abs(bracket.hi))

    b_scale = a ** (1.0 + 2.0 / gamma)
    r_scale = a ** (-1.0 / gamma)
    b_star = b_scale * 0.5 * (bracket.lo + bracket.hi)
    trust = r_scale * _trust_radius(bracket.lo_field, bracket.hi_field)
    r_end = min(trust, cfg.r_max)
    if r_end <= cfg.origin_start * 2.0:
        raise BracketNotFound(f"радиус доверия {trust:.3g} не выходит за origin_start={cfg.origin_start:.3g}")

    final = integrate(params, a, b_star, replace(_fine(cfg), r_max=r_end))
    field = final.restricted(min(r_end, final.r_max))

    amplitude = derive_constants(params).singular_amplitude
    tail = field.radii >= field.r_max / 10.0
    amplitude_ratio = float(np.mean(field.u[tail] * field.radii[tail] ** gamma) / amplitude)

    result = ShootingResult(
        a=a,
        b_star=b_star,
        field=field,
        decay_exponent=decay_fit(field),
        bracket=(b_scale * bracket.lo, b_scale * bracket.hi),
        trust_radius=trust,
        bracket_events=(bracket.lo_field.event, bracket.hi_field.event),
        amplitude_ratio=amplitude_ratio,
        iterations=bracket.iterations,
        converged=converged,
    )
    logger.info(
        f"b* = {b_star!r} за {bracket.iterations} итераций; радиус доверия {trust:.4g}, "
        f"наклон хвоста {result.decay_exponent:.4f} (ожидается {-gamma:.4f})"
    )
    if not converged:
        logger.warning(f"⚠️ Ширина интервала {bracket.width:.3e} больше допуска {tolerance:.1e}")
    return result
