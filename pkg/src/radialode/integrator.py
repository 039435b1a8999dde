"""
Интегрирование радиальной редукции Δ²u = f(u) и точные степенные решения
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from src.config import Config
from src.errors import DomainError, IntegrationFailure
from src.exponents.constants import ProblemParams, derive_constants, negative_scaling_constants
from src.radialode.field import FieldState, Nonlinearity, RadialField
from src.radialode.nonlinearity import NegativePowerNonlinearity, PowerNonlinearity

logger = logging.getLogger(__name__)

EVENT_NONE = 'none'
EVENT_CROSSING = 'crossing'
EVENT_BLOWUP = 'blowup'


@dataclass(frozen=True)
class IntegrationConfig:
    """Настройки интегратора; blowup_threshold=None означает BLOWUP_FACTOR·|a|"""

    origin_start: float = 1e-6
    blowup_threshold: Optional[float] = None
    rel_tol: float = 1e-12
    abs_tol: float = 1e-30
    r_max: float = 100.0
    samples_per_decade: int = 200
    blowup_factor: float = 1e6

    def __post_init__(self):
        if not 0 < self.origin_start < 1e-2:
            raise DomainError(f"origin_start должен быть в (0, 1e-2), получено {self.origin_start}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("допуски интегратора должны быть положительными")
        if self.r_max <= self.origin_start:
            raise DomainError(f"r_max={self.r_max} должен превышать origin_start={self.origin_start}")
        if self.samples_per_decade < 2:
            raise DomainError("samples_per_decade должен быть ≥ 2")
        if self.blowup_threshold is not None and self.blowup_threshold <= 0:
            raise DomainError("порог взрыва должен быть положительным")

    @classmethod
    def from_config(cls, **overrides) -> 'IntegrationConfig':
        """Значения по умолчанию из Config, отдельные поля можно переопределить"""
        values = dict(
            origin_start=Config.ORIGIN_START,
            rel_tol=Config.REL_TOL,
            abs_tol=Config.ABS_TOL,
            r_max=Config.R_MAX,
            samples_per_decade=Config.SAMPLES_PER_DECADE,
            blowup_factor=Config.BLOWUP_FACTOR,
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def threshold_for(self, a: float) -> float:
        if self.blowup_threshold is not None:
            return self.blowup_threshold
        return self.blowup_factor * (abs(a) if a != 0 else 1.0)


def output_grid(r_start: float, r_end: float, samples_per_decade: int) -> np.ndarray:
    """Геометрическая сетка с заданной плотностью на декаду, концы включены"""
    decades = np.log10(r_end / r_start)
    count = max(int(np.ceil(decades * samples_per_decade)) + 1, 5)
    grid = np.geomspace(r_start, r_end, count)
    grid[0], grid[-1] = r_start, r_end
    return grid


def _system(n: int, nonlinearity: Nonlinearity):
    """
    Правая часть для состояния [u, u', v, v', W, Z]

    W = r^{-n}·vol и Z = r^{-n}·vsq: масштабированные интегралы
    сохраняют относительную точность и у начала, и на хвосте.
    """

    def rhs(r, y):
        u, du, v, dv, W, Z = y
        force = nonlinearity.force(u)
        density = 0.5 * v * v - nonlinearity.potential(u)
        return [
            du,
            v - (n - 1) * du / r,
            dv,
            force - (n - 1) * dv / r,
            (density - n * W) / r,
            (v * v - n * Z) / r,
        ]

    return rhs


def taylor_start(n: int, nonlinearity: Nonlinearity, a: float, b: float, r0: float) -> np.ndarray:
    """Начальное состояние при r = r₀ из разложения u ≈ a + b r²/(2n), v ≈ b + f(a) r²/(2n)"""
    fa = float(nonlinearity.force(a))
    return np.array([
        a + b * r0 ** 2 / (2 * n),
        b * r0 / n,
        b + fa * r0 ** 2 / (2 * n),
        fa * r0 / n,
        (0.5 * b * b - float(nonlinearity.potential(a))) / n,
        b * b / n,
    ])


def _unscale(n: int, r, y) -> FieldState:
    scale = np.asarray(r, dtype=float) ** n
    return FieldState(y[0], y[1], y[2], y[3], y[4] * scale, y[5] * scale)


def integrate(
    params: ProblemParams,
    a: float,
    b: float,
    cfg: Optional[IntegrationConfig] = None,
    nonlinearity: Optional[Nonlinearity] = None,
    stop_on_crossing: bool = True,
) -> RadialField:
    """
    Проинтегрировать радиальную систему от r₀ до r_max или до первого события

    Args:
        params: Пара (n, p)
        a: u(0)
        b: Δu(0)
        cfg: Настройки интегратора
        nonlinearity: Правая часть (по умолчанию |u|^{p-1}u)
        stop_on_crossing: Останавливаться ли при смене знака u

    Returns:
        RadialField с плотным выводом; event - 'none', 'crossing' или 'blowup'
    """
    cfg = cfg or IntegrationConfig.from_config()
    nonlinearity = nonlinearity or PowerNonlinearity(params.p)
    n = params.n
    r0 = cfg.origin_start

    if a == 0 and b == 0 and isinstance(nonlinearity, PowerNonlinearity):
        return _zero_field(params, nonlinearity, cfg)

    threshold = cfg.threshold_for(a)

    def blowup_event(r, y):
        return threshold - max(abs(y[0]), abs(y[2]))

    blowup_event.terminal = True
    blowup_event.direction = -1

    events = [blowup_event]
    if stop_on_crossing:
        def crossing_event(r, y):
            return y[0]

        crossing_event.terminal = True
        crossing_event.direction = -np.sign(a) if a != 0 else 0
        events.append(crossing_event)

    y0 = taylor_start(n, nonlinearity, a, b, r0)
    try:
        solution = solve_ivp(
            _system(n, nonlinearity),
            (r0, cfg.r_max),
            y0,
            method='DOP853',
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            dense_output=True,
            events=events,
        )
    except (FloatingPointError, DomainError) as e:
        raise IntegrationFailure(f"интегрирование прервано при a={a}, b={b}: {e}") from e

    if solution.status == -1:
        raise IntegrationFailure(f"интегратор остановился (a={a}, b={b}): {solution.message}")
    if not np.all(np.isfinite(solution.y)):
        raise IntegrationFailure(f"в решении появились NaN/inf (a={a}, b={b})")

    event = EVENT_NONE
    if solution.status == 1:
        if len(solution.t_events[0]):
            event = EVENT_BLOWUP
        elif stop_on_crossing and len(solution.t_events[1]):
            event = EVENT_CROSSING

    r_end = float(solution.t[-1])
    if r_end <= r0 * (1.0 + 1e-9):
        raise IntegrationFailure(f"событие {event} сработало сразу у начала (a={a}, b={b})")

    radii = output_grid(r0, r_end, cfg.samples_per_decade)
    dense = solution.sol

    def evaluator(points):
        return _unscale(n, points, dense(points))

    state = evaluator(radii)
    logger.debug(f"integrate n={n} a={a} b={b!r}: r_end={r_end:.6g}, event={event}, шагов={len(solution.t)}")
    return RadialField(
        params=params,
        nonlinearity=nonlinearity,
        radii=radii,
        u=state.u,
        du=state.du,
        v=state.v,
        dv=state.dv,
        vol=state.vol,
        vsq=state.vsq,
        evaluator=evaluator,
        origin_start=r0,
        event=event,
    )


def _zero_field(params: ProblemParams, nonlinearity: Nonlinearity, cfg: IntegrationConfig) -> RadialField:
    radii = output_grid(cfg.origin_start, cfg.r_max, cfg.samples_per_decade)
    zeros = np.zeros_like(radii)

    def evaluator(points):
        empty = np.zeros_like(np.asarray(points, dtype=float))
        return FieldState(empty, empty, empty, empty, empty, empty)

    return RadialField(
        params=params,
        nonlinearity=nonlinearity,
        radii=radii,
        u=zeros,
        du=zeros,
        v=zeros,
        dv=zeros,
        vol=zeros,
        vsq=zeros,
        evaluator=evaluator,
        origin_start=cfg.origin_start,
        event=EVENT_NONE,
    )


def power_field(
    params: ProblemParams,
    exponent: float,
    amplitude: float,
    grid,
    nonlinearity: Optional[Nonlinearity] = None,
) -> RadialField:
    """
    Точная выборка степенного профиля C·r^m со всеми производными

    Объемные интегралы берутся в замкнутом виде; они сходятся у нуля,
    только если показатели степеней подынтегральных выражений больше -1.
    """
    nonlinearity = nonlinearity or PowerNonlinearity(params.p)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0):
        raise DomainError("сетка степенного профиля не должна содержать 0")
    n, m, C = params.n, exponent, amplitude
    p = params.p

    if isinstance(nonlinearity, PowerNonlinearity):
        potential_coef, potential_power = abs(C) ** (p + 1) / (p + 1), m * (p + 1)
    elif isinstance(nonlinearity, NegativePowerNonlinearity):
        if C <= 0:
            raise DomainError("для отрицательного показателя амплитуда должна быть положительной")
        potential_coef, potential_power = C ** (1 - p) / (p - 1), m * (1 - p)
    else:
        raise DomainError(f"степенной профиль не определен для нелинейности {nonlinearity.name}")

    lap_coef = C * m * (m + n - 2)
    kinetic_power = n + 2 * m - 4
    potential_total = n + potential_power

    def primitive(coef, power, r):
        if coef == 0:
            return np.zeros_like(r)
        if power <= 0:
            raise DomainError(f"объемный интеграл расходится у нуля: показатель {power} ≤ 0")
        return coef * r ** power / power

    def evaluator(points):
        r = np.asarray(points, dtype=float)
        vol = primitive(0.5 * lap_coef ** 2, kinetic_power, r) - primitive(potential_coef, potential_total, r)
        return FieldState(
            C * r ** m,
            C * m * r ** (m - 1),
            lap_coef * r ** (m - 2),
            lap_coef * (m - 2) * r ** (m - 3),
            vol,
            primitive(lap_coef ** 2, kinetic_power, r),
        )

    state = evaluator(grid)
    return RadialField(
        params=params,
        nonlinearity=nonlinearity,
        radii=grid,
        u=state.u,
        du=state.du,
        v=state.v,
        dv=state.dv,
        vol=state.vol,
        vsq=state.vsq,
        evaluator=evaluator,
        origin_start=0.0,
        event='exact',
    )


def singular_field(params: ProblemParams, grid) -> RadialField:
    """
    Сингулярное решение u_s = K0^{1/(p-1)} r^{-4/(p-1)}

    Args:
        params: Суперкритическая пара (n, p)
        grid: Положительные радиусы

    Returns:
        Точная выборка u_s и производных
    """
    params.require_supercritical('singular_field')
    constants = derive_constants(params)
    return power_field(params, -constants.gamma, constants.singular_amplitude, grid)


def negative_homogeneous_field(params: ProblemParams, grid) -> RadialField:
    """Однородное решение C·r^{4/(p+1)} уравнения Δ²u = -u^{-p}"""
    scaling = negative_scaling_constants(params)
    return power_field(
        params,
        scaling.mu,
        scaling.homogeneous_amplitude,
        grid,
        nonlinearity=NegativePowerNonlinearity(params.p),
    )
