"""
Радиальное поле: u, u', Δu, (Δu)' на сетке и накопленные объемные интегралы
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy import integrate, interpolate

from src.errors import GridRangeError, InputFormatError
from src.exponents.constants import ProblemParams
from src.radialode.nonlinearity import (
    NavierNonlinearity,
    NegativePowerNonlinearity,
    PowerNonlinearity,
)

logger = logging.getLogger(__name__)

Nonlinearity = Union[PowerNonlinearity, NegativePowerNonlinearity, NavierNonlinearity]

# Допуск при проверке попадания радиуса в сетку
GRID_RTOL = 1e-12


class FieldState(NamedTuple):
    """Значения поля в точке (или в массиве точек)"""

    u: np.ndarray
    du: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    vol: np.ndarray
    vsq: np.ndarray


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RadialField:
    """
    Радиальное решение Δ²u = f(u) на сетке radii

    vol - накопленный интеграл ∫₀^r (½v² - F(u)) s^{n-1} ds,
    vsq - накопленный интеграл ∫₀^r v² s^{n-1} ds.
    evaluator(r) возвращает FieldState в произвольных точках сетки
    (плотный вывод интегратора или эрмитов сплайн по узлам).
    """

    params: ProblemParams
    nonlinearity: Nonlinearity
    radii: np.ndarray
    u: np.ndarray
    du: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    vol: np.ndarray
    vsq: np.ndarray
    evaluator: Callable[[np.ndarray], FieldState] = field(repr=False, default=None)
    origin_start: float = 0.0
    event: str = 'none'

    def __post_init__(self):
        radii = _frozen(self.radii)
        if radii.ndim != 1 or len(radii) < 2:
            raise InputFormatError("сетка поля должна быть одномерной и содержать ≥ 2 узлов")
        if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
            raise InputFormatError("радиусы должны быть положительными и строго возрастать")
        object.__setattr__(self, 'radii', radii)
        for name in ('u', 'du', 'v', 'dv', 'vol', 'vsq'):
            column = _frozen(getattr(self, name))
            if column.shape != radii.shape:
                raise InputFormatError(
                    f"столбец {name}: длина {column.shape} не совпадает с сеткой {radii.shape}"
                )
            object.__setattr__(self, name, column)
        if self.evaluator is None:
            object.__setattr__(self, 'evaluator', _hermite_evaluator(self))

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def r_min(self) -> float:
        return float(self.radii[0])

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def __len__(self) -> int:
        return len(self.radii)

    def contains(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        low = self.r_min * (1.0 - GRID_RTOL)
        high = self.r_max * (1.0 + GRID_RTOL)
        return bool(np.all((r >= low) & (r <= high)))

    def require_inside(self, r, operation: str = 'evaluate'):
        if not self.contains(r):
            r = np.atleast_1d(r)
            raise GridRangeError(
                f"{operation}: радиусы [{r.min():.6g}, {r.max():.6g}] вне сетки "
                f"[{self.r_min:.6g}, {self.r_max:.6g}]"
            )

    def state(self, r) -> FieldState:
        """Значения всех столбцов в точках r (внутри сетки)"""
        self.require_inside(r, 'state')
        r = np.clip(np.asarray(r, dtype=float), self.r_min, self.r_max)
        return self.evaluator(r)

    def second_derivative(self, r, du, v):
        """u'' = v - (n-1)u'/r"""
        return v - (self.n - 1) * du / r

    def restricted(self, r_end: float) -> 'RadialField':
        """То же поле, обрезанное справа радиусом r_end"""
        self.require_inside(r_end, 'restricted')
        radii = self.radii[self.radii < r_end]
        radii = np.append(radii, r_end)
        state = self.evaluator(radii)
        return replace(
            self,
            radii=radii,
            u=state.u,
            du=state.du,
            v=state.v,
            dv=state.dv,
            vol=state.vol,
            vsq=state.vsq,
        )

    def columns(self) -> dict:
        """Столбцы в порядке CSV-контракта"""
        return {
            'r': self.radii,
            'u': self.u,
            'du': self.du,
            'v': self.v,
            'dv': self.dv,
            'volInt': self.vol,
            'vsqInt': self.vsq,
        }

    @classmethod
    def from_samples(
        cls,
        params: ProblemParams,
        radii,
        u,
        du,
        v,
        dv,
        vol=None,
        vsq=None,
        nonlinearity: Optional[Nonlinearity] = None,
        origin_start: float = 0.0,
        event: str = 'samples',
    ) -> 'RadialField':
        """
        Поле по узловым значениям

        Недостающие объемные интегралы восстанавливаются квадратурой Симпсона;
        значение в первом узле берется из асимптотики r^n/n.
        """
        if nonlinearity is None:
            nonlinearity = PowerNonlinearity(params.p)
        radii = np.asarray(radii, dtype=float)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        n = params.n
        if vol is None:
            density = (0.5 * v ** 2 - nonlinearity.potential(u)) * radii ** (n - 1)
            vol = running_integral(radii, density, n)
        if vsq is None:
            vsq = running_integral(radii, v ** 2 * radii ** (n - 1), n)
        return cls(
            params=params,
            nonlinearity=nonlinearity,
            radii=radii,
            u=u,
            du=du,
            v=v,
            dv=dv,
            vol=vol,
            vsq=vsq,
            origin_start=origin_start,
            event=event,
        )


def running_integral(radii: np.ndarray, density: np.ndarray, n: int) -> np.ndarray:
    """∫₀^r density ds: начальное значение density(r₀)·r₀/n, дальше кумулятивный Симпсон"""
    initial = density[0] * radii[0] / n
    if len(radii) < 3:
        return initial + integrate.cumulative_trapezoid(density, radii, initial=0.0)
    return initial + integrate.cumulative_simpson(density, x=radii, initial=0.0)


def _hermite_evaluator(radial: RadialField) -> Callable[[np.ndarray], FieldState]:
    """
    Интерполянт по узлам

    Для u, v, u' и интегралов производные известны из определений,
    поэтому используется эрмитов сплайн; (Δu)' интерполируется кубическим сплайном.
    """
    r = radial.radii
    n = radial.n
    ddu = radial.second_derivative(r, radial.du, radial.v)
    vol_density = (0.5 * radial.v ** 2 - radial.nonlinearity.potential(radial.u)) * r ** (n - 1)
    vsq_density = radial.v ** 2 * r ** (n - 1)

    splines = (
        interpolate.CubicHermiteSpline(r, radial.u, radial.du),
        interpolate.CubicHermiteSpline(r, radial.du, ddu),
        interpolate.CubicHermiteSpline(r, radial.v, radial.dv),
        interpolate.CubicSpline(r, radial.dv) if len(r) > 3 else interpolate.interp1d(r, radial.dv),
        interpolate.CubicHermiteSpline(r, radial.vol, vol_density),
        interpolate.CubicHermiteSpline(r, radial.vsq, vsq_density),
    )

    def evaluate(points):
        return FieldState(*(np.asarray(spline(points), dtype=float) for spline in splines))

    return evaluate
