"""
Растяжения u^λ(r) = λ^σ u(λr) и отклонение от однородности
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np
from scipy import integrate, interpolate

from src.energy.monotonicity import defect_density, energy_terms, scaling_exponent
from src.errors import DomainError
from src.radialode.field import GRID_RTOL, FieldState, RadialField

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RescaledField:
    """Исходное поле, коэффициент λ и растянутое поле на сетке base.radii/λ"""

    base: RadialField
    lam: float
    field: RadialField


def _scaled_state(state: FieldState, lam: float, sigma: float, n: int) -> FieldState:
    volume_weight = lam ** (2 * sigma + 4 - n)
    return FieldState(
        lam ** sigma * state.u,
        lam ** (sigma + 1) * state.du,
        lam ** (sigma + 2) * state.v,
        lam ** (sigma + 3) * state.dv,
        volume_weight * state.vol,
        volume_weight * state.vsq,
    )


def _grid_pattern(base: np.ndarray, stretched: np.ndarray) -> np.ndarray:
    """Узлы базовой сетки внутри растянутого отрезка; вне базового диапазона - растянутые узлы"""
    low, high = stretched[0], stretched[-1]
    nodes = np.unique(np.concatenate((
        stretched[stretched < base[0]],
        base[(base > low) & (base < high)],
        stretched[stretched > base[-1]],
        [low, high],
    )))
    distinct = np.concatenate(([True], np.diff(nodes) > GRID_RTOL * nodes[1:]))
    nodes = nodes[distinct]
    nodes[-1] = high
    return nodes


def rescale(field: RadialField, lam: float) -> RescaledField:
    """
    Растянутое поле u^λ

    Столбцы переносятся на узлы исходной сетки внутри [r_min/λ, r_max/λ];
    state() использует плотный вывод исходного поля без потери точности.

    Args:
        field: Решение с масштабной инвариантностью (σ = 4/(p-1) или -4/(p+1))
        lam: λ > 0

    Returns:
        RescaledField
    """
    if lam <= 0:
        raise DomainError(f"λ должно быть положительным, получено {lam}")
    sigma = scaling_exponent(field)
    n = field.n
    base_evaluator = field.evaluator

    def evaluator(points):
        return _scaled_state(base_evaluator(lam * np.asarray(points, dtype=float)), lam, sigma, n)

    scaled = _scaled_state(
        FieldState(field.u, field.du, field.v, field.dv, field.vol, field.vsq), lam, sigma, n
    )
    stretched = RadialField(
        params=field.params,
        nonlinearity=field.nonlinearity,
        radii=field.radii / lam,
        u=scaled.u,
        du=scaled.du,
        v=scaled.v,
        dv=scaled.dv,
        vol=scaled.vol,
        vsq=scaled.vsq,
        evaluator=evaluator,
        origin_start=field.origin_start / lam,
        event=field.event,
    )
    pattern = _grid_pattern(field.radii, stretched.radii)
    return RescaledField(base=field, lam=lam, field=resample(stretched, pattern, keep_dense=True))


def resample(field: RadialField, radii, keep_dense: bool = False) -> RadialField:
    """
    Перенос всех столбцов на новую сетку монотонной кубической интерполяцией (PCHIP)

    В узлах, совпадающих с узлами поля, значения копируются без изменений.
    keep_dense=True сохраняет плотный вывод поля, иначе он строится заново по новым узлам.
    """
    radii = np.asarray(radii, dtype=float)
    field.require_inside(radii, 'resample')
    radii = np.clip(radii, field.r_min, field.r_max)
    index = np.minimum(np.searchsorted(field.radii, radii), len(field.radii) - 1)
    shared = field.radii[index] == radii
    columns = {}
    for name in ('u', 'du', 'v', 'dv', 'vol', 'vsq'):
        original = getattr(field, name)
        values = interpolate.PchipInterpolator(field.radii, original)(radii)
        values[shared] = original[index[shared]]
        columns[name] = values
    if keep_dense:
        return replace(field, radii=radii, **columns)
    return RadialField.from_samples(
        field.params,
        radii,
        nonlinearity=field.nonlinearity,
        origin_start=field.origin_start,
        event=field.event,
        **columns,
    )


def homogeneity_deviation(field: RadialField, r1: float, r2: float) -> float:
    """
    ∫_{r1}^{r2} ω r^{2σ+1}(σu/r + u')² dr

    Обращается в ноль ровно тогда, когда u однородно на [r1, r2].
    """
    if not r1 < r2:
        raise DomainError(f"требуется r1 < r2, получено [{r1}, {r2}]")
    field.require_inside([r1, r2], 'homogeneity_deviation')
    value, _ = integrate.quad(
        lambda r: float(defect_density(field, r)),
        r1,
        r2,
        limit=200,
        epsabs=0.0,
        epsrel=1e-10,
    )
    return float(value)


@dataclass(frozen=True)
class BlowdownSample:
    """Отклонение от однородности и приращение энергии растянутого поля на [r1, r2]"""

    lam: float
    deviation: float
    energy_gap: float


def blowdown_trend(field: RadialField, lambdas: Sequence[float], r1: float = 1.0, r2: float = 2.0) -> List[BlowdownSample]:
    """
    Последовательность растяжений на фиксированном кольце [r1, r2]

    Убывание отклонения с ростом λ только логируется.
    """
    samples = []
    for lam in sorted(lambdas):
        rescaled = rescale(field, lam).field
        gap = float(energy_terms(rescaled, r2).total - energy_terms(rescaled, r1).total)
        samples.append(BlowdownSample(lam=lam, deviation=homogeneity_deviation(rescaled, r1, r2), energy_gap=gap))
    deviations = [sample.deviation for sample in samples]
    if all(later <= earlier * (1 + 1e-8) for earlier, later in zip(deviations, deviations[1:])):
        logger.info(f"Отклонение от однородности не растет по λ на [{r1}, {r2}]")
    else:
        logger.warning(f"Отклонение от однородности не монотонно по λ: {deviations}")
    return samples
