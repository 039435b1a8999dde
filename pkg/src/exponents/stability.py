"""
Предикаты устойчивости сингулярного решения и связанные проверки
"""
import logging
from typing import Tuple

import numpy as np

from src.errors import DomainError
from src.exponents.constants import (
    ProblemParams,
    derive_constants,
    hardy_rellich_constant,
    joseph_lundgren_exponent,
    singular_coefficient,
    sobolev_exponent,
)

logger = logging.getLogger(__name__)

# Относительный допуск на границе устойчивости: p = pC(n) должно давать
# одинаковый ответ во всех трех эквивалентных формулировках
BOUNDARY_RTOL = 1e-10


def _stability_condition(n: int, p: float) -> bool:
    """p·K0 ≤ n²(n-4)²/16 с допуском на границе"""
    gamma = 4.0 / (p - 1.0)
    hardy = hardy_rellich_constant(n)
    return p * singular_coefficient(gamma, n) <= hardy * (1.0 + BOUNDARY_RTOL)


def is_singular_solution_stable(params: ProblemParams) -> bool:
    """
    Устойчив ли сингулярный раствор u_s

    Args:
        params: Суперкритическая пара (n, p)

    Returns:
        True, если p·K0 ≤ n²(n-4)²/16
    """
    params.require_supercritical('is_singular_solution_stable')
    return _stability_condition(params.n, params.p)


def exceeds_joseph_lundgren(params: ProblemParams) -> bool:
    """p ≥ pC(n) с тем же допуском, что и основной предикат"""
    p_c = joseph_lundgren_exponent(params.n)
    if not p_c.is_finite:
        return False
    return params.p >= p_c.value * (1.0 - BOUNDARY_RTOL)


def min_stable_dimension(p: float) -> int:
    """
    Наименьшая размерность n_p, в которой u_s устойчив

    Условие n ≥ 5, p > (n+4)/(n-4) и p·K0 ≤ n²(n-4)²/16. Граница
    n²(n-4)²/16 = pγ(γ+2)(n-γ-4)(n-γ-2) - многочлен четвертой степени по n,
    поэтому кандидаты ищутся только у его вещественных корней и у порога
    суперкритичности n = 2γ+4. Правее наибольшего корня условие выполнено всегда.

    Args:
        p: Показатель (> 1)

    Returns:
        n_p
    """
    if p <= 1:
        raise DomainError(f"p должно быть > 1, получено {p}")
    gamma = 4.0 / (p - 1.0)
    quartic = np.polysub(
        np.polymul([1.0, -4.0, 0.0], [1.0, -4.0, 0.0]) / 16.0,
        p * gamma * (gamma + 2.0) * np.polymul([1.0, -(gamma + 4.0)], [1.0, -(gamma + 2.0)]),
    )
    lower = max(5.0, 2.0 * gamma + 4.0)
    roots = [float(root.real) for root in np.roots(quartic) if abs(root.imag) <= 1e-9 * max(1.0, abs(root))]
    starts = [lower] + sorted(root for root in roots if root > lower)

    for start in starts:
        first = max(5, int(np.floor(start)) - 1)
        for n in range(first, first + 4):
            if sobolev_exponent(n) < p and _stability_condition(n, p):
                return n
    raise DomainError(f"не удалось определить n_p для p={p}")


def stability_predicates(params: ProblemParams) -> Tuple[bool, bool, bool]:
    """
    Три эквивалентные формулировки устойчивости

    Returns:
        (p·K0 ≤ HR, p ≥ pC(n), n ≥ n_p(p))
    """
    return (
        is_singular_solution_stable(params),
        exceeds_joseph_lundgren(params),
        params.n >= min_stable_dimension(params.p),
    )


def homogeneous_triviality_margins(params: ProblemParams) -> Tuple[float, float, float]:
    """
    Запасы (p-1, p·J1 - n(n-4)/2, p·J2 - n²(n-4)²/16)

    На интервале pS < p < pC все три положительны; это импликация,
    ниже pS запасы тоже могут оставаться положительными.
    """
    if params.n < 5:
        raise DomainError(f"требуется n ≥ 5, получено n={params.n}")
    constants = derive_constants(params)
    n, p = params.n, params.p
    return (
        p - 1.0,
        p * constants.J1 - n * (n - 4) / 2.0,
        p * constants.J2 - constants.hardyRellich,
    )


def triviality_hypothesis(params: ProblemParams) -> bool:
    """pS(n) < p < pC(n): диапазон, где однородные устойчивые решения тривиальны"""
    return sobolev_exponent(params.n) < params.p and params.p < joseph_lundgren_exponent(params.n)


def negative_exponent_condition(params: ProblemParams) -> bool:
    """
    Условие монотонности для Δ²u = -u^{-p}

    n - 2 + 8/(p+1) > 4/(p+1)·(4/(p+1) + n - 2)
    """
    mu = 4.0 / (params.p + 1.0)
    return params.n - 2 + 2 * mu > mu * (mu + params.n - 2)


def negative_exponent_scan(p: float, n_min: int = 1, n_max: int = 200) -> list:
    """Все n из [n_min, n_max], для которых условие выполнено"""
    admissible = []
    for n in range(n_min, n_max + 1):
        if negative_exponent_condition(ProblemParams(n=n, p=p)):
            admissible.append(n)
    logger.debug(f"Допустимые n для p={p}: {len(admissible)} из {n_max - n_min + 1}")
    return admissible
