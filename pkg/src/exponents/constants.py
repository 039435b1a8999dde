"""
Параметры задачи Δ²u = |u|^{p-1}u и все производные константы
"""
import logging
import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Union

from scipy import special

from src.errors import DomainError

logger = logging.getLogger(__name__)

Number = Union[int, float]


@total_ordering
@dataclass(frozen=True)
class ExtendedReal:
    """
    Расширенное вещественное число: конечное значение либо +∞

    Бесконечность хранится флагом, а не переполнением float,
    поэтому сравнения и сериализация остаются точными.
    """

    value: float = 0.0
    infinite: bool = False

    @classmethod
    def finite(cls, value: Number) -> 'ExtendedReal':
        return cls(value=float(value), infinite=False)

    @classmethod
    def infinity(cls) -> 'ExtendedReal':
        return cls(value=0.0, infinite=True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def __float__(self) -> float:
        return math.inf if self.infinite else self.value

    def _key(self, other) -> tuple:
        if isinstance(other, ExtendedReal):
            return (other.infinite, other.value if other.is_finite else 0.0)
        if isinstance(other, (int, float)):
            if other == math.inf:
                return (True, 0.0)
            return (False, float(other))
        return NotImplemented

    def __eq__(self, other) -> bool:
        key = self._key(other)
        if key is NotImplemented:
            return NotImplemented
        return (self.infinite, self.value if self.is_finite else 0.0) == key

    def __lt__(self, other) -> bool:
        key = self._key(other)
        if key is NotImplemented:
            return NotImplemented
        if self.infinite:
            return False
        if key[0]:
            return True
        return self.value < key[1]

    def __hash__(self) -> int:
        return hash((self.infinite, self.value if self.is_finite else 0.0))

    def to_json(self) -> Union[float, str]:
        """JSON не знает бесконечности: пишем строку "inf" """
        return 'inf' if self.infinite else self.value

    def __str__(self) -> str:
        return 'inf' if self.infinite else repr(self.value)


@dataclass(frozen=True)
class ProblemParams:
    """Пара (n, p): размерность и показатель нелинейности"""

    n: int
    p: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"размерность n должна быть целой и ≥ 1, получено n={self.n}")
        if not math.isfinite(self.p) or self.p <= 1:
            raise DomainError(f"показатель p должен быть > 1, получено p={self.p}")
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'p', float(self.p))

    @property
    def is_supercritical(self) -> bool:
        """n ≥ 5 и p > (n+4)/(n-4)"""
        return self.n >= 5 and self.p > (self.n + 4) / (self.n - 4)

    def require_supercritical(self, operation: str):
        if not self.is_supercritical:
            raise DomainError(
                f"{operation}: требуется n ≥ 5 и p > (n+4)/(n-4), получено n={self.n}, p={self.p}"
            )


@dataclass(frozen=True)
class DerivedConstants:
    """Все замкнутые константы задачи для фиксированных (n, p)"""

    n: int
    p: float
    gamma: float
    K0: float
    pS: ExtendedReal
    pC: ExtendedReal
    hardyRellich: float
    alpha: float
    beta: float
    cNP: float
    J1: float
    J2: float
    omega: float

    @property
    def singular_amplitude(self) -> float:
        """K0^{1/(p-1)}; определена только при K0 > 0"""
        if self.K0 <= 0:
            raise DomainError(f"K0 = {self.K0} ≤ 0: сингулярного решения нет")
        return self.K0 ** (1.0 / (self.p - 1.0))


def sobolev_exponent(n: int) -> ExtendedReal:
    """
    Критический показатель Соболева

    Args:
        n: Размерность (≥ 1)

    Returns:
        +∞ при n ≤ 4, иначе (n+4)/(n-4)
    """
    if n < 1:
        raise DomainError(f"n должно быть ≥ 1, получено {n}")
    if n <= 4:
        return ExtendedReal.infinity()
    return ExtendedReal.finite((n + 4) / (n - 4))


def joseph_lundgren_exponent(n: int) -> ExtendedReal:
    """
    Показатель Джозефа–Лундгрена для бигармонического случая

    Args:
        n: Размерность (≥ 1)

    Returns:
        +∞ при n ≤ 12, иначе замкнутая формула
    """
    if n < 1:
        raise DomainError(f"n должно быть ≥ 1, получено {n}")
    if n <= 12:
        return ExtendedReal.infinity()
    root = math.sqrt(n * n + 4 - n * math.sqrt(n * n - 8 * n + 32))
    return ExtendedReal.finite((n + 2 - root) / (n - 6 - root))


def hardy_rellich_constant(n: int) -> float:
    """Наилучшая константа неравенства Харди–Реллиха n²(n-4)²/16"""
    return n * n * (n - 4) ** 2 / 16.0


def sphere_area(n: int) -> float:
    """Площадь единичной сферы S^{n-1}: 2π^{n/2}/Γ(n/2)"""
    return 2.0 * math.pi ** (n / 2.0) / float(special.gamma(n / 2.0))


def singular_coefficient(gamma: float, n: int) -> float:
    """γ(γ+2)(γ-n+4)(γ-n+2)"""
    return gamma * (gamma + 2) * (gamma - n + 4) * (gamma - n + 2)


def derive_constants(params: ProblemParams) -> DerivedConstants:
    """
    Вычислить все константы задачи

    Args:
        params: Пара (n, p)

    Returns:
        Заполненный DerivedConstants
    """
    n, p = params.n, params.p
    gamma = 4.0 / (p - 1.0)

    # J1, J2 - коэффициенты уравнения для угловой части однородного решения
    J1 = (gamma + 2) * (n - 4 - gamma) + gamma * (n - 2 - gamma)
    J2 = gamma * (gamma + 2) * (n - 4 - gamma) * (n - 2 - gamma)

    alpha = n - 1 - 2 * gamma
    beta = gamma * (gamma - n + 2)

    constants = DerivedConstants(
        n=n,
        p=p,
        gamma=gamma,
        K0=singular_coefficient(gamma, n),
        pS=sobolev_exponent(n),
        pC=joseph_lundgren_exponent(n),
        hardyRellich=hardy_rellich_constant(n),
        alpha=alpha,
        beta=beta,
        cNP=2 * alpha - 2 * beta - 2,
        J1=J1,
        J2=J2,
        omega=sphere_area(n),
    )
    logger.debug(f"Константы для n={n}, p={p}: K0={constants.K0}, pC={constants.pC}")
    return constants


def monotonicity_root_gamma(n: int) -> float:
    """
    Значение γ, при котором α - β - 1 меняет знак

    α - β - 1 = (n-2) + γ(n-4) - γ², положительный корень
    ((n-4) + √(n²-4n+8))/2. Он лежит выше (n-4)/2, то есть при p ниже pS.
    """
    return ((n - 4) + math.sqrt(n * n - 4 * n + 8)) / 2.0


@dataclass(frozen=True)
class NegativeScaling:
    """Константы для уравнения Δ²u = -u^{-p}"""

    mu: float
    alpha: float
    beta: float
    c0: float
    K_tilde: float

    @property
    def homogeneous_amplitude(self) -> float:
        """C в однородном решении C·r^μ"""
        if self.K_tilde <= 0:
            raise DomainError(f"K̃ = {self.K_tilde} ≤ 0: однородного решения нет")
        # p + 1 = 4/μ, поэтому C = K̃^{-1/(p+1)} = K̃^{-μ/4}
        return self.K_tilde ** (-self.mu / 4.0)


def negative_scaling_constants(params: ProblemParams) -> NegativeScaling:
    """
    Константы монотонной энергии для отрицательного показателя

    Масштабный показатель σ = -μ, μ = 4/(p+1).
    """
    n, p = params.n, params.p
    mu = 4.0 / (p + 1.0)
    alpha = n - 1 + 2 * mu
    beta = mu * (mu + n - 2)
    K_tilde = -mu * (mu + n - 2) * (mu - 2) * (mu + n - 4)
    return NegativeScaling(mu=mu, alpha=alpha, beta=beta, c0=2 * alpha - 2 * beta - 2, K_tilde=K_tilde)
