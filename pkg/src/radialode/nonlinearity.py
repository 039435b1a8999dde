"""
Правые части радиального уравнения Δ²u = f(u)
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DomainError


@dataclass(frozen=True)
class PowerNonlinearity:
    """f(u) = |u|^{p-1}u, потенциал F(u) = |u|^{p+1}/(p+1)"""

    p: float

    name = 'power'

    def force(self, u):
        return np.abs(u) ** (self.p - 1.0) * u

    def potential(self, u):
        return np.abs(u) ** (self.p + 1.0) / (self.p + 1.0)

    def derivative(self, u):
        return self.p * np.abs(u) ** (self.p - 1.0)

    @property
    def scaling_exponent(self) -> Optional[float]:
        """γ = 4/(p-1)"""
        return 4.0 / (self.p - 1.0)


@dataclass(frozen=True)
class NegativePowerNonlinearity:
    """f(u) = -u^{-p} при u > 0, потенциал F(u) = u^{1-p}/(p-1)"""

    p: float

    name = 'negative-power'

    def _check(self, u):
        if np.any(np.asarray(u) <= 0):
            raise DomainError("отрицательный показатель: профиль u должен быть строго положительным")

    def force(self, u):
        self._check(u)
        return -np.asarray(u, dtype=float) ** (-self.p)

    def potential(self, u):
        self._check(u)
        return np.asarray(u, dtype=float) ** (1.0 - self.p) / (self.p - 1.0)

    def derivative(self, u):
        self._check(u)
        return self.p * np.asarray(u, dtype=float) ** (-self.p - 1.0)

    @property
    def scaling_exponent(self) -> Optional[float]:
        """σ = -4/(p+1)"""
        return -4.0 / (self.p + 1.0)


@dataclass(frozen=True)
class NavierNonlinearity:
    """f(u) = λ(1+u)^p, потенциал F(u) = λ(1+u)^{p+1}/(p+1)"""

    p: float
    lam: float

    name = 'navier'

    def _base(self, u):
        base = 1.0 + np.asarray(u, dtype=float)
        if np.any(base <= 0):
            raise DomainError("задача Навье: 1 + u должно оставаться положительным")
        return base

    def force(self, u):
        return self.lam * self._base(u) ** self.p

    def potential(self, u):
        return self.lam * self._base(u) ** (self.p + 1.0) / (self.p + 1.0)

    def derivative(self, u):
        return self.lam * self.p * self._base(u) ** (self.p - 1.0)

    @property
    def scaling_exponent(self) -> Optional[float]:
        # λ(1+u)^p не инвариантна относительно растяжений
        return None
