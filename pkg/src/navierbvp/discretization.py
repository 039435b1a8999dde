"""
Разностная схема для радиального лапласиана на единичном шаре
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from src.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NavierDiscretization:
    """
    Равномерная сетка r_i = i·h, i = 0..N-1, h = 1/N

    Узел r_N = 1 исключен: там u = Δu = 0. В нуле используется
    симметрия w'(0) = 0, откуда Δw(0) ≈ 2n(w_1 - w_0)/h².
    """

    n: int
    size: int
    laplacian: sparse.csc_matrix = field(init=False, repr=False)

    def __post_init__(self):
        if self.size < 8:
            raise DomainError(f"сетка задачи Навье должна иметь ≥ 8 узлов, получено {self.size}")
        object.__setattr__(self, 'laplacian', self._build_laplacian())

    @property
    def h(self) -> float:
        return 1.0 / self.size

    @property
    def radii(self) -> np.ndarray:
        return np.arange(self.size) * self.h

    def _build_laplacian(self) -> sparse.csc_matrix:
        # потоковая форма r^{1-n}(r^{n-1}w')': матрица симметризуема весами r_i^{n-1}
        n, N, h = self.n, self.size, self.h
        i = np.arange(1, N, dtype=float)
        to_left = (1.0 - 0.5 / i) ** (n - 1) / h ** 2
        to_right = (1.0 + 0.5 / i) ** (n - 1) / h ** 2
        main = np.empty(N)
        main[0] = -2.0 * n / h ** 2
        main[1:] = -(to_left + to_right)
        upper = np.empty(N - 1)
        upper[0] = 2.0 * n / h ** 2
        upper[1:] = to_right[:-1]
        return sparse.diags([to_left, main, upper], [-1, 0, 1], format='csc')

    def weights(self) -> np.ndarray:
        """Веса квадратуры: объем ячейки вокруг узла, деленный на ω"""
        h = self.h
        weights = np.arange(self.size, dtype=float) ** (self.n - 1) * h ** self.n
        weights[0] = (0.5 * h) ** self.n / self.n
        return weights

    def identity(self) -> sparse.csc_matrix:
        return sparse.identity(self.size, format='csc')

    def with_boundary(self, values: np.ndarray) -> np.ndarray:
        """Значения на полной сетке [0, 1] с нулем в r = 1"""
        return np.append(values, 0.0)

    def full_radii(self) -> np.ndarray:
        return np.append(self.radii, 1.0)
