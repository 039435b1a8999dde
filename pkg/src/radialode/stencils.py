"""
Конечно-разностные шаблоны на неравномерной сетке
"""
import numpy as np

from src.errors import TooFewSamples


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """
    Веса конечных разностей по алгоритму Форнберга

    Args:
        z: Точка, в которой приближается производная
        x: Узлы шаблона
        m: Наивысший порядок производной

    Returns:
        Массив (m+1, len(x)): строка k - веса для k-й производной
    """
    n = len(x)
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def centered_derivatives(values: np.ndarray, radii: np.ndarray, order: int = 2) -> np.ndarray:
    """
    Производные по 5-точечному центрированному шаблону во внутренних узлах

    Args:
        values: Значения функции на сетке
        radii: Возрастающая сетка
        order: Наивысший порядок (1 или 2)

    Returns:
        Массив (order, len(radii)-4): производные порядков 1..order в узлах 2..N-3
    """
    values = np.asarray(values, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if len(radii) < 5:
        raise TooFewSamples(f"для 5-точечного шаблона нужно ≥ 5 узлов, получено {len(radii)}")
    interior = len(radii) - 4
    result = np.empty((order, interior))
    for k in range(interior):
        window = radii[k:k + 5]
        weights = fornberg_weights(window[2], window, order)
        result[:, k] = weights[1:] @ values[k:k + 5]
    return result


def radial_laplacian(values: np.ndarray, radii: np.ndarray, n: int) -> np.ndarray:
    """
    Δφ = φ'' + (n-1)φ'/r во всех узлах

    Во внутренних узлах - центрированный 5-точечный шаблон,
    у краев - смещенный шаблон по крайним пяти узлам.
    """
    values = np.asarray(values, dtype=float)
    radii = np.asarray(radii, dtype=float)
    count = len(radii)
    if count < 5:
        raise TooFewSamples(f"для радиального лапласиана нужно ≥ 5 узлов, получено {count}")
    result = np.empty(count)
    for i in range(count):
        start = min(max(i - 2, 0), count - 5)
        weights = fornberg_weights(radii[i], radii[start:start + 5], 2)
        first = weights[1] @ values[start:start + 5]
        second = weights[2] @ values[start:start + 5]
        result[i] = second + (n - 1) * first / radii[i]
    return result


def five_point_derivative(func, r: float, h: float) -> float:
    """Первая производная скалярной функции: центральная разность O(h⁴)"""
    return (func(r - 2 * h) - 8 * func(r - h) + 8 * func(r + h) - func(r + 2 * h)) / (12.0 * h)
