"""
Задача Навье Δ²u = λ(1+u)^p в единичном шаре: Ньютон, продолжение по параметру, складка
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from src.config import Config
from src.errors import ContinuationStall, DomainError, NewtonDivergence
from src.exponents.constants import ProblemParams
from src.navierbvp.discretization import NavierDiscretization
from src.radialode.field import RadialField
from src.radialode.integrator import IntegrationConfig, integrate
from src.radialode.nonlinearity import NavierNonlinearity

logger = logging.getLogger(__name__)

MAX_NEWTON_ITER = 30
MAX_EIGEN_ITER = 2000
EIGEN_RTOL = 1e-12


@dataclass(frozen=True)
class StepControl:
    """Параметры псевдодлины дуги"""

    initial_step: float = 0.05
    min_step: float = 1e-6
    max_step: float = 0.25
    max_steps: int = 400
    max_arclength: float = 30.0
    newton_max_iter: int = 12
    fold_stop_fraction: float = 0.6

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step <= self.max_step:
            raise DomainError("шаги должны удовлетворять 0 < min_step ≤ initial_step ≤ max_step")
        if self.max_steps < 1 or self.max_arclength <= 0:
            raise DomainError("max_steps и max_arclength должны быть положительными")
        if not 0 < self.fold_stop_fraction < 1:
            raise DomainError("fold_stop_fraction должен лежать в (0, 1)")


@dataclass(frozen=True, eq=False)
class BranchPoint:
    """Сошедшаяся точка ветви: узловые u, v = Δu и диагностика"""

    params: ProblemParams
    lam: float
    u: np.ndarray
    v: np.ndarray
    sup_norm: float
    eig_min: float
    arclength: float
    residual: float

    @cached_property
    def field(self) -> RadialField:
        """Радиальное поле на [r₀, 1]: ОДУ с начальными данными (u_h(0), Δu_h(0))"""
        cfg = IntegrationConfig.from_config(r_max=1.0)
        return integrate(
            self.params,
            float(self.u[0]),
            float(self.v[0]),
            cfg,
            nonlinearity=NavierNonlinearity(self.params.p, self.lam),
            stop_on_crossing=False,
        )

    @property
    def boundary_mismatch(self) -> float:
        """max(|u(1)|, |Δu(1)|) уточненного поля; узловые значения удовлетворяют условиям точно"""
        field = self.field
        return float(max(abs(field.u[-1]), abs(field.v[-1])))


@dataclass(frozen=True)
class DiscreteEnergyIdentity:
    """Σ w_i v_i² = λ Σ w_i u_i (1+u_i)^p для узловых (u_h, v_h)"""

    lam: float
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def relative(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.residual) / scale if scale > 0 else 0.0


def discrete_energy_identity(point: BranchPoint, grid: NavierDiscretization) -> DiscreteEnergyIdentity:
    """
    Дискретное энергетическое тождество схемы

    Матрица diag(w)·L симметрична, поэтому из L u = v и L v = λ(1+u)^p
    следует (v, v)_w = (u, L v)_w = λ(u, (1+u)^p)_w с точностью до невязки Ньютона.
    """
    if len(point.u) != grid.size:
        raise DomainError(f"точка ветви имеет {len(point.u)} узлов, сетка {grid.size}")
    weights = grid.weights()
    lhs = float(weights @ (point.v * point.v))
    rhs = float(point.lam * (weights @ (point.u * (1.0 + point.u) ** point.params.p)))
    return DiscreteEnergyIdentity(lam=point.lam, lhs=lhs, rhs=rhs)


@dataclass(frozen=True, eq=False)
class Branch:
    """Ветвь (λ, u_λ), упорядоченная по длине дуги"""

    params: ProblemParams
    grid_size: int
    points: Tuple[BranchPoint, ...]
    lambda_star: float
    fold_index: int
    fold_detected: bool
    fold_arclength: float
    sup_norm_star: float

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([point.lam for point in self.points])

    @property
    def sup_norms(self) -> np.ndarray:
        return np.array([point.sup_norm for point in self.points])

    @property
    def eig_mins(self) -> np.ndarray:
        return np.array([point.eig_min for point in self.points])

    @property
    def arclengths(self) -> np.ndarray:
        return np.array([point.arclength for point in self.points])

    @property
    def minimal_points(self) -> Tuple[BranchPoint, ...]:
        """Точки строго до складки"""
        return self.points[:self.fold_index]

    def energy_identities(self) -> Tuple[DiscreteEnergyIdentity, ...]:
        grid = NavierDiscretization(self.params.n, self.grid_size)
        return tuple(discrete_energy_identity(point, grid) for point in self.points)


class NavierSolver:
    """Решатель радиальной задачи Навье на фиксированной сетке"""

    def __init__(self, params: ProblemParams, grid_size: Optional[int] = None, newton_tol: Optional[float] = None):
        self.params = params
        self.grid = NavierDiscretization(params.n, grid_size or Config.NAVIER_GRID)
        self.newton_tol = newton_tol if newton_tol is not None else Config.NEWTON_TOL
        self._lambda_scale: Optional[float] = None

    @property
    def size(self) -> int:
        return self.grid.size

    def _base(self, u: np.ndarray) -> np.ndarray:
        base = 1.0 + u
        if np.any(base <= 0):
            raise DomainError("задача Навье: 1 + u ≤ 0 на сетке")
        return base

    def residual(self, x: np.ndarray, lam: float) -> np.ndarray:
        """G(x, λ) = [L u - v; L v - λ(1+u)^p]"""
        N, L = self.size, self.grid.laplacian
        u, v = x[:N], x[N:]
        return np.concatenate([L @ u - v, L @ v - lam * self._base(u) ** self.params.p])

    def scaled_residual(self, x: np.ndarray, lam: float) -> float:
        """Невязка, умноженная на h² (естественный масштаб строк шаблона)"""
        return float(np.max(np.abs(self.residual(x, lam))) * self.grid.h ** 2)

    def jacobian(self, x: np.ndarray, lam: float) -> sparse.csc_matrix:
        N, L, p = self.size, self.grid.laplacian, self.params.p
        coupling = sparse.diags(-lam * p * self._base(x[:N]) ** (p - 1))
        return sparse.bmat([[L, -self.grid.identity()], [coupling, L]], format='csc')

    def lambda_derivative(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate([np.zeros(self.size), -self._base(x[:self.size]) ** self.params.p])

    def smallest_eigenvalue(self, u: np.ndarray, lam: float) -> float:
        """
        Наименьшее собственное значение L² - λp·diag((1+u)^{p-1})

        Обратные итерации со сдвигом ниже спектра: спектр не меньше
        -λp·max(1+u)^{p-1}, поэтому сходимость идет к наименьшему значению.
        """
        L, p = self.grid.laplacian, self.params.p
        potential = lam * p * self._base(u) ** (p - 1)
        shift = -float(np.max(potential)) - 1.0
        operator = (L @ L - sparse.diags(potential) - shift * self.grid.identity()).tocsc()
        factor = splu(operator)
        weights = self.grid.weights()

        x = np.ones(self.size) / np.sqrt(self.size)
        previous = None
        estimate = 0.0
        for _ in range(MAX_EIGEN_ITER):
            y = factor.solve(x)
            estimate = float((x * weights) @ y / ((y * weights) @ y))
            x = y / np.linalg.norm(y)
            if previous is not None and abs(estimate - previous) <= EIGEN_RTOL * max(1.0, abs(estimate)):
                break
            previous = estimate
        else:
            logger.warning(f"Обратные итерации не сошлись при λ={lam:.6g}")
        return estimate + shift

    @property
    def lambda_scale(self) -> float:
        """Первое собственное значение задачи Навье для Δ²"""
        if self._lambda_scale is None:
            self._lambda_scale = self.smallest_eigenvalue(np.zeros(self.size), 0.0)
        return self._lambda_scale

    def make_point(self, x: np.ndarray, lam: float, arclength: float = 0.0) -> BranchPoint:
        N = self.size
        u, v = x[:N].copy(), x[N:].copy()
        u.setflags(write=False)
        v.setflags(write=False)
        return BranchPoint(
            params=self.params,
            lam=float(lam),
            u=u,
            v=v,
            sup_norm=float(np.max(np.abs(u))),
            eig_min=self.smallest_eigenvalue(u, lam),
            arclength=float(arclength),
            residual=self.scaled_residual(x, lam),
        )

    def solve_at(self, lam: float, initial_guess=None) -> BranchPoint:
        """
        Метод Ньютона при фиксированном λ

        Args:
            lam: λ > 0
            initial_guess: BranchPoint, вектор [u; v] длины 2N или None (ноль)

        Returns:
            BranchPoint с невязкой ≤ newton_tol
        """
        if lam <= 0:
            raise DomainError(f"λ должно быть положительным, получено {lam}")
        x = self._initial_vector(initial_guess)
        for iteration in range(MAX_NEWTON_ITER):
            try:
                G = self.residual(x, lam)
                if np.max(np.abs(G)) * self.grid.h ** 2 <= self.newton_tol:
                    logger.debug(f"Ньютон сошелся при λ={lam:.6g} за {iteration} итераций")
                    return self.make_point(x, lam)
                x = x + splu(self.jacobian(x, lam)).solve(-G)
            except (DomainError, RuntimeError) as e:
                raise NewtonDivergence(f"Ньютон при λ={lam:.6g}: {e}") from e
            if not np.all(np.isfinite(x)):
                break
        raise NewtonDivergence(f"Ньютон не сошелся при λ={lam:.6g} за {MAX_NEWTON_ITER} итераций")

    def _initial_vector(self, guess) -> np.ndarray:
        if guess is None:
            return np.zeros(2 * self.size)
        if isinstance(guess, BranchPoint):
            return np.concatenate([guess.u, guess.v])
        guess = np.asarray(guess, dtype=float)
        if guess.shape != (2 * self.size,):
            raise DomainError(f"начальное приближение должно иметь длину {2 * self.size}")
        return guess.copy()

    # --- продолжение по псевдодлине дуги ---

    def _weights(self, tangent: np.ndarray) -> Tuple[np.ndarray, float]:
        """Строка скалярного произведения: u с весом 1/N, v не входит, λ с весом 1/λs²"""
        N = self.size
        row = np.zeros(2 * N)
        row[:N] = tangent[:N] / N
        return row, tangent[-1] / self.lambda_scale ** 2

    def _norm(self, vector: np.ndarray) -> float:
        row, weight = self._weights(vector)
        return float(np.sqrt(row @ vector[:-1] + weight * vector[-1]))

    def _bordered(self, x: np.ndarray, lam: float, tangent: np.ndarray) -> sparse.csc_matrix:
        row, weight = self._weights(tangent)
        column = sparse.csc_matrix(self.lambda_derivative(x).reshape(-1, 1))
        return sparse.bmat(
            [[self.jacobian(x, lam), column], [sparse.csr_matrix(row.reshape(1, -1)), sparse.csr_matrix([[weight]])]],
            format='csc',
        )

    def _tangent(self, x: np.ndarray, lam: float, previous: np.ndarray) -> np.ndarray:
        rhs = np.zeros(2 * self.size + 1)
        rhs[-1] = 1.0
        tangent = splu(self._bordered(x, lam, previous)).solve(rhs)
        tangent /= self._norm(tangent)
        row, weight = self._weights(previous)
        if row @ tangent[:-1] + weight * tangent[-1] < 0:
            tangent = -tangent
        return tangent

    def _correct(self, predicted: np.ndarray, tangent: np.ndarray, max_iter: int) -> Tuple[np.ndarray, int]:
        y = predicted.copy()
        row, weight = self._weights(tangent)
        for iteration in range(max_iter):
            x, lam = y[:-1], y[-1]
            G = self.residual(x, lam)
            constraint = row @ (x - predicted[:-1]) + weight * (lam - predicted[-1])
            if np.max(np.abs(G)) * self.grid.h ** 2 <= self.newton_tol and abs(constraint) <= self.newton_tol:
                return y, iteration
            delta = splu(self._bordered(x, lam, tangent)).solve(-np.append(G, constraint))
            y = y + delta
            if not np.all(np.isfinite(y)):
                break
        raise NewtonDivergence(f"корректор не сошелся за {max_iter} итераций")

    def trace_branch(self, step: Optional[StepControl] = None) -> Branch:
        """
        Продолжение от (λ, u) = (0, 0) через первую складку

        Тривиальная точка λ = 0 служит только стартом и в ветвь не входит.

        Args:
            step: Параметры шага

        Returns:
            Branch с оценкой λ* по параболе через три точки у складки
        """
        step = step or StepControl()
        N = self.size
        y = np.zeros(2 * N + 1)
        points = []

        start = np.zeros(2 * N + 1)
        start[-1] = self.lambda_scale
        tangent = self._tangent(y[:-1], 0.0, start)

        ds = step.initial_step
        arclength = 0.0
        lambda_max = 0.0
        fold_seen = False
        logger.info(f"Продолжение ветви n={self.params.n}, p={self.params.p}, N={N}")

        while len(points) < step.max_steps and arclength < step.max_arclength:
            predicted = y + ds * tangent
            try:
                corrected, iterations = self._correct(predicted, tangent, step.newton_max_iter)
            except (NewtonDivergence, DomainError, RuntimeError) as e:
                ds /= 2.0
                logger.debug(f"Шаг уменьшен до {ds:.3g}: {e}")
                if ds < step.min_step:
                    raise ContinuationStall(
                        f"шаг продолжения меньше {step.min_step} при λ={y[-1]:.6g}",
                        last_point=points[-1] if points else None,
                    ) from e
                continue

            arclength += ds
            y = corrected
            lam = float(y[-1])
            if lam <= 0:
                logger.info("Ветвь вернулась к λ ≤ 0")
                break
            points.append(self.make_point(y[:-1], lam, arclength))
            tangent = self._tangent(y[:-1], lam, tangent)
            if iterations <= 3:
                ds = min(1.5 * ds, step.max_step)

            if lam > lambda_max:
                lambda_max = lam
            elif not fold_seen:
                fold_seen = True
                logger.info(f"Складка пройдена: λ_max ≈ {lambda_max:.8g}")
            if fold_seen and lam < step.fold_stop_fraction * lambda_max:
                break

        return self._assemble(points, fold_seen)

    def _assemble(self, points, fold_seen: bool) -> Branch:
        if not points:
            raise ContinuationStall("продолжение не дало ни одной точки с λ > 0")
        lambdas = np.array([point.lam for point in points])
        sups = np.array([point.sup_norm for point in points])
        arcs = np.array([point.arclength for point in points])
        k = int(np.argmax(lambdas))
        fold_detected = fold_seen and 0 < k < len(points) - 1

        if fold_detected:
            window = slice(k - 1, k + 2)
            s = arcs[window] - arcs[k]
            a, b, c = np.polyfit(s, lambdas[window], 2)
            s_star = -b / (2.0 * a) if a < 0 else 0.0
            s_star = float(np.clip(s_star, s[0], s[-1]))
            lambda_star = float(np.polyval([a, b, c], s_star))
            sup_star = float(np.polyval(np.polyfit(s, sups[window], 2), s_star))
            fold_arclength = float(arcs[k] + s_star)
            logger.info(f"λ* = {lambda_star:.10g}, sup u = {sup_star:.6g} (N={self.size})")
        else:
            lambda_star, sup_star, fold_arclength = float(lambdas[k]), float(sups[k]), float(arcs[k])
            logger.warning(f"Складка не найдена в пределах шага продолжения; max λ = {lambda_star:.6g}")

        return Branch(
            params=self.params,
            grid_size=self.size,
            points=tuple(points),
            lambda_star=lambda_star,
            fold_index=k,
            fold_detected=fold_detected,
            fold_arclength=fold_arclength,
            sup_norm_star=sup_star,
        )


def solve_at(params: ProblemParams, lam: float, initial_guess=None, grid_size: Optional[int] = None) -> BranchPoint:
    return NavierSolver(params, grid_size).solve_at(lam, initial_guess)


def trace_branch(
    params: ProblemParams,
    step: Optional[StepControl] = None,
    grid_size: Optional[int] = None,
) -> Branch:
    return NavierSolver(params, grid_size).trace_branch(step)
