"""
Полный набор проверок для пары (n, p): таблица PASS/FAIL
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, List, Optional, Tuple

import numpy as np

from src.blowdown.growth import growth_bound_check
from src.blowdown.pohozaev import pohozaev_check
from src.blowdown.rescaling import homogeneity_deviation, rescale
from src.cli.serialization import table_csv
from src.config import Config
from src.energy.density import density_estimate
from src.energy.homogeneous import homogeneous_energy
from src.energy.monotonicity import energy_profile, energy_radial
from src.energy.negative import negative_energy_profile
from src.errors import LaneEmdenError
from src.exponents.constants import ProblemParams, derive_constants, joseph_lundgren_exponent, sobolev_exponent
from src.exponents.stability import (
    is_singular_solution_stable,
    negative_exponent_condition,
    negative_exponent_scan,
    stability_predicates,
)
from src.navierbvp.regularity import extremal_regularity_report
from src.navierbvp.solver import Branch, trace_branch
from src.radialode.integrator import IntegrationConfig, integrate, negative_homogeneous_field, singular_field
from src.radialode.nonlinearity import NegativePowerNonlinearity
from src.radialode.oracle import hardy_rellich_family, relative_residual, stability_form
from src.radialode.shooting import ShootingResult, shoot_entire

logger = logging.getLogger(__name__)

BRANCH_KEY = 'navier-branch'

# Утверждение, которое подтверждает каждая проверка
CHECK_CLAIMS = {
    'exponent-consistency': 'три критерия устойчивости u_s совпадают, J2 = K0',
    'singular-exactness': 'u_s = K0^{1/(p-1)} r^{-γ} решает Δ²u = u^p',
    'homogeneous-energy': 'E однородного решения постоянна и равна замкнутой форме',
    'monotonicity': 'E(r) не убывает, dE/dr ≥ c(n,p)·r^{2-n+8/(p-1)}∫(γu/r + u\')²',
    'homogeneity-defect': 'E постоянна тогда и только тогда, когда u однородно',
    'pohozaev': 'тождество Похожаева на сферах |x| = R',
    'scaling-invariance': 'E(r; u^λ) = E(λr; u), u^{λμ} = (u^λ)^μ',
    'growth-bound': '∫_{B_R}(Δu)² + |u|^{p+1} ≤ C·R^{n-4(p+1)/(p-1)}',
    'stability-form': 'знак Λ_{u_s}(φ) согласован с критерием устойчивости',
    'negative-exponent': 'Ẽ(r) не убывает для Δ²u = -u^{-p}',
    BRANCH_KEY: 'λ* сходится по сетке, минимальная ветвь устойчива, u(0) в складке ограничено, дискретное тождество энергии выполнено',
}
CHECK_KEYS = tuple(key for key in CHECK_CLAIMS if key != BRANCH_KEY)

ENERGY_RTOL = 1e-6
POHOZAEV_RTOL = 1e-6
RESIDUAL_RTOL = 1e-8
DEVIATION_ATOL = 1e-10
LAMBDA_GRID_RTOL = 0.01
EIGEN_ATOL = 1e-6

# Радиусы для оценки роста; показатель подгоняется на внешней части отрезка
GROWTH_RANGE = (5.0, 50.0)
GROWTH_FIT_WINDOW = (20.0, 50.0)

# Пара для отрицательного показателя, если перебор по n ничего не нашел
FALLBACK_NEGATIVE = ProblemParams(n=5, p=5.0)


@dataclass(frozen=True)
class CheckResult:
    key: str
    passed: bool
    detail: str

    @property
    def claim(self) -> str:
        return CHECK_CLAIMS[self.key]


@dataclass(frozen=True)
class VerificationReport:
    n: int
    p: float
    checks: Tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_payload(self) -> dict:
        return {
            'n': self.n,
            'p': self.p,
            'passed': self.passed,
            'checks': [
                {'key': c.key, 'claim': c.claim, 'passed': c.passed, 'detail': c.detail}
                for c in self.checks
            ],
        }


def format_table(report: VerificationReport) -> str:
    """Таблица PASS/FAIL в CSV: строка на проверку и итоговая строка total"""
    rows = [(check.key, 'PASS' if check.passed else 'FAIL', check.claim, check.detail) for check in report.checks]
    rows.append(('total', 'PASS' if report.passed else 'FAIL', f"n={report.n} p={report.p!r}", ''))
    return table_csv(('key', 'status', 'claim', 'detail'), rows)


def _spread(values: np.ndarray) -> float:
    scale = float(np.max(np.abs(values)))
    return float(np.ptp(values)) / scale if scale > 0 else 0.0


class VerificationSuite:
    """
    Сервис проверок для одной пары (n, p)

    Дорогие объекты (решение стрельбы, сингулярное поле) вычисляются
    один раз и переиспользуются всеми проверками.
    """

    def __init__(
        self,
        params: ProblemParams,
        a: float = 1.0,
        cfg: Optional[IntegrationConfig] = None,
        with_branch: bool = False,
        branch_grid: Optional[int] = None,
    ):
        params.require_supercritical('verify-all')
        self.params = params
        self.a = a
        self.cfg = cfg or IntegrationConfig.from_config()
        self.with_branch = with_branch
        self.branch_grid = branch_grid or Config.NAVIER_GRID
        self.constants = derive_constants(params)

    @cached_property
    def shooting(self) -> ShootingResult:
        return shoot_entire(self.params, self.a, self.cfg)

    @cached_property
    def singular(self):
        return singular_field(self.params, np.geomspace(1e-3, 1e3, 121))

    def _window(self, low: float, high: float) -> Tuple[float, float]:
        """Отрезок [low, high], обрезанный радиусом доверия решения стрельбы"""
        return low, min(high, 0.999 * self.shooting.field.r_max)

    # --- проверки ---

    def check_exponent_consistency(self) -> CheckResult:
        mismatches = 0
        samples = 0
        worst_j = 0.0
        for n in range(5, 61):
            p_s = float(sobolev_exponent(n))
            upper = min(float(joseph_lundgren_exponent(n)), 60.0)
            for k in range(1, 51):
                params = ProblemParams(n=n, p=p_s + (upper - p_s) * k / 50.0)
                stable, above_pc, above_np = stability_predicates(params)
                samples += 1
                if not (stable == above_pc == above_np):
                    mismatches += 1
                c = derive_constants(params)
                worst_j = max(worst_j, abs(c.J2 - c.K0) / max(abs(c.K0), 1e-300))
        passed = mismatches == 0 and worst_j <= 1e-12
        return CheckResult('exponent-consistency', passed, f"{samples} точек, расхождений {mismatches}, |J2-K0|/K0 ≤ {worst_j:.1e}")

    def check_singular_exactness(self) -> CheckResult:
        field_ = singular_field(self.params, np.linspace(0.5, 2.0, 4001))
        value = relative_residual(field_)
        return CheckResult('singular-exactness', value <= RESIDUAL_RTOL, f"отн. невязка {value:.2e}")

    def check_homogeneous_energy(self) -> CheckResult:
        radii = np.linspace(0.5, 2.0, 9)
        values = np.array([energy_radial(self.singular, r) for r in radii])
        closed = homogeneous_energy(self.params, self.constants.singular_amplitude)
        spread = _spread(values)
        mismatch = abs(float(np.mean(values)) - closed) / abs(closed)
        passed = spread <= ENERGY_RTOL and mismatch <= ENERGY_RTOL
        return CheckResult('homogeneous-energy', passed, f"разброс E {spread:.1e}, отличие от формулы {mismatch:.1e}")

    def check_monotonicity(self) -> CheckResult:
        low, high = self._window(0.1, 20.0)
        profile = energy_profile(self.shooting.field, np.geomspace(low, high, 40), self.cfg.rel_tol)
        passed = profile.monotone and profile.bound_holds
        return CheckResult('monotonicity', passed, f"r ∈ [{low:g}, {high:.4g}], min(dE - bound) = {profile.min_defect:.3e}")

    def check_homogeneity_defect(self) -> CheckResult:
        singular_dev = homogeneity_deviation(self.singular, 0.5, 2.0)
        low, high = self._window(0.1, 1.0)
        regular_dev = homogeneity_deviation(self.shooting.field, low, high)
        density = density_estimate(self.shooting.field)
        scale = max(1.0, float(np.max(np.abs(density.values))))
        passed = singular_dev <= DEVIATION_ATOL and regular_dev > 0 and abs(density.extrapolated) <= ENERGY_RTOL * scale
        return CheckResult(
            'homogeneity-defect',
            passed,
            f"u_s: {singular_dev:.1e}, u: {regular_dev:.3e}, Θ(0,u) = {density.extrapolated:.1e}",
        )

    def check_pohozaev(self) -> CheckResult:
        field_ = self.shooting.field
        radii = [R for R in (1.0, 5.0, 20.0) if R <= field_.r_max]
        worst = max(pohozaev_check(field_, R).relative for R in radii)
        return CheckResult('pohozaev', worst <= POHOZAEV_RTOL, f"R ∈ {radii}, max отн. невязка {worst:.2e}")

    def check_scaling_invariance(self) -> CheckResult:
        field_ = self.shooting.field
        worst = 0.0
        for lam in (0.5, 0.8, 1.25, 2.0, 3.0):
            scaled = rescale(field_, lam).field
            for r in np.geomspace(0.2, 2.0, 5):
                if lam * r > 0.999 * field_.r_max:
                    continue
                left, right = energy_radial(scaled, r), energy_radial(field_, lam * r)
                worst = max(worst, abs(left - right) / max(abs(right), 1e-300))
        radii = np.geomspace(0.2, 2.0, 5)
        composed = rescale(rescale(field_, 2.0).field, 1.5).field.state(radii).u
        direct = rescale(field_, 3.0).field.state(radii).u
        composition = float(np.max(np.abs(composed - direct) / np.abs(direct)))
        passed = worst <= ENERGY_RTOL and composition <= 1e-10
        return CheckResult('scaling-invariance', passed, f"E: {worst:.1e}, композиция: {composition:.1e}")

    def check_growth_bound(self) -> CheckResult:
        radii = np.geomspace(GROWTH_RANGE[0], GROWTH_RANGE[1], 20)
        singular_fit = growth_bound_check(self.singular, radii)
        exact = abs(singular_fit.exponent - singular_fit.bound) <= 1e-8
        field_ = self.shooting.field
        if field_.r_max < GROWTH_RANGE[1]:
            return CheckResult(
                'growth-bound', False,
                f"радиус доверия {field_.r_max:.3g} < {GROWTH_RANGE[1]:g}: рост u не проверен",
            )
        fit = growth_bound_check(field_, radii, fit_window=GROWTH_FIT_WINDOW)
        passed = exact and fit.within_bound
        return CheckResult(
            'growth-bound', passed,
            f"показатель {fit.exponent:.4f} ≤ {fit.bound:.4f} + 0.05, u_s: {singular_fit.exponent:.6f}",
        )

    def check_stability_form(self) -> CheckResult:
        stable = is_singular_solution_stable(self.params)
        values = np.array([stability_form(self.singular, r, phi) for r, phi in hardy_rellich_family(self.params.n)])
        passed = bool(np.all(values >= 0)) if stable else bool(np.min(values) < 0)
        return CheckResult(
            'stability-form',
            passed,
            f"{'устойчиво' if stable else 'неустойчиво'}, min Λ = {float(np.min(values)):.4e}",
        )

    def _negative_params(self) -> ProblemParams:
        if self.params.n >= 4 and negative_exponent_condition(self.params):
            return self.params
        admissible = negative_exponent_scan(self.params.p, 4, 60)
        if admissible:
            return ProblemParams(n=admissible[0], p=self.params.p)
        return FALLBACK_NEGATIVE

    def check_negative_exponent(self) -> CheckResult:
        params = self._negative_params()
        homogeneous = negative_homogeneous_field(params, np.geomspace(0.1, 10.0, 41))
        values = negative_energy_profile(homogeneous, np.linspace(0.5, 2.0, 9)).E
        spread = _spread(values)

        cfg = IntegrationConfig.from_config(r_max=2.0)
        perturbed = integrate(params, 1.0, 1.0, cfg, nonlinearity=NegativePowerNonlinearity(params.p))
        high = 0.999 * perturbed.r_max
        profile = negative_energy_profile(perturbed, np.geomspace(0.05, high, 30), self.cfg.rel_tol)
        passed = spread <= ENERGY_RTOL and profile.monotone and profile.bound_holds
        return CheckResult(
            'negative-exponent',
            passed,
            f"n={params.n}, p={params.p:g}: разброс Ẽ {spread:.1e}, min(dẼ - bound) = {profile.min_defect:.3e}",
        )

    def check_navier_branch(self) -> CheckResult:
        coarse_grid = max(self.branch_grid // 2, 8)
        branches: List[Branch] = [trace_branch(self.params, grid_size=size) for size in (coarse_grid, self.branch_grid)]
        coarse, fine = branches
        change = abs(fine.lambda_star - coarse.lambda_star) / abs(fine.lambda_star)
        minimal_ok = all(point.eig_min >= -EIGEN_ATOL for point in fine.minimal_points)
        sign_change = bool(fine.fold_detected and fine.points[-1].eig_min < 0)
        identity = max(entry.relative for entry in fine.energy_identities())
        report = extremal_regularity_report(self.params, branches)
        passed = coarse.fold_detected and fine.fold_detected and change <= LAMBDA_GRID_RTOL and minimal_ok and sign_change and report.passed
        passed = passed and identity <= POHOZAEV_RTOL
        return CheckResult(
            BRANCH_KEY,
            passed,
            f"λ* = {fine.lambda_star:.8g}, изменение по сетке {change:.1e}, режим {report.regime}, энергия (u_h, v_h) {identity:.1e}",
        )

    def checks(self) -> List[Tuple[str, Callable[[], CheckResult]]]:
        checks = [
            ('exponent-consistency', self.check_exponent_consistency),
            ('singular-exactness', self.check_singular_exactness),
            ('homogeneous-energy', self.check_homogeneous_energy),
            ('monotonicity', self.check_monotonicity),
            ('homogeneity-defect', self.check_homogeneity_defect),
            ('pohozaev', self.check_pohozaev),
            ('scaling-invariance', self.check_scaling_invariance),
            ('growth-bound', self.check_growth_bound),
            ('stability-form', self.check_stability_form),
            ('negative-exponent', self.check_negative_exponent),
        ]
        if self.with_branch:
            checks.append((BRANCH_KEY, self.check_navier_branch))
        return checks

    def run(self) -> VerificationReport:
        results = []
        for key, check in self.checks():
            try:
                result = check()
            except LaneEmdenError as e:
                logger.warning(f"Проверка {key} прервана: {e.one_line()}")
                result = CheckResult(key, False, e.one_line())
            logger.info(f"{key}: {'PASS' if result.passed else 'FAIL'} ({result.detail})")
            results.append(result)
        return VerificationReport(n=self.params.n, p=self.params.p, checks=tuple(results))


def run_verification(params: ProblemParams, a: float = 1.0, cfg: Optional[IntegrationConfig] = None,
                     with_branch: bool = False, branch_grid: Optional[int] = None) -> VerificationReport:
    return VerificationSuite(params, a, cfg, with_branch, branch_grid).run()
