"""
Монотонная энергия для Δ²u = -u^{-p}, u > 0
"""
import logging
from typing import Optional

import numpy as np

from src.config import Config
from src.errors import DomainError
from src.exponents.constants import negative_scaling_constants
from src.exponents.stability import negative_exponent_condition
from src.energy.monotonicity import EnergyProfile, check_radius, build_profile, energy_terms
from src.radialode.field import RadialField
from src.radialode.nonlinearity import NegativePowerNonlinearity

logger = logging.getLogger(__name__)


def _require_admissible(field: RadialField, operation: str):
    if not isinstance(field.nonlinearity, NegativePowerNonlinearity):
        raise DomainError(f"{operation}: поле должно решать Δ²u = -u^{{-p}}")
    if not negative_exponent_condition(field.params):
        raise DomainError(
            f"{operation}: условие монотонности не выполнено для n={field.n}, p={field.params.p}"
        )


def negative_energy_radial(field: RadialField, r: float) -> float:
    """
    Ẽ(r; 0, u): та же радиальная редукция с σ = -4/(p+1)
    и плотностью ½v² - u^{1-p}/(p-1)
    """
    _require_admissible(field, 'negative_energy_radial')
    check_radius(field, r, 'negative_energy_radial')
    if np.any(field.state(r).u <= 0):
        raise DomainError(f"negative_energy_radial: u(r) ≤ 0 при r={r}")
    return float(energy_terms(field, r).total)


def negative_energy_profile(field: RadialField, radii, rel_tol: Optional[float] = None) -> EnergyProfile:
    """Профиль Ẽ с нижней границей c₀·ω r^{2σ+1}(σu/r + u')², σ = -4/(p+1)"""
    _require_admissible(field, 'negative_energy_profile')
    radii = np.asarray(radii, dtype=float)
    check_radius(field, radii, 'negative_energy_profile')
    if np.any(field.state(radii).u <= 0):
        raise DomainError("negative_energy_profile: профиль должен быть положительным")
    scaling = negative_scaling_constants(field.params)
    rel_tol = Config.REL_TOL if rel_tol is None else rel_tol
    profile = build_profile(field, radii, -scaling.mu, scaling.c0, rel_tol)
    if not (profile.monotone and profile.bound_holds):
        logger.warning(f"Ẽ не монотонна: min(dE - bound)={profile.min_defect:.3e}")
    return profile
