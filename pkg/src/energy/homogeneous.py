"""
Замкнутые формулы энергии однородных решений r^{-4/(p-1)}·w
"""
import logging
from typing import Tuple

from src.errors import DomainError, VerificationFailure
from src.exponents.constants import ProblemParams, derive_constants

logger = logging.getLogger(__name__)

# Относительный допуск совпадения двух форм энергии
FORMS_RTOL = 1e-10


def homogeneous_energy_forms(params: ProblemParams, w_const: float) -> Tuple[float, float]:
    """
    Две записи энергии для постоянного профиля w на сфере

    Первая через |w|^{p+1}:
        (1/2 - 1/(p+1))·ω·|w|^{p+1} / (n - 2γ - 4)
    вторая через (Δu)²:
        (1/2 - 1/(p+1))·ω·β²w² / (n - 2γ - 4) + (4/(p+1))(n - 2 - γ)·ω·w²

    Совпадают, когда w^{p-1} = J2.
    """
    params.require_supercritical('homogeneous_energy')
    c = derive_constants(params)
    n, p = params.n, params.p
    denominator = n - 2 * c.gamma - 4
    if denominator == 0:
        raise DomainError(f"n = 4(p+1)/(p-1): энергия однородного решения не определена (n={n}, p={p})")
    factor = 0.5 - 1.0 / (p + 1.0)
    power_form = factor * c.omega * abs(w_const) ** (p + 1.0) / denominator
    laplacian_form = (
        factor * c.omega * c.beta ** 2 * w_const ** 2 / denominator
        + 4.0 / (p + 1.0) * (n - 2 - c.gamma) * c.omega * w_const ** 2
    )
    return power_form, laplacian_form


def homogeneous_energy(params: ProblemParams, w_const: float) -> float:
    """
    Энергия однородного решения с постоянным w

    Если w решает постоянную редукцию (w^{p-1} = J2), дополнительно
    сверяются обе формы.
    """
    power_form, laplacian_form = homogeneous_energy_forms(params, w_const)
    J2 = derive_constants(params).J2
    if J2 > 0 and abs(abs(w_const) ** (params.p - 1.0) - J2) <= 1e-12 * J2:
        scale = max(abs(power_form), abs(laplacian_form))
        if abs(power_form - laplacian_form) > FORMS_RTOL * scale:
            raise VerificationFailure(
                f"формы энергии расходятся: {power_form!r} против {laplacian_form!r}"
            )
        logger.debug(f"Формы энергии совпали: {power_form!r}")
    return power_form
