"""
Тождество Похожаева для радиальных решений Δ²u = f(u)
"""
import logging
from dataclasses import dataclass
from typing import Tuple

from src.errors import GridRangeError
from src.exponents.constants import sphere_area
from src.radialode.field import RadialField

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PohozaevCheck:
    R: float
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def relative(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.residual) / scale if scale > 0 else 0.0


def pohozaev_sides(field: RadialField, R: float) -> Tuple[float, float]:
    """
    Левая и правая части тождества на шаре B_R

    LHS = ω[(n-4)/2·∫v² - n·∫F(u)]
    RHS = ωR^{n-1}[R v²/2 - R F(u) + R u'v' - v(u' + R u'')]

    Объемные интегралы берутся из накопленных столбцов поля:
    ∫F(u) = ½∫v² - vol.
    """
    if R < 2.0 * field.origin_start or R <= 0:
        raise GridRangeError(f"pohozaev: R={R} слишком близко к нулю")
    field.require_inside(R, 'pohozaev')
    n = field.n
    omega = sphere_area(n)
    s = field.state(R)
    u, du, v, dv = float(s.u), float(s.du), float(s.v), float(s.dv)
    vsq, vol = float(s.vsq), float(s.vol)
    potential_integral = 0.5 * vsq - vol
    potential = float(field.nonlinearity.potential(u))
    ddu = field.second_derivative(R, du, v)

    lhs = omega * ((n - 4) / 2.0 * vsq - n * potential_integral)
    rhs = omega * R ** (n - 1) * (
        R * v * v / 2.0 - R * potential + R * du * dv - v * (du + R * ddu)
    )
    return lhs, rhs


def pohozaev_check(field: RadialField, R: float) -> PohozaevCheck:
    lhs, rhs = pohozaev_sides(field, R)
    check = PohozaevCheck(R=R, lhs=lhs, rhs=rhs)
    logger.debug(f"Похожаев при R={R}: LHS={lhs!r}, RHS={rhs!r}, отн. невязка={check.relative:.3e}")
    return check


def pohozaev_residual(field: RadialField, R: float) -> float:
    """LHS - RHS тождества Похожаева на шаре радиуса R"""
    return pohozaev_check(field, R).residual
