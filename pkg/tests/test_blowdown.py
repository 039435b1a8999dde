import numpy as np
import pytest

from src.blowdown.growth import growth_bound_check, growth_integral
from src.blowdown.pohozaev import pohozaev_check, pohozaev_residual
from src.blowdown.rescaling import blowdown_trend, homogeneity_deviation, resample, rescale
from src.energy.monotonicity import energy_radial
from src.errors import DomainError, GridRangeError, TooFewSamples
from src.exponents.constants import ProblemParams
from src.radialode.integrator import integrate, negative_homogeneous_field


def test_rescale_identity(shot_13_3):
    field = shot_13_3.field
    same = rescale(field, 1.0).field
    assert np.array_equal(same.radii, field.radii)
    assert np.array_equal(same.u, field.u)


def test_rescale_rejects_nonpositive_lambda(shot_13_3):
    with pytest.raises(DomainError):
        rescale(shot_13_3.field, 0.0)


def test_singular_field_is_scale_invariant(singular_16_3):
    r = np.geomspace(0.1, 1.0, 7)
    for lam in (0.5, 2.0, 10.0):
        scaled = rescale(singular_16_3, lam).field
        assert scaled.state(r).u == pytest.approx(singular_16_3.state(r).u, rel=1e-12)
        assert scaled.state(r).vol == pytest.approx(singular_16_3.state(r).vol, rel=1e-10)


def test_rescaled_energy_is_energy_at_scaled_radius(shot_13_3):
    field = shot_13_3.field
    scaled = rescale(field, 2.0).field
    for r in (0.2, 0.5, 1.0):
        assert energy_radial(scaled, r) == pytest.approx(energy_radial(field, 2.0 * r), rel=1e-9)


def test_rescale_composition(shot_13_3):
    field = shot_13_3.field
    radii = np.geomspace(0.2, 0.6, 5)
    composed = rescale(rescale(field, 2.0).field, 1.5).field.state(radii).u
    direct = rescale(field, 3.0).field.state(radii).u
    assert composed == pytest.approx(direct, rel=1e-12)


def test_homogeneity_deviation(singular_16_3, shot_13_3):
    assert homogeneity_deviation(singular_16_3, 0.5, 2.0) <= 1e-10
    assert homogeneity_deviation(shot_13_3.field, 0.1, 1.0) > 0
    with pytest.raises(DomainError):
        homogeneity_deviation(shot_13_3.field, 1.0, 0.5)
    with pytest.raises(GridRangeError):
        homogeneity_deviation(singular_16_3, 0.5, 2e3)


def test_blowdown_trend_matches_scaled_annulus(shot_13_3):
    field = shot_13_3.field
    samples = blowdown_trend(field, [1.0, 0.5, 2.0], r1=0.5, r2=1.0)
    assert [sample.lam for sample in samples] == [0.5, 1.0, 2.0]
    for sample in samples:
        direct = homogeneity_deviation(field, 0.5 * sample.lam, 1.0 * sample.lam)
        assert sample.deviation == pytest.approx(direct, rel=1e-6)
        gap = energy_radial(field, sample.lam) - energy_radial(field, 0.5 * sample.lam)
        assert sample.energy_gap == pytest.approx(gap, rel=1e-8, abs=1e-12)
        assert sample.energy_gap >= 0


def test_resample_preserves_columns(shot_13_3):
    field = shot_13_3.field
    radii = np.geomspace(0.1, 1.0, 200)
    moved = resample(field, radii)
    assert moved.u == pytest.approx(field.state(radii).u, rel=1e-5)


def test_pohozaev_zero_field(params_13_3):
    zero = integrate(params_13_3, 0.0, 0.0)
    check = pohozaev_check(zero, 1.0)
    assert check.lhs == 0.0 and check.rhs == 0.0
    assert check.relative == 0.0


def test_pohozaev_entire_solution(shot_13_3):
    field = shot_13_3.field
    radii = [R for R in (1.0, 5.0, 20.0) if R <= field.r_max]
    for R in radii:
        assert pohozaev_check(field, R).relative <= 1e-6


def test_pohozaev_singular_solution(singular_16_3):
    for R in (0.5, 1.0, 4.0):
        check = pohozaev_check(singular_16_3, R)
        assert check.relative <= 1e-10
        assert pohozaev_residual(singular_16_3, R) == pytest.approx(check.residual)


def test_pohozaev_negative_homogeneous():
    field = negative_homogeneous_field(ProblemParams(n=5, p=5.0), np.geomspace(0.1, 10.0, 41))
    assert pohozaev_check(field, 2.0).relative <= 1e-10


def test_pohozaev_radius_errors(shot_13_3):
    with pytest.raises(GridRangeError):
        pohozaev_check(shot_13_3.field, 1e-6)
    with pytest.raises(GridRangeError):
        pohozaev_check(shot_13_3.field, 10 * shot_13_3.field.r_max)


def test_growth_of_singular_solution_is_exact(singular_16_3):
    fit = growth_bound_check(singular_16_3, np.geomspace(5.0, 50.0, 20))
    assert not fit.degenerate
    assert fit.bound == pytest.approx(8.0)
    assert fit.exponent == pytest.approx(fit.bound, abs=1e-8)
    assert fit.within_bound


def test_growth_integral_of_singular_solution(singular_16_3):
    values = growth_integral(singular_16_3, np.array([1.0, 2.0]))
    assert values[1] / values[0] == pytest.approx(2.0 ** 8, rel=1e-12)


def test_growth_of_zero_field_is_degenerate(params_13_3):
    zero = integrate(params_13_3, 0.0, 0.0)
    fit = growth_bound_check(zero, np.geomspace(5.0, 50.0, 10))
    assert fit.degenerate
    assert fit.within_bound


def test_growth_of_stable_entire_solution(shot_13_30):
    field = shot_13_30.field
    if field.r_max < 10.0:
        pytest.skip(f"радиус доверия {field.r_max:.3g} короче окна подгонки")
    fit = growth_bound_check(field, np.geomspace(1.0, min(50.0, field.r_max), 30), fit_window=(5.0, 50.0))
    assert not fit.degenerate
    assert fit.within_bound


def test_growth_argument_errors(singular_16_3):
    with pytest.raises(TooFewSamples):
        growth_bound_check(singular_16_3, [1.0, 2.0, 3.0], fit_window=(10.0, 20.0))
    field = negative_homogeneous_field(ProblemParams(n=5, p=5.0), np.geomspace(0.1, 10.0, 41))
    with pytest.raises(DomainError):
        growth_bound_check(field, [1.0, 2.0])


def test_rescaled_columns_follow_base_grid(shot_13_3):
    field = shot_13_3.field
    scaled = rescale(field, 2.0).field
    inside = scaled.radii[(scaled.radii > field.r_min) & (scaled.radii < scaled.r_max)]
    assert np.all(np.isin(inside, field.radii))
    below = scaled.radii[scaled.radii < field.r_min]
    assert np.all(np.isin(below, field.radii / 2.0))
    assert scaled.r_max == pytest.approx(field.r_max / 2.0)
    assert scaled.u == pytest.approx(scaled.state(scaled.radii).u, rel=1e-4)
