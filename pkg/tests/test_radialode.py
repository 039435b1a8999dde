import math

import numpy as np
import pytest

from src.errors import (
    BracketNotFound,
    DomainError,
    GridRangeError,
    InputFormatError,
    SupportViolation,
)
from src.exponents.constants import ProblemParams, derive_constants
from src.radialode.field import RadialField
from src.radialode.integrator import (
    EVENT_BLOWUP,
    EVENT_CROSSING,
    EVENT_NONE,
    IntegrationConfig,
    integrate,
    output_grid,
    singular_field,
    taylor_start,
)
from src.radialode.nonlinearity import NegativePowerNonlinearity, PowerNonlinearity
from src.radialode.oracle import (
    hardy_rellich_family,
    hardy_rellich_profile,
    relative_residual,
    residual,
    smooth_step,
    stability_form,
)
from src.radialode.shooting import shoot_entire
from src.radialode.stencils import centered_derivatives, fornberg_weights, radial_laplacian


def test_fornberg_uniform_second_difference():
    weights = fornberg_weights(0.0, np.array([-1.0, 0.0, 1.0]), 2)
    assert weights[2] == pytest.approx([1.0, -2.0, 1.0])
    assert weights[1] == pytest.approx([-0.5, 0.0, 0.5])


def test_radial_laplacian_exact_on_quartics():
    radii = np.geomspace(0.5, 2.0, 30)
    n = 7
    values = radii ** 4 - 3 * radii ** 2
    expected = 4 * (4 + n - 2) * radii ** 2 - 6 * n
    assert radial_laplacian(values, radii, n) == pytest.approx(expected, rel=1e-8, abs=1e-8)


def test_centered_derivatives_shape():
    radii = np.linspace(1.0, 2.0, 11)
    result = centered_derivatives(radii ** 3, radii, order=2)
    assert result.shape == (2, 7)
    assert result[0] == pytest.approx(3 * radii[2:-2] ** 2)
    assert result[1] == pytest.approx(6 * radii[2:-2])


def test_output_grid_density():
    grid = output_grid(1e-6, 100.0, 200)
    assert grid[0] == 1e-6 and grid[-1] == 100.0
    assert 1601 <= len(grid) <= 1602
    ratios = grid[1:] / grid[:-1]
    assert ratios == pytest.approx(np.full_like(ratios, ratios[0]), rel=1e-9)


def test_taylor_start():
    y0 = taylor_start(13, PowerNonlinearity(3.0), 1.0, -2.0, 1e-3)
    assert y0[0] == pytest.approx(1.0 - 2.0 * 1e-6 / 26)
    assert y0[1] == pytest.approx(-2.0 * 1e-3 / 13)
    assert y0[2] == pytest.approx(-2.0 + 1e-6 / 26)
    assert y0[3] == pytest.approx(1e-3 / 13)


def test_integration_config_validation():
    with pytest.raises(DomainError):
        IntegrationConfig(origin_start=0.5)
    with pytest.raises(DomainError):
        IntegrationConfig(rel_tol=0.0)
    cfg = IntegrationConfig.from_config(r_max=5.0, rel_tol=None)
    assert cfg.r_max == 5.0
    assert cfg.threshold_for(2.0) == pytest.approx(2.0 * cfg.blowup_factor)
    assert IntegrationConfig(blowup_threshold=5.0).threshold_for(2.0) == 5.0


def test_zero_data_gives_zero_field(params_13_3):
    field = integrate(params_13_3, 0.0, 0.0)
    assert field.event == EVENT_NONE
    assert np.all(field.u == 0)
    assert residual(field) == 0.0


def test_event_classes(params_13_3):
    assert integrate(params_13_3, 1.0, 0.0).event == EVENT_BLOWUP
    assert integrate(params_13_3, 1.0, 5.0).event == EVENT_BLOWUP
    crossing = integrate(params_13_3, 1.0, -100.0)
    assert crossing.event == EVENT_CROSSING
    assert abs(crossing.u[-1]) < 1e-6


def test_integrated_field_passes_oracle(params_13_3):
    field = integrate(params_13_3, 1.0, 0.0, IntegrationConfig.from_config(r_max=1.0))
    scale = 1 + float(np.max(np.abs(field.u))) ** params_13_3.p
    assert residual(field) <= 1e-6 * scale


def test_corrupted_field_fails_oracle(params_13_3):
    field = integrate(params_13_3, 1.0, 0.0, IntegrationConfig.from_config(r_max=1.0))
    corrupted = RadialField.from_samples(
        params_13_3, field.radii, 1.01 * field.u, field.du, field.v, field.dv,
    )
    assert relative_residual(corrupted) > 1e-4


def test_oracle_checks_stored_slope_against_u(params_13_3):
    radii = np.geomspace(0.1, 1.0, 50)
    zeros = np.zeros_like(radii)
    field = RadialField.from_samples(params_13_3, radii, 1e-3 * radii, zeros, zeros, zeros)
    assert residual(field) == pytest.approx(1e-3, rel=1e-6)


@pytest.mark.parametrize('n, p', [(13, 3.0), (16, 3.0), (13, 30.0)])
def test_singular_field_residual(n, p):
    field = singular_field(ProblemParams(n=n, p=p), np.linspace(0.5, 2.0, 4001))
    assert relative_residual(field) <= 1e-8


def test_singular_field_values_and_homogeneity():
    params = ProblemParams(n=16, p=3.0)
    field = singular_field(params, np.geomspace(0.1, 10.0, 50))
    assert float(field.state(1.0).u) == pytest.approx(math.sqrt(960.0))
    r = np.array([0.5, 1.0, 2.0])
    for lam in (0.5, 3.0):
        scaled = lam ** 2 * field.state(lam * r).u
        assert scaled == pytest.approx(field.state(r).u, rel=1e-13)


def test_singular_field_requires_supercritical():
    with pytest.raises(DomainError):
        singular_field(ProblemParams(n=6, p=3.0), [1.0, 2.0])


def test_field_validation():
    params = ProblemParams(n=5, p=3.0)
    with pytest.raises(InputFormatError):
        RadialField.from_samples(
            params, [1.0, 0.5, 2.0], [0, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0],
            vol=[0, 0, 0], vsq=[0, 0, 0],
        )
    field = singular_field(ProblemParams(n=13, p=3.0), np.geomspace(0.5, 2.0, 10))
    with pytest.raises(GridRangeError):
        field.state(3.0)
    with pytest.raises(ValueError):
        field.u[0] = 1.0


def test_shooting_13_3(shot_13_3):
    assert shot_13_3.converged
    assert shot_13_3.b_star < 0
    low, high = shot_13_3.bracket
    assert low <= shot_13_3.b_star <= high
    assert abs(high - low) <= 1e-12 * abs(shot_13_3.b_star)
    assert low < high
    assert shot_13_3.bracket_events == (EVENT_CROSSING, EVENT_BLOWUP)
    assert shot_13_3.trust_radius > 20.0
    assert shot_13_3.field.r_max == pytest.approx(min(shot_13_3.trust_radius, 100.0))
    assert shot_13_3.decay_exponent == pytest.approx(shot_13_3.expected_decay, abs=0.1)
    assert np.all(shot_13_3.field.u > 0)


def test_shooting_scaling_law(shot_13_3, params_13_3):
    shot_16 = shoot_entire(params_13_3, 16.0)
    assert shot_16.b_star == pytest.approx(256.0 * shot_13_3.b_star, rel=1e-8)
    r = np.geomspace(0.1, 1.0, 7)
    assert shot_16.field.state(r).u == pytest.approx(16.0 * shot_13_3.field.state(4.0 * r).u, rel=1e-6)


def test_shooting_is_deterministic(params_13_3, shot_13_3):
    again = shoot_entire(params_13_3, 1.0)
    assert again.b_star == shot_13_3.b_star
    assert np.array_equal(again.field.u, shot_13_3.field.u)


def test_shooting_small_amplitude_tends_to_zero(params_13_3, shot_13_3):
    small = shoot_entire(params_13_3, 1e-3)
    assert small.converged
    assert small.b_star == pytest.approx(1e-6 * shot_13_3.b_star, rel=1e-12)
    assert abs(small.b_star) < 1e-5 * abs(shot_13_3.b_star)
    assert small.field.r_max == pytest.approx(100.0)
    assert np.all(small.field.u > 0)


def test_shooting_tail_follows_singular_amplitude(shot_13_3):
    field = shot_13_3.field
    tail = field.radii >= 20.0
    amplitude = derive_constants(field.params).singular_amplitude
    assert np.count_nonzero(tail) > 10
    assert np.all(np.abs(field.u[tail] * field.radii[tail] ** 2 / amplitude - 1.0) < 0.03)


def test_shooting_errors(params_13_3):
    with pytest.raises(DomainError):
        shoot_entire(params_13_3, -1.0)
    with pytest.raises(BracketNotFound):
        shoot_entire(params_13_3, 1.0, IntegrationConfig.from_config(r_max=1e-5))


def test_integration_scaling_equivariance(params_13_3):
    cfg = IntegrationConfig.from_config(r_max=0.5)
    base = integrate(params_13_3, 1.0, -3.0, cfg)
    lam = 2.0
    scaled = integrate(params_13_3, lam ** 2, -3.0 * lam ** 4, IntegrationConfig.from_config(r_max=0.2))
    r = np.geomspace(0.01, 0.2, 9)
    assert scaled.state(r).u == pytest.approx(lam ** 2 * base.state(lam * r).u, rel=1e-8)


def test_negative_power_nonlinearity_domain():
    nonlinearity = NegativePowerNonlinearity(5.0)
    assert nonlinearity.force(1.0) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        nonlinearity.force(np.array([1.0, 0.0]))


def test_smooth_step():
    x = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    assert smooth_step(x) == pytest.approx([0.0, 0.0, 0.5, 1.0, 1.0])


def test_stability_form_of_zero_field(params_13_3):
    zero = integrate(params_13_3, 0.0, 0.0)
    radii, phi = hardy_rellich_profile(13, -1.0, 1.0)
    value = stability_form(zero, radii, phi)
    assert value > 0
    assert stability_form(zero, radii, 3.0 * phi) == pytest.approx(9.0 * value, rel=1e-12)


def test_stability_form_support_violation(params_13_3):
    zero = integrate(params_13_3, 0.0, 0.0)
    radii = np.geomspace(0.5, 2.0, 100)
    with pytest.raises(SupportViolation):
        stability_form(zero, radii, np.ones_like(radii))


def test_stability_form_sign_matches_predicate():
    grid = np.geomspace(1e-3, 1e3, 121)
    unstable = singular_field(ProblemParams(n=13, p=3.0), grid)
    values = [stability_form(unstable, r, phi) for r, phi in hardy_rellich_family(13)]
    assert min(values) < 0

    stable = singular_field(ProblemParams(n=19, p=3.0), grid)
    family = hardy_rellich_family(19)
    assert len(family) == 20
    assert all(stability_form(stable, r, phi) >= 0 for r, phi in family)


def test_amplitude_ratio_reported(shot_13_3):
    assert math.isfinite(shot_13_3.amplitude_ratio)
    assert derive_constants(shot_13_3.field.params).gamma == 2.0
