import math

import pytest

from src.errors import DomainError
from src.exponents.constants import (
    ExtendedReal,
    ProblemParams,
    derive_constants,
    hardy_rellich_constant,
    joseph_lundgren_exponent,
    monotonicity_root_gamma,
    negative_scaling_constants,
    sobolev_exponent,
    sphere_area,
)
from src.exponents.stability import (
    exceeds_joseph_lundgren,
    homogeneous_triviality_margins,
    is_singular_solution_stable,
    min_stable_dimension,
    negative_exponent_condition,
    negative_exponent_scan,
    stability_predicates,
    triviality_hypothesis,
)


def test_extended_real_ordering_and_json():
    inf = ExtendedReal.infinity()
    assert inf > 1e308
    assert ExtendedReal.finite(2.0) < inf
    assert ExtendedReal.finite(2.0) == 2.0
    assert float(inf) == math.inf
    assert inf.to_json() == 'inf'
    assert ExtendedReal.finite(1.5).to_json() == 1.5


@pytest.mark.parametrize('n', [1, 2, 3, 4])
def test_sobolev_exponent_infinite_in_low_dimensions(n):
    assert not sobolev_exponent(n).is_finite


def test_sobolev_exponent_values():
    assert sobolev_exponent(12) == 2.0
    assert sobolev_exponent(13).value == pytest.approx(17 / 9)


def test_joseph_lundgren_exponent():
    assert not joseph_lundgren_exponent(12).is_finite
    assert joseph_lundgren_exponent(13).value == pytest.approx(28.17, abs=0.01)
    assert joseph_lundgren_exponent(13) > sobolev_exponent(13)


@pytest.mark.parametrize('n, expected', [
    (2, 2 * math.pi),
    (3, 4 * math.pi),
    (4, 2 * math.pi ** 2),
    (5, 8 * math.pi ** 2 / 3),
    (7, 16 * math.pi ** 3 / 15),
])
def test_sphere_area_matches_factorial_values(n, expected):
    assert sphere_area(n) == pytest.approx(expected, rel=1e-13)


def test_derived_constants_13_3():
    c = derive_constants(ProblemParams(n=13, p=3.0))
    assert c.gamma == 2.0
    assert c.K0 == pytest.approx(504.0)
    assert c.alpha == pytest.approx(8.0)
    assert c.beta == pytest.approx(-18.0)
    assert c.cNP == pytest.approx(50.0)
    assert c.J1 == pytest.approx(46.0)
    assert c.J2 == pytest.approx(504.0)
    assert c.hardyRellich == pytest.approx(855.5625)
    assert c.singular_amplitude == pytest.approx(math.sqrt(504.0))


def test_singular_amplitude_16_3():
    assert derive_constants(ProblemParams(n=16, p=3.0)).K0 == pytest.approx(960.0)


@pytest.mark.parametrize('n, p', [(5, 10.0), (13, 3.0), (16, 3.0), (13, 30.0), (40, 1.5)])
def test_j2_equals_k0(n, p):
    c = derive_constants(ProblemParams(n=n, p=p))
    assert c.J2 == pytest.approx(c.K0, rel=1e-12)


def test_alpha_minus_beta_exceeds_one_when_supercritical():
    for n in range(5, 31):
        p_s = sobolev_exponent(n).value
        for factor in (1.001, 1.5, 3.0, 20.0):
            c = derive_constants(ProblemParams(n=n, p=p_s * factor))
            assert c.alpha - c.beta > 1
        # смена знака α - β - 1 лежит ниже pS: γ больше (n-4)/2
        assert monotonicity_root_gamma(n) > (n - 4) / 2


def test_problem_params_domain():
    with pytest.raises(DomainError):
        ProblemParams(n=0, p=3.0)
    with pytest.raises(DomainError):
        ProblemParams(n=5, p=1.0)
    with pytest.raises(DomainError):
        ProblemParams(n=5, p=float('nan'))


def test_supercritical_requirement():
    with pytest.raises(DomainError):
        is_singular_solution_stable(ProblemParams(n=6, p=3.0))


@pytest.mark.parametrize('n, p, stable', [
    (13, 3.0, False),
    (18, 3.0, False),
    (19, 3.0, True),
    (13, 30.0, True),
    (12, 100.0, False),
])
def test_stability_predicates_agree(n, p, stable):
    assert stability_predicates(ProblemParams(n=n, p=p)) == (stable, stable, stable)


def test_min_stable_dimension_for_cubic():
    assert min_stable_dimension(3.0) == 19
    assert hardy_rellich_constant(19) == pytest.approx(5076.5625)


@pytest.mark.parametrize('p', [1.001, 1.05, 30.0, 1e6])
def test_min_stable_dimension_is_minimal(p):
    n_p = min_stable_dimension(p)
    assert is_singular_solution_stable(ProblemParams(n=n_p, p=p))
    below = ProblemParams(n=n_p - 1, p=p)
    assert not below.is_supercritical or not is_singular_solution_stable(below)


def test_min_stable_dimension_grows_as_p_approaches_one():
    assert min_stable_dimension(1.0001) > 10_000
    assert min_stable_dimension(1e6) == 13


def test_boundary_exponent_is_stable_under_all_predicates():
    params = ProblemParams(n=13, p=joseph_lundgren_exponent(13).value)
    assert is_singular_solution_stable(params)
    assert exceeds_joseph_lundgren(params)
    assert min_stable_dimension(params.p) == 13


def test_triviality_hypothesis_and_margins():
    params = ProblemParams(n=13, p=3.0)
    assert triviality_hypothesis(params)
    assert all(margin > 0 for margin in homogeneous_triviality_margins(params))
    assert not triviality_hypothesis(ProblemParams(n=13, p=30.0))
    assert not all(margin > 0 for margin in homogeneous_triviality_margins(ProblemParams(n=20, p=1.25)))
    with pytest.raises(DomainError):
        homogeneous_triviality_margins(ProblemParams(n=4, p=3.0))


def test_negative_exponent_condition():
    assert negative_exponent_scan(2.0, 1, 10) == [1, 2, 3, 4]
    assert negative_exponent_condition(ProblemParams(n=5, p=5.0))
    assert negative_exponent_condition(ProblemParams(n=13, p=3.0))


def test_negative_scaling_constants_5_5():
    scaling = negative_scaling_constants(ProblemParams(n=5, p=5.0))
    assert scaling.mu == pytest.approx(2 / 3)
    assert scaling.K_tilde == pytest.approx(440 / 81)
    assert scaling.c0 == pytest.approx(34 / 9)
    assert scaling.homogeneous_amplitude == pytest.approx((440 / 81) ** (-1 / 6))
