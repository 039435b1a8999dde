"""
Общие фикстуры: дорогие расчеты выполняются один раз на сессию
"""
import numpy as np
import pytest

from src.exponents.constants import ProblemParams
from src.navierbvp.solver import trace_branch
from src.radialode.integrator import singular_field
from src.radialode.shooting import shoot_entire


@pytest.fixture(scope='session')
def params_13_3():
    return ProblemParams(n=13, p=3.0)


@pytest.fixture(scope='session')
def shot_13_3(params_13_3):
    return shoot_entire(params_13_3, 1.0)


@pytest.fixture(scope='session')
def shot_13_30():
    return shoot_entire(ProblemParams(n=13, p=30.0), 1.0)


@pytest.fixture(scope='session')
def singular_16_3():
    return singular_field(ProblemParams(n=16, p=3.0), np.geomspace(1e-3, 1e3, 121))


@pytest.fixture(scope='session')
def navier_branches():
    """Ветви (n=6, p=3) на сетках N=100 и N=200"""
    params = ProblemParams(n=6, p=3.0)
    return [trace_branch(params, grid_size=size) for size in (100, 200)]


@pytest.fixture
def database_url(tmp_path):
    return f"sqlite:///{tmp_path / 'runs.db'}"
