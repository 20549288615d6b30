import numpy as np
import pytest

from betajacobi import JacobiParams

# dyadic parameter values so Fraction(value) conversions in the exact
# oracles are lossless
PARAM_GRID = [
    JacobiParams(0.5, 0.5, 0.0),
    JacobiParams(0.5, -0.25, 1.75),
    JacobiParams(-0.5, 1.75, 0.5),
    JacobiParams(0.25, 0.75, 2.5),
    JacobiParams(1.5, -0.75, 1.0),
]

DENSITY_GRID = [
    JacobiParams(0.5, 0.5, 1.0),
    JacobiParams(-0.3, 0.8, 2.0),
    JacobiParams(0.4, 0.6, 1.5),
]


@pytest.fixture(params=PARAM_GRID, ids=lambda p: f"a{p.a}_b{p.b}_c{p.c}")
def params(request) -> JacobiParams:
    return request.param


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
