import numpy as np
import pytest

from slowlight.core import ControlField, MediumParams, SolitonParams

EPS0 = 2.1
OMEGA0 = 2.0
NU0 = 10.0
# w0 for lambda = -2.1i, Omega0 = 2 (50-digit mpmath evaluation).
W0_DEFAULT = 0.72984378812835746443883681678713124791257815472782j


@pytest.fixture
def medium():
    return MediumParams(nu0=NU0, delta=0.0, c=1.0)


@pytest.fixture
def soliton():
    return SolitonParams.imaginary(EPS0, phi0=-2.6)


@pytest.fixture
def control():
    return ControlField(omega0=OMEGA0, alpha=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20041007)
