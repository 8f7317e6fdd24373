import numpy as np
import pytest

from nodalgrowth.geometry import FLAT_TORUS, UNIT_SPHERE


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=[FLAT_TORUS, UNIT_SPHERE], ids=["torus", "sphere"])
def surface(request):
    return request.param
