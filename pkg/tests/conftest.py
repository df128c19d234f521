import numpy as np
import pytest

from field.models import FieldParams


@pytest.fixture
def gf11() -> FieldParams:
    return FieldParams.for_modulus(11)


@pytest.fixture
def gf257() -> FieldParams:
    return FieldParams.for_modulus(257)


@pytest.fixture
def production() -> FieldParams:
    return FieldParams.production()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)
