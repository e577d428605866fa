import numpy as np
import pytest

from autbp.code import build_code


@pytest.fixture(scope="session")
def rm13():
    return build_code(1, 3)


@pytest.fixture(scope="session")
def rm25():
    return build_code(2, 5)


@pytest.fixture(scope="session")
def rm37():
    return build_code(3, 7)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
