import logfire
import numpy as np
import pytest
from cyclocode.services.numtheory import field_context
from cyclocode.services.plans import walsh_plan
from cyclocode.services.sequences import instantiate, quarter_rotation

logfire.configure(send_to_logfire=False, console=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def d3():
    return walsh_plan(3)


@pytest.fixture(scope="session")
def legendre_plan():
    return walsh_plan(1)


@pytest.fixture(scope="session")
def ctx17():
    return field_context(17)


@pytest.fixture(scope="session")
def d3_book_17(d3):
    """Unimodularized order-3 instance at p = 17 advanced by 4"""
    return instantiate(d3, 17, quarter_rotation(), unimodularize_fill=1)


@pytest.fixture
def random_binary(rng):
    def draw(length: int) -> np.ndarray:
        return (1 - 2 * rng.integers(0, 2, size=length)).astype(np.int8)

    return draw
