import pytest

from f2homalg.pipeline import Registry


@pytest.fixture(scope="session")
def registry():
    return Registry()
