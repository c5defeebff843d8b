import pytest
from hypothesis import HealthCheck, settings

from gwpkit.problems import load_fixture
from gwpkit.words import GeneratorAlphabet

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def F2():
    return GeneratorAlphabet(["a", "b"])


@pytest.fixture(scope="session")
def Z2Z2():
    return GeneratorAlphabet(["x", "y"], self_inverse=["x", "y"])


@pytest.fixture(scope="session")
def fixture():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]
    return get
