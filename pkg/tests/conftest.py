import pytest
from hypothesis import settings

from tilesub import bundled_rule

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def pinwheel():
    return bundled_rule("pinwheel")


@pytest.fixture(scope="session")
def chair():
    return bundled_rule("chair")


@pytest.fixture(scope="session")
def imbalance():
    return bundled_rule("imbalance")
