import pytest
from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

from relalg import build_affine, build_doubled, build_lpn


@pytest.fixture(scope="session")
def l32():
    return build_lpn(3, 2)


@pytest.fixture(scope="session")
def l30():
    return build_lpn(3, 0)


@pytest.fixture(scope="session")
def aff3():
    return build_affine(3)


@pytest.fixture(scope="session")
def doubled3():
    return build_doubled(3)
