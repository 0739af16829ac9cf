import pytest

from pinpowder.substitution import generate_patch


@pytest.fixture(scope="session")
def patch_level2():
    return generate_patch(2)


@pytest.fixture(scope="session")
def patch_level4():
    return generate_patch(4)


@pytest.fixture(scope="session")
def patch_level5():
    return generate_patch(5)


@pytest.fixture(scope="session")
def patch_level6():
    return generate_patch(6)


@pytest.fixture(scope="session")
def patch_level8():
    return generate_patch(8)
