import pytest
from hypothesis import settings

from oqwalk import BUILTIN_NAMES, builtin

# Deterministic hypothesis runs: same examples every time, no flaky deadlines.
settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def std_model():
    return builtin("std_example")


@pytest.fixture(scope="session")
def periodic_model():
    return builtin("periodic_example")


@pytest.fixture(scope="session")
def breakdown_model():
    return builtin("breakdown_example")


@pytest.fixture(scope="session")
def antidiag_model():
    return builtin("antidiag_example")


@pytest.fixture(scope="session")
def classical_model():
    return builtin("classical_dilation")


@pytest.fixture(scope="session")
def all_builtins():
    return {name: builtin(name) for name in BUILTIN_NAMES}
