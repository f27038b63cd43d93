import functools

import pytest

from ruledfib.selftest import test_curves as _curves


@functools.lru_cache(maxsize=None)
def _cached():
    return _curves()


@pytest.fixture(scope="session")
def curves():
    return _cached()
