"""One check per acceptance criterion; each prints a PASS or FAIL line."""

import pytest

from ruledfib.selftest import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(len(CRITERIA))])
def test_criterion(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
