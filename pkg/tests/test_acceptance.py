"""Runs every acceptance criterion at its stated parameters and prints one PASS/FAIL line each."""
import pytest

from monored.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"{c.number:02d}-{c.name}" for c in CRITERIA])
def test_criterion(criterion, capsys):
    result = run_criterion(criterion)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
