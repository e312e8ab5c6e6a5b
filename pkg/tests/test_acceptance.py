"""Every acceptance criterion at its stated tolerance; one summary line each."""
import pytest

from owc.validation import ACCEPTANCE_CHECKS


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(ACCEPTANCE_CHECKS))
def test_criterion(number, acceptance_log):
    result = ACCEPTANCE_CHECKS[number]()
    acceptance_log.append(result)
    print(result.line())
    assert result.passed, result.line()
