"""Every acceptance criterion at its stated tolerance, one line each.

The same functions back ``lpimprove check-all``; the per-criterion lines are
repeated in the terminal summary.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from lpimprove.checks import CRITERIA, apply_budget, check_all
from lpimprove.kernels import monomial_kernel


@pytest.mark.parametrize("number, crit", CRITERIA, ids=[n for n, _ in CRITERIA])
def test_criterion(number, crit):
    res = apply_budget(crit())
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, line


def doubled_kernel(d, N):
    K = monomial_kernel(d, N)
    return K.with_weights(2 * K.weights)


def test_mutation_doubled_weights_is_caught():
    res = check_all(only={"1"}, echo=None, kernel_builder=doubled_kernel)[0]
    line = "mutation (weights x2): " + ("caught" if not res.passed else "MISSED") + f" ({res.detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert not res.passed
