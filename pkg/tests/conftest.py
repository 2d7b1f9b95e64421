import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lpimprove import _fallback

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

try:
    from lpimprove import _core
except ImportError:  # pragma: no cover - only when the extension was not built
    _core = None

BACKENDS = [pytest.param(_fallback, id="python")]
BACKENDS.append(pytest.param(_core, id="compiled",
                             marks=pytest.mark.skipif(_core is None, reason="extension not built")))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def naive_convolve(f_off, f_vals, k_off, k_vals):
    """Oracle: ``(f * k)(x) = sum_y k(y) f(x - y)`` over a dict, term by term."""
    out = {}
    for i, fv in enumerate(f_vals):
        for j, kv in enumerate(k_vals):
            x = f_off + i + k_off + j
            out[x] = out.get(x, 0.0) + float(kv) * float(fv)
    return out


def trial_division_primes(n):
    return [m for m in range(2, n + 1) if all(m % q for q in range(2, math.isqrt(m) + 1))]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
