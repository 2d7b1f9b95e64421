import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import trial_division_primes
from lpimprove import primes
from lpimprove.primes import (
    chebyshev_theta,
    is_prime_trial,
    nth_prime_bounds,
    nth_prime_bounds_check,
    prime_sum_estimate,
    sieve,
)


class TestSieve:
    @pytest.mark.parametrize("n, expected", [(2, [2]), (3, [2, 3]), (10, [2, 3, 5, 7]),
                                             (30, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29])])
    def test_small_tables(self, n, expected):
        assert sieve(n).primes.tolist() == expected

    def test_count_1000(self):
        assert sieve(1000).count == 168 == len(trial_division_primes(1000))

    def test_exhaustive_against_trial_division(self):
        assert sieve(10**4).primes.tolist() == trial_division_primes(10**4)

    @given(st.integers(2, 3000))
    def test_every_limit(self, n):
        assert sieve(n).primes.tolist() == trial_division_primes(n)

    def test_segmented_path_matches(self, monkeypatch):
        monkeypatch.setattr(primes, "SEGMENTED_ABOVE", 100)
        monkeypatch.setattr(primes, "SEGMENT_SPAN", 64)
        for n in (101, 1000, 4097, 20011):
            assert primes._sieve_array(n).tolist() == trial_division_primes(n)

    def test_large_segmented_table_sampled(self):
        t = sieve(2 * 10**7)
        assert t.count == 1270607
        rng = np.random.default_rng(1)
        sample = rng.choice(t.primes, 2000)
        assert is_prime_trial(sample).all()
        assert t.primes[-1] == 19999999

    def test_table_helpers(self):
        t = sieve(100)
        assert t.nth(1) == 2 and t.nth(25) == 97
        assert t.upto(20).tolist() == [2, 3, 5, 7, 11, 13, 17, 19]
        np.testing.assert_allclose(t.log_weights, np.log(t.primes))
        with pytest.raises(IndexError):
            t.nth(26)

    @pytest.mark.parametrize("n", [1, 0, 10**9 + 1])
    def test_range(self, n):
        with pytest.raises(ValueError):
            sieve(n)

    def test_verification_catches_corruption(self):
        bad = primes.PrimeTable(50, np.array([2, 3, 5, 7, 9]), np.zeros(5))
        with pytest.raises(RuntimeError):
            primes._verify(bad, np.random.default_rng(0))

    def test_trial_division_oracle(self):
        v = np.arange(-3, 200)
        assert v[is_prime_trial(v)].tolist() == trial_division_primes(199)


class TestTheta:
    def test_examples(self):
        assert chebyshev_theta(10) == pytest.approx(math.log(210), rel=1e-15)
        assert chebyshev_theta(10) == pytest.approx(5.34711, abs=1e-5)
        assert chebyshev_theta(2) == pytest.approx(math.log(2))

    def test_pnt_ballpark(self):
        assert 0.99 < chebyshev_theta(10**6) / 10**6 < 1.01
        for n in (10**4, 10**5):
            assert 0.8 <= chebyshev_theta(n) / n <= 1.2

    def test_increments(self):
        th = [chebyshev_theta(n) for n in range(2, 200)]
        ps = set(trial_division_primes(200))
        for n, (a, b) in zip(range(3, 200), zip(th, th[1:])):
            assert b >= a
            if n in ps:
                assert b - a == pytest.approx(math.log(n))
            else:
                assert b == a


class TestNthPrime:
    def test_examples(self):
        lo, hi = nth_prime_bounds([6, 10])
        assert lo[0] == pytest.approx(8.25, abs=0.01) and hi[0] == pytest.approx(14.25, abs=0.01)
        # 10 (ln 10 + ln ln 10) = 31.366; the window has width n = 10
        assert hi[1] == pytest.approx(10 * (math.log(10) + math.log(math.log(10))), rel=1e-15)
        assert lo[1] == pytest.approx(21.37, abs=0.01) and hi[1] == pytest.approx(31.37, abs=0.01)
        assert lo[1] <= 29 <= hi[1]
        assert sieve(100).nth(6) == 13 and sieve(100).nth(10) == 29

    def test_check_window(self):
        rep = nth_prime_bounds_check(10**4)
        assert rep.passed and rep.checked == 10**4 - 5
        assert rep.min_lower_slack > 0 and rep.min_upper_slack > 0

    def test_small_n_excluded(self):
        with pytest.raises(ValueError):
            nth_prime_bounds_check(5)
        # the upper bound fails below the window: p_5 = 11 > 10.43
        _, hi = nth_prime_bounds(np.arange(2, 6))
        assert np.all(sieve(20).primes[1:5] > hi)


class TestPrimeSum:
    def test_example(self):
        ps = prime_sum_estimate(0.5, 10)
        exact = math.fsum(math.log(q) / math.sqrt(q) for q in (2, 3, 5, 7))
        assert ps.sum == pytest.approx(exact, rel=1e-14)
        assert ps.ratio == pytest.approx(exact / math.sqrt(10), rel=1e-14)
        assert ps.ratio == pytest.approx(0.8157, abs=1e-3)

    @given(st.floats(0.01, 0.99))
    def test_single_prime(self, lam):
        assert prime_sum_estimate(lam, 2).sum == pytest.approx(math.log(2) / 2**lam, rel=1e-14)

    @pytest.mark.parametrize("lam", [0.3, 0.5, 0.7])
    def test_ratio_bounded(self, lam):
        ratios = [prime_sum_estimate(lam, 10**k).ratio for k in range(2, 8)]
        assert max(ratios) / min(ratios) < 10

    def test_rejects(self):
        with pytest.raises(ValueError):
            prime_sum_estimate(1.0, 10)
        with pytest.raises(ValueError):
            prime_sum_estimate(0.5, 1)
