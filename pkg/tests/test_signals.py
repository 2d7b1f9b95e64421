import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import naive_convolve
from lpimprove.signals import (
    AUTO_FFT_THRESHOLD,
    ExponentPair,
    Signal,
    convolve,
    correlate_on,
    distribution_function,
    dual_exponent,
    fft_convolve,
    lp_norm,
    next_pow2,
    signals_from_json_lines,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
signals = st.builds(
    Signal,
    st.integers(-50, 50),
    arrays(np.float64, st.integers(1, 40), elements=finite),
)
nonneg_signals = st.builds(
    Signal,
    st.integers(-50, 50),
    arrays(np.float64, st.integers(1, 40), elements=st.floats(0, 1e3)),
)


class TestSignal:
    def test_values_are_read_only_copies(self):
        src = np.array([1.0, 2.0])
        s = Signal(3, src)
        src[0] = 99.0
        assert s.values[0] == 1.0
        with pytest.raises(ValueError):
            s.values[0] = 5.0

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Signal(0, [1.0, math.nan])

    def test_geometry(self):
        s = Signal(-2, [0.0, 1.0, 0.0, 3.0, 0.0])
        assert (s.start, s.stop, len(s), s.nnz) == (-2, 3, 5, 2)
        assert s.at(-1) == 1.0 and s.at(1) == 3.0 and s.at(10) == 0.0
        np.testing.assert_array_equal(s.at([-5, -1, 1, 7]), [0, 1, 3, 0])

    def test_trimmed_drops_outer_zeros(self):
        t = Signal(-2, [0.0, 1.0, 0.0, 3.0, 0.0]).trimmed()
        assert t.offset == -1
        np.testing.assert_array_equal(t.values, [1.0, 0.0, 3.0])
        assert Signal(4, [0.0, 0.0]).trimmed().is_zero()

    def test_constructors(self):
        assert Signal.delta(5).at(5) == 1.0 and len(Signal.delta(5)) == 1
        ind = Signal.indicator(-3, 3)
        assert len(ind) == 7 and ind.nnz == 7
        assert Signal.indicator(2, 1).is_zero()
        m = Signal.from_mapping({-2: 1.5, 3: 2.0})
        assert m.offset == -2 and len(m) == 6 and m.at(3) == 2.0
        assert Signal.from_mapping({}).is_zero()

    def test_reflect_shift_scale(self):
        s = Signal(1, [1.0, 2.0, 3.0])
        r = s.reflected()
        assert [r.at(-x) for x in (1, 2, 3)] == [1.0, 2.0, 3.0]
        assert s.shifted(4).at(5) == 1.0
        assert s.scaled(-2).at(3) == -6.0

    def test_restricted_zero_fills(self):
        s = Signal(0, [1.0, 2.0])
        r = s.restricted(-1, 3)
        np.testing.assert_array_equal(r.values, [0, 1, 2, 0, 0])

    @given(signals)
    def test_json_round_trip(self, s):
        line = s.to_json()
        assert "\n" not in line
        back = Signal.from_json(line)
        assert back.offset == s.offset
        np.testing.assert_array_equal(back.values, s.values)

    def test_json_lines(self):
        text = Signal.delta(1).to_json() + "\n\n" + Signal(0, [1, 2]).to_json() + "\n"
        out = signals_from_json_lines(text.splitlines())
        assert len(out) == 2 and out[1].at(1) == 2.0

    def test_csv_export(self):
        text = Signal(-1, [0.5, 2.0]).to_csv()
        assert text.splitlines() == ["index,value", "-1,0.5", "0,2.0"]
        buf = io.StringIO()
        assert Signal(0, [1.0]).to_csv(buf) is None
        assert buf.getvalue().startswith("index,value")


class TestExponents:
    @pytest.mark.parametrize("p, expected", [(2, 2), (1.5, 3), (4 / 3, 4)])
    def test_dual_exponent_examples(self, p, expected):
        assert dual_exponent(p) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("p", [1, 0.5, -2])
    def test_dual_exponent_rejects(self, p):
        with pytest.raises(ValueError):
            dual_exponent(p)

    @given(st.floats(1.0001, 100))
    def test_dual_is_involution(self, p):
        assert dual_exponent(dual_exponent(p)) == pytest.approx(p, rel=1e-9)

    @given(st.floats(1.0001, 2.0))
    def test_exponent_pair_invariants(self, p):
        e = ExponentPair(p)
        assert 1 / e.p + 1 / e.p_prime == pytest.approx(1.0, abs=1e-14)
        assert e.p_prime >= 2 - 1e-12

    @given(st.floats(1.5001, 2.0))
    def test_lambda_range_d2(self, p):
        lam = ExponentPair(p).lam(2)
        assert 0 < lam <= 1 + 1e-15

    def test_lambda_one_iff_p_two(self):
        assert ExponentPair(2.0).lam(2) == 1.0
        assert ExponentPair(1.9).lam(2) < 1.0

    @pytest.mark.parametrize("p", [1.0, 2.5])
    def test_exponent_pair_range(self, p):
        with pytest.raises(ValueError):
            ExponentPair(p)


class TestNorms:
    @pytest.mark.parametrize("p", [1, 1.3, 2, 3.7, math.inf])
    def test_delta_has_unit_norm(self, p):
        assert lp_norm(Signal.delta(7), p) == 1.0

    def test_pythagorean(self):
        assert lp_norm(Signal(40, [3.0, 0.0, 4.0]), 2) == pytest.approx(5.0, rel=1e-15)

    def test_indicator_count(self):
        # 2 N^d + 1 points for d = 2, N = 2
        assert lp_norm(Signal.indicator(-4, 4), 2) == pytest.approx(3.0, rel=1e-15)

    def test_infinity_and_rejects(self):
        assert lp_norm(Signal(0, [1.0, -5.0]), math.inf) == 5.0
        with pytest.raises(ValueError):
            lp_norm(Signal.delta(0), 0.5)

    def test_no_overflow_for_large_values(self):
        assert lp_norm([1e200, 1e200], 3) == pytest.approx(2 ** (1 / 3) * 1e200, rel=1e-12)

    @given(signals, st.floats(1, 6))
    def test_matches_direct_formula(self, s, p):
        direct = sum(abs(v) ** p for v in s.values) ** (1 / p)
        assert lp_norm(s, p) == pytest.approx(direct, rel=1e-10, abs=1e-300)

    @given(signals, st.floats(1, 4), st.floats(-10, 10))
    def test_homogeneous(self, s, p, c):
        assert lp_norm(s.scaled(c), p) == pytest.approx(abs(c) * lp_norm(s, p), rel=1e-12, abs=1e-300)

    @given(signals, st.floats(1, 4), st.floats(1, 4))
    def test_norm_nesting(self, s, p, q):
        p, q = min(p, q), max(p, q)
        assert lp_norm(s, q) <= lp_norm(s, p) * (1 + 1e-12)

    @given(signals, st.floats(1, 4))
    def test_zero_iff_zero_signal(self, s, p):
        assert (lp_norm(s, p) == 0) == s.is_zero()


class TestDistribution:
    def test_examples(self):
        assert distribution_function(Signal.delta(0), 0.5) == 1
        assert distribution_function(Signal.delta(0), 1.0) == 0

    def test_prime_fracint_example(self):
        # log p / sqrt(p) at 2, 3, 5, 7 are all above 0.2
        vals = [math.log(q) / math.sqrt(q) for q in (2, 3, 5, 7)]
        assert [round(v, 3) for v in vals] == [0.49, 0.634, 0.72, 0.735]
        from lpimprove.kernels import prime_fracint_kernel
        J = convolve(Signal.delta(0), prime_fracint_kernel(0.5, 10))
        assert distribution_function(J, 0.2) == 4

    @pytest.mark.parametrize("alpha", [0, -1])
    def test_rejects_nonpositive_alpha(self, alpha):
        with pytest.raises(ValueError):
            distribution_function(Signal.delta(0), alpha)

    @given(signals, st.lists(st.floats(1e-6, 1e3), min_size=2, max_size=8))
    def test_nonincreasing_in_alpha(self, s, alphas):
        counts = [distribution_function(s, a) for a in sorted(alphas)]
        assert all(b <= a for a, b in zip(counts, counts[1:]))


class TestConvolution:
    def test_shift_example(self):
        out = convolve(Signal.delta(0), Signal.delta(-1)).trimmed()
        assert out.offset == -1 and list(out.values) == [1.0]

    def test_square_kernel_readout(self):
        K = Signal.from_mapping({-1: 0.5, -4: 0.5})
        out = convolve(Signal.delta(0), K).trimmed()
        assert out.at(-1) == 0.5 and out.at(-4) == 0.5 and out.nnz == 2

    @pytest.mark.parametrize("path", ["direct", "fft", "auto"])
    @given(signals, signals)
    def test_matches_naive_oracle(self, path, f, k):
        out = convolve(f, k, path)
        ref = naive_convolve(f.offset, f.values, k.offset, k.values)
        scale = max([1.0] + [abs(v) for v in ref.values()])
        for x, v in ref.items():
            assert out.at(x) == pytest.approx(v, abs=1e-9 * scale)
        # support stays in the Minkowski sum of the windows
        assert out.start == f.start + k.start and out.stop == f.stop + k.stop - 1

    def test_random_length_64_paths_agree(self, rng):
        f = Signal(-3, rng.standard_normal(64))
        k = Signal(5, rng.random(64))
        a, b = convolve(f, k, "direct"), convolve(f, k, "fft")
        assert np.max(np.abs(a.values - b.values)) <= 1e-9 * np.max(np.abs(a.values))

    def test_empty_operands(self):
        assert convolve(Signal.zero(), Signal.delta(0)).is_zero()

    def test_rejects_unknown_path(self):
        with pytest.raises(ValueError):
            convolve(Signal.delta(0), Signal.delta(0), "magic")

    def test_auto_heuristic_uses_nonzero_counts(self, monkeypatch):
        from lpimprove import signals as sig
        calls = []
        monkeypatch.setattr(sig, "fft_convolve", lambda a, b: calls.append(1) or np.convolve(a, b))
        small = Signal(0, np.ones(10))
        convolve(small, small, "auto")
        assert not calls
        n = int(math.isqrt(AUTO_FFT_THRESHOLD // 2)) + 2
        big = Signal(0, np.ones(n))
        convolve(big, big, "auto")
        assert calls
        # sparse windows stay on the direct path even when long
        sparse = Signal(0, np.eye(1, 10 * n, 0)[0])
        calls.clear()
        convolve(sparse, big, "auto")
        assert not calls

    def test_fft_convolve_matches_numpy(self, rng):
        a, b = rng.random(37), rng.random(11)
        np.testing.assert_allclose(fft_convolve(a, b), np.convolve(a, b), rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("n, expected", [(0, 1), (1, 1), (2, 2), (3, 4), (1025, 2048)])
    def test_next_pow2(self, n, expected):
        assert next_pow2(n) == expected

    @given(nonneg_signals, nonneg_signals)
    def test_correlate_is_adjoint(self, f, k):
        # <k * f, v> = <f, correlate(v, k)>
        v = Signal(f.start + k.start, np.linspace(0.5, 1.5, len(f) + len(k) - 1))
        lhs = float(np.dot(convolve(f, k, "direct").values, v.values))
        w = correlate_on(v, k, f.start, f.stop - 1, "direct")
        rhs = float(np.dot(f.values, w.values))
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)

    def test_young_contraction_mass_one(self, rng):
        for _ in range(50):
            f = Signal(0, rng.standard_normal(int(rng.integers(1, 100))))
            w = rng.random(int(rng.integers(1, 30)))
            k = Signal(int(rng.integers(-20, 20)), w / w.sum())
            assert lp_norm(convolve(f, k), 2) <= lp_norm(f, 2) * (1 + 1e-12)


def test_signal_json_is_plain_object():
    d = json.loads(Signal(2, [1.0]).to_json())
    assert d == {"offset": 2, "values": [1.0]}
