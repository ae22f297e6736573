import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import EXAMPLE_BITS, EXAMPLE_SERIES, oracle_filter, oracle_qcf, oracle_quantile
from qcorr import (
    BinarySeries,
    DegenerateLevelError,
    GarchParams,
    ProbabilityLevel,
    QcfCurve,
    TimeSeries,
    asymmetry,
    average_curves,
    confidence_band,
    empirical_quantile,
    filter_series,
    pp_grid,
    qcf,
    qcf_fast,
    qcf_from_filtered,
    simulate,
)

LEVEL_GRID = [round(0.05 * i, 2) for i in range(1, 20)]


def make_curve(lags, values, alpha=0.05, beta=0.95, series_length=1000, **kw):
    return QcfCurve(
        alpha=ProbabilityLevel(alpha),
        beta=ProbabilityLevel(beta),
        lags=np.asarray(lags),
        values=np.asarray(values, dtype=float),
        series_length=series_length,
        **kw,
    )


class TestEmpiricalQuantile:
    def test_worked_example_median(self):
        assert empirical_quantile(list(EXAMPLE_SERIES), 0.5) == 0.0

    def test_constant_series(self):
        for p in (0.0, 0.3, 0.5, 1.0):
            assert empirical_quantile([7.0] * 9, p) == 7.0

    def test_third_of_three(self):
        # sort-and-index oracle: x_(ceil(1)) = 1
        assert empirical_quantile([3.0, 1.0, 2.0], 1.0 / 3.0) == 1.0

    def test_p_zero_is_minimum_p_one_is_maximum(self):
        x = [4.0, -2.0, 9.0, 0.5]
        assert empirical_quantile(x, 0.0) == -2.0
        assert empirical_quantile(x, 1.0) == 9.0

    def test_empty_input(self):
        with pytest.raises(ValueError, match="empty input"):
            empirical_quantile([], 0.5)

    def test_float_noise_at_integer_rank(self):
        # 0.05 * 5000 is 250 up to representation error, not rank 251
        x = np.arange(1.0, 5001.0)
        assert empirical_quantile(x, 0.05) == 250.0

    @given(
        st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=80, deadline=None, derandomize=True)
    def test_matches_sort_oracle(self, xs, p):
        assert empirical_quantile(xs, p) == oracle_quantile(xs, p)


class TestFilterSeries:
    def test_worked_example(self):
        f = filter_series(list(EXAMPLE_SERIES), 0.5)
        assert f.bits.tolist() == list(EXAMPLE_BITS)
        assert f.quantile_value == 0.0
        assert f.achieved_fraction == 0.6

    def test_p_one_all_ones(self):
        f = filter_series([3.0, -1.0, 2.0, 5.0], 1.0)
        assert f.bits.tolist() == [1, 1, 1, 1]

    def test_two_fifths(self):
        f = filter_series([5.0, 4.0, 3.0, 2.0, 1.0], 0.4)
        assert f.bits.tolist() == [0, 0, 0, 1, 1]
        assert f.quantile_value == 2.0

    @given(
        st.lists(st.floats(-100, 100), min_size=2, max_size=50),
        st.floats(0.01, 0.99),
    )
    @settings(max_examples=80, deadline=None, derandomize=True)
    def test_achieved_fraction_at_least_nominal_rank(self, xs, p):
        f = filter_series(xs, p)
        T = len(xs)
        assert f.achieved_fraction * T >= math.ceil(p * T) - 1e-9
        assert f.bits.tolist() == oracle_filter(xs, p)

    def test_complement_flips_everything(self):
        f = filter_series(list(EXAMPLE_SERIES), 0.5)
        c = f.complement()
        assert c.bits.tolist() == [1 - b for b in EXAMPLE_BITS]
        assert c.level.p == 0.5
        assert c.achieved_fraction == pytest.approx(0.4)
        assert c.quantile_value == f.quantile_value


class TestBinarySeriesValidation:
    def test_rejects_non_binary(self):
        with pytest.raises(ValueError, match="only 0 and 1"):
            BinarySeries(np.array([0, 2, 1]), ProbabilityLevel(0.5), 2 / 3, 0.0)

    def test_rejects_wrong_fraction(self):
        with pytest.raises(ValueError, match="achieved_fraction"):
            BinarySeries(np.array([0, 1, 1]), ProbabilityLevel(0.5), 0.5, 0.0)

    def test_level_bounds(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            ProbabilityLevel(1.5)


class TestQcf:
    def test_lag_zero_is_one_for_equal_levels(self):
        rng = np.random.default_rng(0)
        c = qcf(rng.standard_normal(100), 0.3, 0.3, 10)
        assert c.value_at(0) == 1.0

    def test_worked_example_matches_double_loop_oracle(self):
        expected = oracle_qcf(list(EXAMPLE_SERIES), 0.5, 0.5, 4)
        c = qcf(list(EXAMPLE_SERIES), 0.5, 0.5, 4)
        for lag in range(-4, 5):
            assert c.value_at(lag) == pytest.approx(expected[lag], abs=1e-14)
        # frozen oracle values; lag 1 is -2/5 under the estimator as written
        assert c.value_at(1) == pytest.approx(-0.4, abs=1e-14)
        assert c.value_at(2) == pytest.approx(11.0 / 30.0, abs=1e-14)

    @pytest.mark.parametrize("case", range(8))
    def test_matches_oracle_on_random_pairs(self, case):
        rng = np.random.default_rng(100 + case)
        T = int(rng.integers(30, 120))
        x = rng.standard_normal(T)
        alpha, beta = rng.choice(LEVEL_GRID, size=2)
        max_lag = int(rng.integers(1, T // 2))
        expected = oracle_qcf(x.tolist(), alpha, beta, max_lag)
        c = qcf(x, alpha, beta, max_lag)
        for lag, value in zip(c.lags, c.values):
            assert value == pytest.approx(expected[int(lag)], abs=1e-12)

    def test_white_noise_is_small(self):
        rng = np.random.default_rng(7)
        T = 100_000
        c = qcf_fast(rng.standard_normal(T), 0.05, 0.05, 100)
        nonzero = c.lags != 0
        assert np.max(np.abs(c.values[nonzero])) < 4.0 / math.sqrt(T)

    def test_degenerate_levels_refused(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(50)
        with pytest.raises(DegenerateLevelError, match="degenerate quantile level"):
            qcf(x, 1.0, 1.0, 5)
        with pytest.raises(DegenerateLevelError):
            qcf([5.0] * 50, 0.5, 0.5, 5)

    def test_max_lag_too_large(self):
        with pytest.raises(ValueError, match="max_lag"):
            qcf(np.arange(10.0), 0.5, 0.5, 5)

    def test_filtered_series_length_mismatch(self):
        a = filter_series(np.arange(10.0), 0.5)
        b = filter_series(np.arange(12.0), 0.5)
        with pytest.raises(ValueError, match="equal length"):
            qcf_from_filtered(a, b, 2)


class TestQcfFast:
    @pytest.mark.parametrize("seed", range(6))
    def test_matches_direct(self, seed):
        rng = np.random.default_rng(seed)
        T = int(rng.integers(80, 2000))
        x = rng.standard_normal(T)
        alpha, beta = rng.choice(LEVEL_GRID, size=2)
        max_lag = int(rng.integers(1, T // 4 + 1))
        direct = qcf(x, alpha, beta, max_lag)
        fast = qcf_fast(x, alpha, beta, max_lag)
        assert np.array_equal(direct.lags, fast.lags)
        assert np.max(np.abs(direct.values - fast.values)) <= 1e-10

    def test_worked_example(self):
        direct = qcf(list(EXAMPLE_SERIES), 0.5, 0.5, 4)
        fast = qcf_fast(list(EXAMPLE_SERIES), 0.5, 0.5, 4)
        assert np.max(np.abs(direct.values - fast.values)) <= 1e-10

    def test_symmetric_for_equal_levels(self):
        rng = np.random.default_rng(3)
        c = qcf_fast(rng.standard_normal(500), 0.25, 0.25, 40)
        assert np.array_equal(c.values, c.values[::-1])


class TestInvariances:
    @pytest.mark.parametrize("seed", range(5))
    def test_symmetry_equal_levels_exact(self, seed):
        rng = np.random.default_rng(seed)
        c = qcf(rng.standard_normal(200), 0.1, 0.1, 30)
        assert np.array_equal(c.values, c.values[::-1])
        assert c.value_at(0) == 1.0

    @pytest.mark.parametrize("seed", range(5))
    def test_swap_identity_exact(self, seed):
        rng = np.random.default_rng(10 + seed)
        x = rng.standard_normal(300)
        ab = qcf(x, 0.05, 0.6, 25)
        ba = qcf(x, 0.6, 0.05, 25)
        assert np.array_equal(ab.values, ba.values[::-1])

    @pytest.mark.parametrize("seed", range(5))
    def test_complement_identities(self, seed):
        rng = np.random.default_rng(20 + seed)
        x = rng.standard_normal(250)
        fa = filter_series(x, 0.05)
        fb = filter_series(x, 0.9)
        base = qcf_from_filtered(fa, fb, 20)
        double = qcf_from_filtered(fa.complement(), fb.complement(), 20)
        single = qcf_from_filtered(fa.complement(), fb, 20)
        assert np.max(np.abs(double.values - base.values)) <= 1e-12
        assert np.max(np.abs(single.values + base.values)) <= 1e-12

    @pytest.mark.parametrize("transform", [np.exp, lambda v: v**3 + v, lambda v: 2.5 * v + 7.0])
    def test_monotone_transform_invariance(self, transform):
        rng = np.random.default_rng(42)
        x = rng.standard_normal(300)
        for p in (0.05, 0.5, 0.95):
            assert np.array_equal(filter_series(transform(x), p).bits, filter_series(x, p).bits)
        before = qcf(x, 0.05, 0.95, 20)
        after = qcf(transform(x), 0.05, 0.95, 20)
        assert np.array_equal(before.values, after.values)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None, derandomize=True)
    def test_values_in_range(self, seed):
        rng = np.random.default_rng(seed)
        T = int(rng.integers(20, 200))
        x = rng.standard_normal(T)
        alpha, beta = rng.choice(LEVEL_GRID, size=2)
        c = qcf(x, alpha, beta, max(1, T // 4))
        assert np.all(np.abs(c.values) <= 1.0 + 1e-12)


class TestAverageCurves:
    def test_single_curve_identity(self):
        c = qcf(np.random.default_rng(0).standard_normal(100), 0.2, 0.8, 10)
        avg = average_curves([c])
        assert np.array_equal(avg.values, c.values)
        assert avg.n_averaged == 1

    def test_cancellation(self):
        a = make_curve([-1, 0, 1], [0.5, 0.2, -0.3])
        b = make_curve([-1, 0, 1], [-0.5, -0.2, 0.3])
        avg = average_curves([a, b])
        assert np.array_equal(avg.values, np.zeros(3))
        assert avg.n_averaged == 2

    def test_mean_of_three_constants(self):
        curves = [make_curve([-1, 0, 1], [v] * 3) for v in (0.1, 0.2, 0.3)]
        avg = average_curves(curves)
        assert np.allclose(avg.values, 0.2, atol=1e-15)

    def test_mismatched_pair_rejected(self):
        a = make_curve([0, 1], [0.1, 0.1], alpha=0.05)
        b = make_curve([0, 1], [0.1, 0.1], alpha=0.10)
        with pytest.raises(ValueError, match="quantile pair"):
            average_curves([a, b])

    def test_mismatched_grid_rejected(self):
        a = make_curve([0, 1], [0.1, 0.1])
        b = make_curve([0, 2], [0.1, 0.1])
        with pytest.raises(ValueError, match="lag grid"):
            average_curves([a, b])


class TestConfidenceBand:
    def test_zero_reference(self):
        ref = make_curve([-2, -1, 0, 1, 2], [0, 0, 1, 0, 0], alpha=0.5, beta=0.5)
        assert confidence_band(ref) == 0.0

    def test_alternating_values(self):
        c = 0.03
        ref = make_curve([-2, -1, 0, 1, 2], [c, -c, 1, -c, c], alpha=0.5, beta=0.5)
        assert confidence_band(ref) == pytest.approx(1.96 * c, rel=1e-12)

    def test_requires_median_pair(self):
        ref = make_curve([-1, 0, 1], [0, 1, 0], alpha=0.05, beta=0.05)
        with pytest.raises(ValueError, match=r"\(0.5, 0.5\)"):
            confidence_band(ref)

    def test_lag_zero_only_rejected(self):
        ref = make_curve([0], [1.0], alpha=0.5, beta=0.5)
        with pytest.raises(ValueError, match="only lag 0"):
            confidence_band(ref)

    def test_covers_own_reference_fluctuations(self):
        # a 95% construction should cover >= 93% of the reference's own values
        params = GarchParams(kind="garch", mu=0.0, omega=1e-5, alpha1=0.05, beta1=0.9)
        inside = total = 0
        for seed in range(100):
            sim = simulate(params, length=2000, seed=seed, burn_in=500)
            ref = qcf_fast(sim.returns, 0.5, 0.5, 50)
            band = confidence_band(ref)
            nonzero = ref.lags != 0
            inside += int(np.count_nonzero(np.abs(ref.values[nonzero]) <= band))
            total += int(np.count_nonzero(nonzero))
        assert inside / total >= 0.93


class TestAsymmetry:
    def test_all_area_on_negative_lags(self):
        curve = make_curve([-2, -1, 0, 1, 2], [0.2, 0.1, 1.0, 0.0, 0.0])
        assert asymmetry(curve).delta == 1.0

    def test_symmetric_curve(self):
        curve = make_curve([-2, -1, 0, 1, 2], [0.2, -0.1, 1.0, -0.1, 0.2])
        report = asymmetry(curve)
        assert report.delta == 0.0
        assert not report.degenerate

    def test_ratio_half(self):
        curve = make_curve([-2, -1, 0, 1, 2], [0.2, 0.1, 1.0, -0.1, 0.0])
        assert asymmetry(curve).delta == pytest.approx(0.5, rel=1e-12)

    def test_mirror_negates_delta(self):
        rng = np.random.default_rng(4)
        values = rng.uniform(-0.5, 0.5, size=21)
        lags = np.arange(-10, 11)
        d = asymmetry(make_curve(lags, values)).delta
        d_mirror = asymmetry(make_curve(lags, values[::-1])).delta
        assert d_mirror == pytest.approx(-d, abs=1e-15)

    def test_zero_area_degenerate(self):
        curve = make_curve([-1, 0, 1], [0.0, 1.0, 0.0])
        report = asymmetry(curve)
        assert report.delta == 0.0
        assert report.degenerate

    def test_asymmetric_grid_rejected(self):
        curve = make_curve([-1, 0, 1, 2], [0.1, 1.0, 0.1, 0.2])
        with pytest.raises(ValueError, match="symmetrically"):
            asymmetry(curve)

    def test_max_lag_truncation(self):
        curve = make_curve([-2, -1, 0, 1, 2], [0.4, 0.1, 1.0, 0.1, 0.0])
        assert asymmetry(curve, max_lag=1).delta == 0.0
        assert asymmetry(curve, max_lag=2).delta == pytest.approx(0.4 / 0.6, rel=1e-12)
        with pytest.raises(ValueError, match="max_lag"):
            asymmetry(curve, max_lag=3)

    def test_delta_bounds(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            values = rng.uniform(-1, 1, size=11)
            report = asymmetry(make_curve(np.arange(-5, 6), values))
            assert -1.0 <= report.delta <= 1.0


class TestPPGrid:
    def test_diagonal_at_lag_zero(self):
        rng = np.random.default_rng(2)
        grid = pp_grid(rng.standard_normal(200), [0.1, 0.5, 0.9], 0)
        assert np.array_equal(np.diagonal(grid.matrix), np.ones(3))

    def test_transpose_identity(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(400)
        levels = [0.05, 0.3, 0.5, 0.95]
        plus = pp_grid(x, levels, 7)
        minus = pp_grid(x, levels, -7)
        assert np.array_equal(plus.matrix, minus.matrix.T)

    def test_matches_per_pair_oracle(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(60)
        levels = [0.2, 0.5, 0.8]
        lag = 3
        grid = pp_grid(x, levels, lag)
        for i, a in enumerate(levels):
            for j, b in enumerate(levels):
                expected = oracle_qcf(x.tolist(), a, b, lag)[lag]
                assert grid.matrix[i, j] == pytest.approx(expected, abs=1e-12)

    def test_rejects_boundary_levels(self):
        with pytest.raises(ValueError, match="strictly inside"):
            pp_grid(np.arange(20.0), [0.0, 0.5], 1)

    def test_degenerate_from_ties(self):
        with pytest.raises(DegenerateLevelError):
            pp_grid(np.ones(40), [0.5], 1)


class TestQcfCurveValidation:
    def test_lags_strictly_increasing(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            make_curve([1, 1, 2], [0.1, 0.1, 0.1])

    def test_lag_bound(self):
        with pytest.raises(ValueError, match="series_length / 2"):
            make_curve([-5, 0, 5], [0.1, 1.0, 0.1], series_length=10)

    def test_value_range(self):
        with pytest.raises(ValueError, match=r"\[-1, 1\]"):
            make_curve([0, 1], [1.0, 1.5])

    def test_with_ci(self):
        curve = make_curve([-1, 0, 1], [0.1, 0.9, 0.1])
        banded = curve.with_ci(0.05)
        assert banded.ci_half_width == 0.05
        assert curve.ci_half_width is None
        with pytest.raises(ValueError, match="nonnegative"):
            curve.with_ci(-0.1)

    def test_value_at_missing_lag(self):
        curve = make_curve([-1, 0, 1], [0.1, 0.9, 0.1])
        with pytest.raises(KeyError):
            curve.value_at(5)


class TestTimeSeries:
    def test_validation(self):
        with pytest.raises(ValueError, match="at least 2"):
            TimeSeries(np.array([1.0]))
        with pytest.raises(ValueError, match="finite"):
            TimeSeries(np.array([1.0, np.nan]))
        with pytest.raises(ValueError, match="step"):
            TimeSeries(np.array([1.0, 2.0]), step=0.0)

    def test_immutable(self):
        ts = TimeSeries(np.array([1.0, 2.0, 3.0]))
        with pytest.raises(ValueError):
            ts.values[0] = 5.0
