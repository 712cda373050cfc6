import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qspec.core import EstimationPlan, fourier_snap
from qspec.errors import BoundaryError, ConfigError
from qspec.estimator import (indicator_ccov, lag_window_estimate, local_ecdf, local_quantile,
                             local_quantiles, sweep)

from reference import bartlett, local_q, naive_field


class TestLocalEcdf:
    def test_count(self):
        assert local_ecdf([1, 2, 3, 4, 5], 3, 2, 3.0) == 0.6

    def test_below_min(self):
        assert local_ecdf([1, 2, 3, 4, 5], 3, 2, 0.5) == 0.0

    def test_ties(self):
        assert local_ecdf([2, 2, 2], 2, 1, 2.0) == 1.0

    def test_edge_clipping_uses_actual_count(self):
        # window {1,2} at t0=1 with h=1 (t=0 is outside the sample)
        assert local_ecdf([1, 2, 3, 4], 1, 1, 1.0) == 0.5

    def test_boundary(self):
        with pytest.raises(BoundaryError):
            local_ecdf([1, 2, 3], 4, 1, 1.0)


class TestLocalQuantile:
    def test_median_of_three(self):
        assert local_quantile([3, 1, 2], 2, 1, 0.5) == 2

    def test_upper(self):
        assert local_quantile([3, 1, 2], 2, 1, 0.9) == 3

    def test_constant(self):
        for tau in (0.01, 0.5, 0.99):
            assert local_quantile([5, 5, 5, 5], 2, 2, tau) == 5

    def test_exact_decimal_level(self):
        # 0.1 * 10 is exactly 1 in decimal, so the first order statistic
        x = np.arange(10.0)
        assert local_quantile(x, 5, 5, 0.1) == 0.0

    @given(st.lists(st.integers(-5, 5), min_size=3, max_size=40),
           st.floats(0.001, 0.999), st.data())
    def test_generalized_inverse(self, vals, tau, data):
        x = np.array(vals, float)
        t0 = data.draw(st.integers(1, x.size))
        h = data.draw(st.integers(1, 10))
        q = local_quantile(x, t0, h, tau)
        assert q == local_q(list(x), t0, h, tau)
        assert local_ecdf(x, t0, h, q) >= tau

    @given(st.lists(st.floats(-1e3, 1e3), min_size=5, max_size=30),
           st.lists(st.floats(0.01, 0.99), min_size=2, max_size=5, unique=True))
    def test_monotone_in_tau(self, vals, taus):
        x = np.array(vals)
        q = local_quantiles(x, 3, 2, sorted(taus))
        assert np.all(np.diff(q) >= 0)
        assert set(q) <= set(x[0:5])


class TestIndicatorCcov:
    x = [1.0, 2.0, 3.0, 4.0]

    def test_lag_one(self):
        assert indicator_ccov(self.x, range(1, 5), 1, 2.5, 2.5, 0.5, 0.5) == 0.0625

    def test_lag_zero(self):
        assert indicator_ccov(self.x, range(1, 5), 0, 2.5, 2.5, 0.5, 0.5) == 0.25

    def test_lag_n_is_empty(self):
        assert indicator_ccov(self.x, range(1, 5), 4, 2.5, 2.5, 0.5, 0.5) == 0.0

    @given(st.lists(st.floats(-10, 10), min_size=4, max_size=20), st.data())
    def test_lag_symmetry(self, vals, data):
        n = len(vals)
        k = data.draw(st.integers(-(n - 1), n - 1))
        q1, q2 = data.draw(st.floats(-10, 10)), data.draw(st.floats(-10, 10))
        t1, t2 = data.draw(st.floats(0.01, 0.99)), data.draw(st.floats(0.01, 0.99))
        nb = range(1, n + 1)
        a = indicator_ccov(vals, nb, k, q1, q2, t1, t2)
        b = indicator_ccov(vals, nb, -k, q2, q1, t2, t1)
        assert a == pytest.approx(b, abs=1e-15)


class TestLagWindowEstimate:
    def test_bandwidth_one_collapses_to_lag_zero(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=64)
        plan = EstimationPlan.build(64, 32, 1, (0.3, 0.7))
        t0 = 32
        q = local_q(list(x), t0, plan.quantile_halfwidth, 0.3)
        g0 = indicator_ccov(x, range(17, 49), 0, q, q, 0.3, 0.3)
        vals = [lag_window_estimate(x, t0, plan, 0.3, 0.3, w) for w in (0.3, 1.5, 3.0)]
        for v in vals:
            assert v == vals[0]
            assert v.imag == 0.0
            assert v.real == pytest.approx(g0 / (2 * math.pi), abs=1e-15)

    @given(st.floats(0.01, math.pi - 0.01))
    @settings(max_examples=30)
    def test_snap_consistency(self, w):
        x = np.random.default_rng(1).normal(size=64)
        plan = EstimationPlan.build(64, 32, 5, (0.2, 0.6))
        a = lag_window_estimate(x, 32, plan, 0.2, 0.6, w)
        b = lag_window_estimate(x, 32, plan, 0.2, 0.6, fourier_snap(w, 32))
        assert a == b

    def test_matches_sweep(self):
        x = np.random.default_rng(2).normal(size=128)
        plan = EstimationPlan.build(128, 32, 6, (0.25, 0.5, 0.75), stride=16)
        f = sweep(x, plan)
        for i, t0 in enumerate(plan.t0_grid[::3]):
            for j, w in enumerate(plan.freq_grid.frequencies[::4]):
                v = lag_window_estimate(x, t0, plan, 0.25, 0.75, w)
                assert v == pytest.approx(f.values[3 * i, 4 * j, 0, 2], abs=1e-15)

    def test_diagonal_is_real(self):
        x = np.random.default_rng(3).standard_cauchy(200)
        plan = EstimationPlan.build(200, 64, 12, (0.4,))
        for w in (0.2, 1.0, 2.9):
            assert lag_window_estimate(x, 100, plan, 0.4, 0.4, w).imag == 0.0


class TestSweep:
    def test_matches_naive_reference(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            n = int(rng.choice([4, 8, 12, 16]))
            T = n + int(rng.integers(0, 20))
            x = rng.normal(size=T)
            B = float(rng.uniform(1, n - 1))
            plan = EstimationPlan.build(T, n, B, (0.2, 0.5, 0.8))
            ref = np.array(naive_field(list(x), plan.t0_grid, n, B, plan.quantiles))
            np.testing.assert_allclose(sweep(x, plan).values, ref, rtol=0, atol=1e-12)

    def test_bartlett_matches_naive_reference(self):
        x = np.random.default_rng(5).normal(size=20)
        plan = EstimationPlan.build(20, 12, 5.5, (0.3, 0.6), kernel="bartlett")
        ref = np.array(naive_field(list(x), plan.t0_grid, 12, 5.5, plan.quantiles, bartlett))
        np.testing.assert_allclose(sweep(x, plan).values, ref, rtol=0, atol=1e-12)

    @given(st.integers(0, 2**32 - 1), st.sampled_from([8, 16, 32]))
    @settings(max_examples=25, deadline=None)
    def test_hermitian_exact(self, seed, n):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=3 * n)
        plan = EstimationPlan.build(3 * n, n, rng.uniform(1, n / 2), (0.1, 0.5, 0.9))
        v = sweep(x, plan).values
        assert np.array_equal(v, np.conj(np.swapaxes(v, 2, 3)))
        d = np.arange(3)
        assert np.all(v[:, :, d, d].imag == 0.0)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_rank_invariance(self, seed):
        x = np.random.default_rng(seed).normal(size=96)
        plan = EstimationPlan.build(96, 32, 8, (0.1, 0.5, 0.9))
        a = sweep(x, plan).values
        for g in (np.exp, np.arctan, lambda v: v ** 3 + 2 * v):
            assert np.array_equal(sweep(g(x), plan).values, a)

    def test_chunking_does_not_change_results(self):
        x = np.random.default_rng(6).normal(size=300)
        plan = EstimationPlan.build(300, 32, 8, stride=4)
        assert np.array_equal(sweep(x, plan, chunk=1).values, sweep(x, plan, chunk=50).values)

    def test_length_mismatch(self):
        plan = EstimationPlan.build(64, 32, 5)
        with pytest.raises(ConfigError):
            sweep(np.zeros(63), plan)

    def test_nonfinite_input(self):
        plan = EstimationPlan.build(64, 32, 5)
        x = np.zeros(64)
        x[10] = np.nan
        with pytest.raises(ValueError, match="t=11"):
            sweep(x, plan)
