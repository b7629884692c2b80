"""Monte-Carlo estimators, grid search and finite-difference checks."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fblsec.channel import SystemParams
from fblsec.errors import DomainError
from fblsec.leakage import leakage_exact
from fblsec.oracle import McEstimate, fd_check, grid_search, mc_leakage, mc_throughput
from fblsec.single_opt import DesignPoint, adaptive_expected_throughput, nonadaptive_throughput


class TestMcEstimate:
    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=40),
           st.lists(st.floats(-100, 100), min_size=2, max_size=40))
    def test_merge_equals_pooled(self, a, b):
        merged = McEstimate.from_samples(a).merge(McEstimate.from_samples(b))
        pooled = McEstimate.from_samples(a + b)
        np.testing.assert_allclose(merged.mean, pooled.mean, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(merged.stderr, pooled.stderr, rtol=1e-7, atol=1e-9)
        assert merged.n_samples == len(a) + len(b)

    def test_within(self):
        e = McEstimate(1.0, 0.1, 100)
        assert e.within(1.29) and not e.within(1.31) and e.within(1.31, slack=0.02)


class TestMonteCarlo:
    def test_deterministic_and_chunk_independent_count(self):
        p = SystemParams()
        a = mc_leakage(p, 1.0, 200, 1.0, n_samples=5000, seed=3, chunk=1000)
        b = mc_leakage(p, 1.0, 200, 1.0, n_samples=5000, seed=3, chunk=1000)
        assert a == b and a.n_samples == 5000
        assert mc_leakage(p, 1.0, 200, 1.0, n_samples=5000, seed=4, chunk=1000).mean != a.mean

    def test_leakage_agrees_with_quadrature(self):
        p = SystemParams(sigma_e2=2.0)
        est = mc_leakage(p, 1.0, 300, 1.2, n_samples=200_000, seed=9)
        assert est.within(leakage_exact(p, 1.0, 300, 1.2), k=4)

    def test_nonadaptive_throughput(self):
        p = SystemParams(sigma_b2=4.0)
        R_s, R_e = 1.0, 1.3852934057462587
        d = DesignPoint(mu=2 ** (R_s + R_e) - 1, n=500, R_s=R_s, R_e=R_e, throughput=math.nan)
        est = mc_throughput(p, d, n_samples=200_000, seed=1)
        exact = nonadaptive_throughput(p, R_s, mode="exact")
        assert est.within(exact, k=4)

    def test_adaptive_throughput(self):
        p = SystemParams(sigma_b2=4.0)
        d = DesignPoint(mu=math.nan, n=500, R_s=0.0, R_e=1.3852934057462587, throughput=math.nan)
        est = mc_throughput(p, d, mode="adaptive", n_samples=100_000, seed=2)
        assert est.within(adaptive_expected_throughput(p), k=4)

    def test_errors(self):
        with pytest.raises(DomainError):
            mc_leakage(SystemParams(), 1.0, 100, 1.0, n_samples=0)
        with pytest.raises(DomainError):
            mc_leakage(SystemParams(), 1.0, 100, 1.0, eve="triple")
        with pytest.raises(DomainError):
            mc_throughput(SystemParams(M=2), DesignPoint(1, 100, 1, 1, 0), mode="adaptive")


class TestGridSearch:
    def test_1d(self):
        r = grid_search(lambda x: -(x - 0.3) ** 2, [(0, 1)], 101)
        assert r.argmax == pytest.approx((0.3,)) and r.steps == pytest.approx((0.01,))

    def test_2d_vectorized_matches_scalar(self):
        f = lambda x, y: -(x - 0.2) ** 2 - (y - 0.7) ** 2
        a = grid_search(f, [(0, 1), (0, 1)], [11, 21], vectorized=True)
        b = grid_search(f, [(0, 1), (0, 1)], [11, 21])
        assert a == b and a.argmax == pytest.approx((0.2, 0.7))

    def test_ties_take_first(self):
        assert grid_search(lambda x: 1.0, [(0, 1)], 5).argmax == (0.0,)

    def test_nan_ignored(self):
        r = grid_search(lambda x: math.nan if x < 0.5 else -x, [(0, 1)], 11)
        assert r.argmax == pytest.approx((0.5,))

    def test_dimension_limit(self):
        with pytest.raises(DomainError):
            grid_search(lambda *x: 0.0, [(0, 1)] * 3, 3)


class TestFdCheck:
    def test_exact_derivative(self):
        assert fd_check(np.sin, np.cos, np.linspace(-3, 3, 7)) < 1e-9

    def test_wrong_derivative(self):
        assert fd_check(np.sin, np.sin, [1.0]) > 0.1
