"""Multi-antenna artificial-noise designs."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy import stats

from fblsec.channel import ChannelSnapshot, SystemParams
from fblsec.errors import DomainError
from fblsec.leakage import leakage_piecewise, rho_e
from fblsec.multi_opt import (
    L_function,
    adaptive_phi_opt,
    adaptive_rs_opt,
    ao_optimize,
    dL_dphi,
    high_snr_approx,
    lambda_pair,
    leakage_multi_eve,
    multi_threshold,
    nonadaptive_dT_dphi_multi,
    nonadaptive_dT_dRs_multi,
    nonadaptive_opt_multi,
    nonadaptive_pbar,
    nonadaptive_phi_opt_multi,
    nonadaptive_rs_opt_multi,
    nonadaptive_throughput_multi,
    ps_multi,
    ps_multi_alpha,
    rho_b_circ,
)
from fblsec.single_opt import nonadaptive_throughput_theta

# Frozen by tests/oracles/derive_frozen.py (M = 4, Gamma_e = 1, delta = 0.2, N = 500).
AO_ETA10 = (0.8310776478818858, 1.9703127802100406, 1.9458649020301244)  # (phi*, R_s*, T*)
NA_3DB = (0.7833204969584235, 1.3551908762108265, 0.9517619563433848)
NA_3DB_T_HALF_ONE = 0.82716134287239


@pytest.fixture
def p4():
    return SystemParams(M=4)


class TestAdaptive:
    def test_threshold(self, p4):
        assert multi_threshold(p4) == pytest.approx(rho_e(p4, 0.0, 0.2))

    def test_lambda_pair(self, p4):
        lb, le = lambda_pair(p4, ChannelSnapshot(eta=10.0), 0.5)
        assert lb == pytest.approx(6.0) and le == pytest.approx(1 + 0.5 * rho_e(p4, 0.5, 0.2))

    def test_frozen_ao_optimum(self, p4):
        dp, trace = ao_optimize(p4, ChannelSnapshot(eta=10.0))
        np.testing.assert_allclose(dp.phi, AO_ETA10[0], rtol=1e-7)
        np.testing.assert_allclose(dp.R_s, AO_ETA10[1], rtol=1e-7)
        np.testing.assert_allclose(dp.throughput, AO_ETA10[2], rtol=1e-12)
        assert dp.diagnostics["converged"]

    @given(st.floats(1.5, 200), st.integers(2, 6))
    @settings(max_examples=25)
    def test_ao_trace_nondecreasing(self, eta, M):
        p = SystemParams(M=M)
        if eta <= multi_threshold(p):
            return
        _, trace = ao_optimize(p, ChannelSnapshot(eta=eta))
        T = np.array([s.throughput for s in trace])
        assert np.all(np.diff(T) >= -1e-12 * T[-1])

    def test_off_below_threshold(self, p4):
        dp, _ = ao_optimize(p4, ChannelSnapshot(eta=0.5 * multi_threshold(p4)))
        assert dp.throughput == 0.0 and dp.diagnostics["regime"] == "off"

    def test_coordinate_steps_are_stationary(self, p4):
        snap = ChannelSnapshot(eta=10.0)
        phi = adaptive_phi_opt(p4, snap, 1.5)
        assert abs(dL_dphi(p4, snap, phi, 1.5)) < 1e-8
        r = adaptive_rs_opt(p4, snap, 0.7)
        h = 1e-6
        T = lambda x: x * ps_multi(p4, snap, 0.7, x)
        assert T(r) >= max(T(r - h), T(r + h))

    @pytest.mark.parametrize("phi", [0.2, 0.5, 0.9])
    def test_dL_matches_fd(self, p4, phi):
        snap, h = ChannelSnapshot(eta=10.0), 1e-6
        fd = (L_function(p4, snap, phi + h, 1.0) - L_function(p4, snap, phi - h, 1.0)) / (2 * h)
        np.testing.assert_allclose(dL_dphi(p4, snap, phi, 1.0), fd, rtol=1e-6)

    def test_full_information_above_rho_b_circ(self):
        p = SystemParams(M=4, delta=0.9)
        rc = rho_b_circ(p, 0.1)
        assert math.isfinite(rc)
        assert adaptive_phi_opt(p, ChannelSnapshot(eta=2 * rc), 0.1) == 1.0

    def test_never_full_information_when_noise_dominates(self, p4):
        # At delta = 0.2 A1 >= 1, so rho_b_circ is infinite and phi* < 1 even at huge SNR.
        assert math.isinf(rho_b_circ(p4, 0.1))
        assert adaptive_phi_opt(p4, ChannelSnapshot(eta=1e4), 0.1) < 1.0

    def test_alpha_one_matches(self, p4):
        snap = ChannelSnapshot(eta=10.0)
        assert ps_multi_alpha(p4, snap, 0.6, 1.0, 1.0) == pytest.approx(ps_multi(p4, snap, 0.6, 1.0), rel=1e-14)

    def test_requires_multi(self):
        with pytest.raises(DomainError):
            ao_optimize(SystemParams(), ChannelSnapshot(eta=10.0))


class TestNonAdaptive:
    @pytest.fixture
    def p3(self):
        return SystemParams(M=4, sigma_b2=10 ** 0.3)

    def test_frozen_throughput(self, p3):
        np.testing.assert_allclose(nonadaptive_throughput_multi(p3, 0.5, 1.0), NA_3DB_T_HALF_ONE, rtol=1e-12)

    def test_frozen_optimum(self, p3):
        dp, trace = nonadaptive_opt_multi(p3)
        np.testing.assert_allclose(dp.phi, NA_3DB[0], rtol=1e-7)
        np.testing.assert_allclose(dp.R_s, NA_3DB[1], rtol=1e-7)
        np.testing.assert_allclose(dp.throughput, NA_3DB[2], rtol=1e-12)
        T = [s.throughput for s in trace]
        assert np.all(np.diff(T) >= -1e-14)

    def test_single_antenna_pbar_reduces(self):
        # M = 1, phi = 1: the AN average reduces to the single-antenna closed form.
        th, R_e, n, Gb = 1.7, 1.2, 300, 3.0
        rate = math.log2(1 + th * th) - R_e
        np.testing.assert_allclose(rate * nonadaptive_pbar(1, th, 1.0, Gb, n),
                                   nonadaptive_throughput_theta(th, R_e, n, Gb), rtol=1e-12)

    def test_pbar_matches_quadrature(self):
        M, th, phi, Gb, n = 3, 1.5, 0.6, 4.0, 200
        beta, s = math.sqrt(n) / (2 * math.pi), phi * Gb
        t2, hi = th * th, th * th + th / (2 * beta)
        pdf = stats.gamma(M, scale=s).pdf
        band = sp_integrate.quad(lambda x: (0.5 + beta / th * (x - t2)) * pdf(x), t2, hi, epsabs=1e-15)[0]
        np.testing.assert_allclose(nonadaptive_pbar(M, th, phi, Gb, n), band + stats.gamma(M, scale=s).sf(hi),
                                   rtol=1e-10)

    @pytest.mark.parametrize("phi,rs", [(0.3, 0.8), (0.7, 1.3), (0.95, 2.0)])
    def test_derivatives_match_fd(self, p3, phi, rs):
        h = 1e-6
        T = lambda a, b: nonadaptive_throughput_multi(p3, a, b)
        np.testing.assert_allclose(nonadaptive_dT_dphi_multi(p3, phi, rs), (T(phi + h, rs) - T(phi - h, rs)) / (2 * h),
                                   rtol=1e-5)
        np.testing.assert_allclose(nonadaptive_dT_dRs_multi(p3, phi, rs), (T(phi, rs + h) - T(phi, rs - h)) / (2 * h),
                                   rtol=1e-5)

    def test_coordinate_optima(self, p3):
        assert nonadaptive_rs_opt_multi(p3, NA_3DB[0]) == pytest.approx(NA_3DB[1], rel=1e-6)
        assert nonadaptive_phi_opt_multi(p3, NA_3DB[1]) == pytest.approx(NA_3DB[0], rel=1e-6)

    def test_validation(self, p3):
        with pytest.raises(DomainError):
            nonadaptive_throughput_multi(p3, 0.0, 1.0)
        with pytest.raises(DomainError):
            nonadaptive_throughput_multi(p3, 0.5, -1.0)


class TestHighSnr:
    def test_requires_worst_case(self):
        with pytest.raises(DomainError):
            high_snr_approx(SystemParams(M=3))

    def test_optimum_close_to_exact(self):
        p = SystemParams(M=3, sigma_b2=1e3, worst_case_eve=True)
        approx = high_snr_approx(p)
        dp, _ = nonadaptive_opt_multi(p)
        assert abs(approx.phi - dp.phi) < 0.05
        assert abs(approx.R_s - dp.R_s) / dp.R_s < 0.1
        assert approx.throughput(approx.phi, approx.R_s) == pytest.approx(dp.throughput, rel=0.1)

    def test_huge_gain_uses_log_lambert(self):
        approx = high_snr_approx(SystemParams(M=6, sigma_b2=1e60, worst_case_eve=True))
        assert math.isfinite(approx.R_s) and approx.R_s > 0


class TestMultiEve:
    def test_single_eve_antenna_matches_piecewise(self):
        p = SystemParams(M=3, M_e=1)
        np.testing.assert_allclose(leakage_multi_eve(p, 0.6, 500, 1.4), leakage_piecewise(p, 0.6, 500, 1.4), rtol=1e-8)

    @given(st.integers(1, 4))
    @settings(max_examples=8)
    def test_more_eve_antennas_leak_more(self, Me):
        lo = leakage_multi_eve(SystemParams(M=4, M_e=Me), 0.6, 500, 1.4)
        hi = leakage_multi_eve(SystemParams(M=4, M_e=Me + 1), 0.6, 500, 1.4)
        assert hi >= lo - 1e-12

    def test_low_rate_clips_lower_knee(self):
        val = leakage_multi_eve(SystemParams(M=2, M_e=2), 0.5, 10, 0.05)
        assert 0.0 <= val <= 1.0
