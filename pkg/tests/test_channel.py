"""Scenario parameters, SINR algebra, fading distributions and samplers."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from fblsec.channel import (
    AnAllocation,
    ChannelSnapshot,
    SystemParams,
    cdf_gamma_b,
    cdf_gamma_e,
    cdf_gamma_e_multi,
    db_to_linear,
    kappa,
    make_rng,
    pdf_gamma_b,
    pdf_gamma_e,
    sample_eta,
    sample_gamma_e,
    sample_gamma_e_mmse,
    sample_snapshot,
    sinr_bob,
    xi,
)
from fblsec.errors import DomainError


class TestSystemParams:
    def test_defaults(self):
        p = SystemParams()
        assert (p.M, p.N, p.delta, p.Gamma_b, p.Gamma_e) == (1, 500, 0.2, 1.0, 1.0)

    @pytest.mark.parametrize("kw,field", [
        ({"delta": 1.5}, "delta"), ({"delta": -0.1}, "delta"), ({"M": 0}, "M"), ({"N": 2.5}, "N"),
        ({"P_b": 0.0}, "P_b"), ({"sigma_e2": -1.0}, "sigma_e2"), ({"M_e": 0}, "M_e"),
    ])
    def test_validation_names_field(self, kw, field):
        with pytest.raises(DomainError, match=field):
            SystemParams(**kw)

    def test_from_snr(self):
        p = SystemParams.from_snr(Gamma_b=10.0, Gamma_e=2.0, P_b=4.0, P_e=0.5)
        assert p.sigma_b2 == 2.5 and p.sigma_e2 == 4.0
        assert p.Gamma_b == pytest.approx(10.0) and p.Gamma_e == pytest.approx(2.0)

    def test_with_revalidates(self):
        with pytest.raises(DomainError):
            SystemParams().with_(delta=2.0)

    def test_hashable(self):
        assert hash(SystemParams()) == hash(SystemParams())

    def test_db(self):
        np.testing.assert_allclose(db_to_linear([0.0, 10.0, 3.0]), [1.0, 10.0, 1.9952623149688795])


class TestSinrAlgebra:
    def test_single_antenna_ignores_allocation(self):
        p = SystemParams(P_b=2.0)
        assert sinr_bob(p, ChannelSnapshot(eta=3.0), AnAllocation(phi=0.1, alpha=0.2)) == 6.0

    def test_full_information_fraction(self):
        p = SystemParams(M=4, P_b=2.0)
        assert sinr_bob(p, ChannelSnapshot(eta=3.0), AnAllocation(phi=0.5)) == pytest.approx(3.0)

    def test_beam_an_is_self_interference(self):
        p = SystemParams(M=4)
        g = sinr_bob(p, ChannelSnapshot(eta=10.0), AnAllocation(phi=1.0, alpha=0.5))
        assert g == pytest.approx(kappa(10.0, 0.5))

    def test_xi(self):
        assert xi(SystemParams(M=1), 0.5) == 0.0
        assert xi(SystemParams(M=3), 0.5) == pytest.approx(0.5)
        assert xi(SystemParams(M=3), 0.0) == math.inf

    @given(st.floats(0, 1e6), st.floats(0, 1))
    def test_kappa_bounded_by_x(self, x, a):
        assert 0.0 <= kappa(x, a) <= x * (1 + 1e-15)

    def test_allocation_validation(self):
        with pytest.raises(DomainError, match="alpha"):
            AnAllocation(phi=0.5, alpha=1.5)

    def test_snapshot_rejects_negative(self):
        with pytest.raises(DomainError):
            ChannelSnapshot(eta=-1.0)


class TestDistributions:
    @pytest.mark.parametrize("M", [1, 2, 5])
    def test_bob_pdf_integrates_to_cdf(self, M):
        p = SystemParams(M=M, sigma_b2=2.0)
        val = sp_integrate.quad(lambda g: pdf_gamma_b(p, 0.7, g), 0, 3.0)[0]
        np.testing.assert_allclose(val, cdf_gamma_b(p, 0.7, 3.0), rtol=1e-10)

    @pytest.mark.parametrize("M,wc", [(1, False), (2, False), (4, False), (4, True)])
    def test_eve_pdf_integrates_to_cdf(self, M, wc):
        p = SystemParams(M=M, sigma_e2=1.5, worst_case_eve=wc)
        for x in (0.3, 2.0, 10.0):
            val = sp_integrate.quad(lambda g: pdf_gamma_e(p, 0.6, g), 0, x, epsabs=1e-13)[0]
            np.testing.assert_allclose(val, cdf_gamma_e(p, 0.6, x), rtol=1e-9)

    def test_eve_single_antenna_is_exponential(self):
        p = SystemParams(sigma_e2=2.0)
        np.testing.assert_allclose(cdf_gamma_e(p, 0.3, 1.0), 1 - math.exp(-0.5))

    def test_worst_case_phi_one_always_leaks(self):
        p = SystemParams(M=3, worst_case_eve=True)
        assert cdf_gamma_e(p, 1.0, 50.0) == 0.0

    @given(st.integers(2, 8), st.floats(0.01, 1.0), st.floats(0, 50), st.floats(0, 50))
    def test_eve_cdf_monotone(self, M, phi, a, b):
        p = SystemParams(M=M)
        lo, hi = sorted((a, b))
        assert cdf_gamma_e(p, phi, lo) <= cdf_gamma_e(p, phi, hi) + 1e-15

    def test_multi_eve_single_antenna_reduces_to_exact(self):
        # M_e = 1: the MMSE receiver is the single-antenna Eve (sigma_e2 = 1).
        p = SystemParams(M=4, M_e=1, P_e=2.0)
        g = np.linspace(0, 10, 7)
        np.testing.assert_allclose(cdf_gamma_e_multi(p, 0.6, g), cdf_gamma_e(p, 0.6, g), rtol=1e-12, atol=1e-15)

    def test_multi_eve_normalization(self):
        p = SystemParams(M=4, M_e=2, P_e=2.0, sigma_e2=3.0)
        lit = cdf_gamma_e_multi(p, 0.5, 1.0, "literal")
        via = cdf_gamma_e_multi(SystemParams(M=4, M_e=2, P_e=6.0), 0.5, 1.0, "literal")
        assert cdf_gamma_e_multi(p, 0.5, 1.0, "gamma_e") == pytest.approx(via)
        assert lit != pytest.approx(via)
        with pytest.raises(DomainError):
            cdf_gamma_e_multi(p, 0.5, 1.0, "bogus")


class TestSamplers:
    def test_rng_deterministic(self):
        a = make_rng(7).standard_normal(5)
        np.testing.assert_array_equal(a, make_rng(7).standard_normal(5))

    def test_snapshot_shapes(self):
        s = sample_snapshot(SystemParams(M=3, M_e=2), 1)
        assert s.h_b.shape == (3,) and s.h_e.shape == (2, 3)
        assert s.eta == pytest.approx(float(np.sum(np.abs(s.h_b) ** 2)))

    @pytest.mark.parametrize("M", [1, 4])
    def test_eta_is_erlang(self, M):
        p = SystemParams(M=M, sigma_b2=2.0)
        eta = sample_eta(p, 200_000, make_rng(3))
        # Mean M sigma^2, variance M sigma^4.
        np.testing.assert_allclose(eta.mean(), M * 2.0, rtol=0.01)
        np.testing.assert_allclose(eta.var(), M * 4.0, rtol=0.03)

    @pytest.mark.parametrize("M,wc", [(1, False), (4, False), (4, True)])
    def test_eve_samples_match_cdf(self, M, wc):
        p = SystemParams(M=M, sigma_e2=1.3, worst_case_eve=wc)
        g = sample_gamma_e(p, 0.6, 200_000, make_rng(11))
        for x in (0.2, 1.0, 3.0):
            np.testing.assert_allclose(np.mean(g <= x), cdf_gamma_e(p, 0.6, x), atol=4e-3)

    def test_mmse_samples_match_cdf(self):
        p = SystemParams(M=4, M_e=2, P_e=3.0)
        g = sample_gamma_e_mmse(p, 0.5, 100_000, make_rng(5))
        for x in (0.5, 2.0, 6.0):
            np.testing.assert_allclose(np.mean(g <= x), cdf_gamma_e_multi(p, 0.5, x), atol=5e-3)
