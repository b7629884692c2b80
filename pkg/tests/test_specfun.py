"""Special functions, quadrature and root finding."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from fblsec.errors import BracketError, ConvergenceError, DomainError
from fblsec.specfun import (
    Tolerance,
    capacity,
    decoding_error,
    dispersion,
    expand_bracket_upper,
    find_root,
    integrate,
    lambert_w0,
    q_function,
    q_inverse,
    reg_upper_gamma,
)

# Frozen from tests/oracles/derive_frozen.py (mpmath, 40 digits).
Q_REF = {-3.0: 0.99865010196836990547, 0.0: 0.5, 1.5: 0.066807201268858066004,
         8.0: 6.2209605742717841235e-16, 30.0: 4.9067139271481870595e-198}
W0_REF = {-0.3: -0.48940222718021493357, 0.5: 0.35173371124919582602, 10.0: 1.7455280027406993831,
          1e6: 11.383358086140052622}
GBAR_REF = {(1, 0.5): 0.6065306597126334236, (3, 2.0): 0.67667641618306345947,
            (6, 10.0): 0.067085962879031782286}


class TestQFunction:
    @pytest.mark.parametrize("x", sorted(Q_REF))
    def test_reference_values(self, x):
        # erfc is good to ~1e-13 relative in the deep tail.
        np.testing.assert_allclose(q_function(x), Q_REF[x], rtol=1e-12)

    def test_vectorized_matches_scalar(self):
        x = np.linspace(-5, 5, 11)
        np.testing.assert_array_equal(q_function(x), [q_function(float(v)) for v in x])

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            q_function(math.inf)

    @given(st.floats(-30, 30))
    def test_symmetry(self, x):
        assert abs(q_function(x) + q_function(-x) - 1.0) < 1e-15

    @given(st.floats(1e-300, 1 - 1e-16, exclude_max=False))
    def test_inverse_round_trip(self, p):
        x = q_inverse(p)
        np.testing.assert_allclose(q_function(x), p, rtol=1e-12)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 2.0])
    def test_inverse_domain(self, p):
        with pytest.raises(DomainError):
            q_inverse(p)


class TestCapacityDispersion:
    def test_values(self):
        np.testing.assert_allclose(capacity(3.0), 2.0, rtol=1e-15)
        np.testing.assert_allclose(dispersion(1.0), 0.75 / math.log(2) ** 2, rtol=1e-15)

    def test_small_gamma_is_accurate(self):
        # 1 - (1 + g)^-2 ~ 2 g for tiny g: no cancellation.
        g = 1e-12
        np.testing.assert_allclose(dispersion(g), 2 * g / math.log(2) ** 2, rtol=1e-10)

    def test_infinite_gamma(self):
        assert dispersion(math.inf) == pytest.approx(1 / math.log(2) ** 2)

    @pytest.mark.parametrize("f", [capacity, dispersion])
    def test_negative_rejected(self, f):
        with pytest.raises(DomainError):
            f(-1.0)

    @given(st.floats(0, 1e8))
    def test_dispersion_bounded(self, g):
        v = dispersion(g)
        assert 0.0 <= v <= 1 / math.log(2) ** 2 + 1e-15


class TestDecodingError:
    def test_at_capacity_is_half(self):
        assert decoding_error(3.0, 500, 2.0) == pytest.approx(0.5)

    def test_zero_snr(self):
        assert decoding_error(0.0, 100, 0.5) == 1.0
        assert decoding_error(0.0, 100, 0.0) == 0.5

    @given(st.floats(0.01, 100), st.integers(10, 5000), st.floats(0, 5))
    def test_is_probability(self, g, n, R):
        e = decoding_error(g, n, R)
        assert 0.0 <= e <= 1.0

    @given(st.floats(0.1, 100), st.floats(0, 3), st.floats(0, 3))
    def test_monotone_in_rate(self, g, r1, r2):
        lo, hi = sorted((r1, r2))
        assert decoding_error(g, 500, lo) <= decoding_error(g, 500, hi)


class TestLambertW:
    @pytest.mark.parametrize("x", sorted(W0_REF))
    def test_reference_values(self, x):
        np.testing.assert_allclose(lambert_w0(x), W0_REF[x], rtol=1e-14)

    def test_branch_point_and_special_values(self):
        assert lambert_w0(-1 / math.e) == -1.0
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.inf) == math.inf

    def test_domain(self):
        with pytest.raises(DomainError):
            lambert_w0(-0.5)

    @given(st.floats(-1 / math.e + 1e-12, 1e300))
    def test_defining_identity(self, x):
        w = lambert_w0(x)
        np.testing.assert_allclose(w + math.log(abs(w)) if w != 0 else 0.0,
                                   math.log(abs(x)) if x != 0 else 0.0, atol=1e-9, rtol=1e-12)

    @given(st.floats(-0.36, 1e6))
    def test_matches_scipy(self, x):
        np.testing.assert_allclose(lambert_w0(x), special.lambertw(x).real, rtol=1e-12, atol=1e-14)


class TestRegUpperGamma:
    @pytest.mark.parametrize("key", sorted(GBAR_REF))
    def test_reference_values(self, key):
        np.testing.assert_allclose(reg_upper_gamma(*key), GBAR_REF[key], rtol=1e-14)

    @given(st.integers(1, 20), st.floats(0, 200))
    def test_matches_scipy(self, m, x):
        np.testing.assert_allclose(reg_upper_gamma(m, x), special.gammaincc(m, x), rtol=1e-12, atol=1e-300)

    def test_zero(self):
        assert reg_upper_gamma(4, 0.0) == 1.0

    @pytest.mark.parametrize("m", [0, 1.5])
    def test_order_must_be_positive_integer(self, m):
        with pytest.raises(DomainError):
            reg_upper_gamma(m, 1.0)


class TestIntegrate:
    def test_polynomial_exact(self):
        assert integrate(lambda x: x ** 3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-14)

    def test_semi_infinite(self):
        np.testing.assert_allclose(integrate(lambda x: np.exp(-x), 0.0, math.inf), 1.0, rtol=1e-12)

    def test_reversed_limits(self):
        assert integrate(lambda x: x, 1.0, 0.0) == pytest.approx(-0.5)

    def test_scalar_callable(self):
        tol = Tolerance(1e-12, 1e-12)
        assert integrate(math.sin, 0.0, math.pi, tol, vectorized=False) == pytest.approx(2.0, rel=1e-12)

    def test_non_convergence_reports_best(self):
        with pytest.raises(ConvergenceError) as exc:
            integrate(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, Tolerance(1e-15, 1e-15, 3))
        assert exc.value.best is not None


class TestFindRoot:
    def test_brent(self):
        assert find_root(lambda x: x * x - 2.0, (0.0, 2.0), Tolerance(1e-15, 1e-15)) == pytest.approx(math.sqrt(2))

    def test_newton_with_bracket(self):
        r = find_root(lambda x: math.cos(x) - x, (0.0, 1.0), Tolerance(1e-15, 1e-15),
                      df=lambda x: -math.sin(x) - 1.0)
        assert abs(math.cos(r) - r) < 1e-14

    def test_newton_safeguard_bad_derivative(self):
        # A wrong-sign derivative must not push the iterate out of the bracket.
        r = find_root(lambda x: x - 0.25, (0.0, 1.0), df=lambda x: -1.0)
        assert r == pytest.approx(0.25, abs=1e-9)

    def test_no_sign_change(self):
        with pytest.raises(BracketError):
            find_root(lambda x: x * x + 1.0, (-1.0, 1.0))

    def test_expand_bracket(self):
        lo, hi = expand_bracket_upper(lambda x: x - 100.0, 1.0, 2.0)
        assert lo < 100.0 <= hi

    def test_expand_bracket_fails(self):
        with pytest.raises(BracketError):
            expand_bracket_upper(lambda x: 1.0, 1.0, 2.0, max_doublings=5)


class TestTolerance:
    @pytest.mark.parametrize("kw", [{"abs_tol": 0}, {"rel_tol": -1}, {"max_iter": 0}])
    def test_validation(self, kw):
        with pytest.raises(DomainError):
            Tolerance(**kw)
