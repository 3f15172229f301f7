import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import E1, KUMMER_TAYLOR, e1_quad, kummer_mp
from skewdisorder import specfun
from skewdisorder.errors import DomainError, InvalidArgument


class TestPowerSeries:
    def test_log_of_exp_series_is_linear(self):
        coeffs = [1.0 / math.factorial(n) for n in range(8)]
        b = specfun.PowerSeries(coeffs).log().coeffs
        assert b[0] == 0
        assert b[1] == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(b[2:].real, 0.0, atol=1e-15)

    def test_log_of_one_plus_t(self):
        b = specfun.PowerSeries([1.0, 1.0]).log().coeffs
        # ln(1+t) = t - t²/2 + ..., truncated at order 1
        assert b[1] == 1.0

    def test_log_matches_composition(self):
        a = specfun.PowerSeries([2.0, 0.3, -0.1, 0.05, 0.02])
        t = 0.01
        assert a.log()(t).real == pytest.approx(math.log(a(t).real), abs=1e-10)

    def test_vanishing_constant_rejected(self):
        with pytest.raises(DomainError):
            specfun.PowerSeries([0.0, 1.0]).log()

    def test_empty_rejected(self):
        with pytest.raises(InvalidArgument):
            specfun.PowerSeries([])

    def test_add_truncates_and_derivatives(self):
        s = specfun.PowerSeries([1, 2, 3]) + specfun.PowerSeries([1, 1])
        assert s.order == 1
        np.testing.assert_array_equal(specfun.PowerSeries([1, 1, 1, 1]).derivatives().real, [1, 1, 2, 6])

    def test_coefficients_are_read_only(self):
        s = specfun.PowerSeries([1.0, 2.0])
        with pytest.raises(ValueError):
            s.coeffs[0] = 3.0


class TestGammaHelpers:
    def test_log_gamma_taylor_against_lgamma(self):
        series = specfun.log_gamma_taylor(16)
        for t in (0.05, -0.1, 0.2):
            assert series(t).real == pytest.approx(math.lgamma(1 + t), abs=1e-12)

    def test_polygamma_values(self):
        assert specfun.polygamma_at_one(0) == -specfun.EULER_GAMMA
        assert specfun.polygamma_at_one(1) == pytest.approx(math.pi**2 / 6, rel=1e-15)
        assert specfun.polygamma_at_one(3) == pytest.approx(math.pi**4 / 15, rel=1e-15)

    def test_log_gamma_taylor_order_check(self):
        with pytest.raises(InvalidArgument):
            specfun.log_gamma_taylor(0)

    @pytest.mark.parametrize("x", sorted(E1))
    def test_incomplete_gamma_zero(self, x):
        assert specfun.incomplete_gamma_zero(x) == pytest.approx(E1[x], rel=1e-14)

    def test_incomplete_gamma_one_vs_quadrature(self):
        assert abs(specfun.incomplete_gamma_zero(1.0) - e1_quad(1.0)) < 1e-15

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_incomplete_gamma_domain(self, x):
        with pytest.raises(DomainError):
            specfun.incomplete_gamma_zero(x)

    def test_log_gamma_complex(self):
        z = 1 + 3j
        assert specfun.log_gamma_complex(z) == pytest.approx(complex(mpmath.loggamma(z)), abs=1e-14)
        with pytest.raises(DomainError):
            specfun.log_gamma_complex(-0.5 + 1j)

    @given(st.floats(-20, 20))
    def test_confluent_identity_exp(self, z):
        assert specfun.hyp1f1_real(1.0, z) == pytest.approx(math.exp(z), rel=1e-12, abs=0)

    @pytest.mark.parametrize("a, z", [(0.5, -7.0), (-1.5, -12.0), (2.5, -3.0), (0.3, 4.0)])
    def test_against_mpmath(self, a, z):
        ref = float(mpmath.hyp1f1(a, 1, z))
        assert specfun.hyp1f1_real(a, z) == pytest.approx(ref, rel=1e-12, abs=0)


class TestKummerTaylor:
    @pytest.mark.parametrize("x", sorted(KUMMER_TAYLOR))
    def test_against_mpmath_taylor(self, x):
        c = specfun.kummer_m_taylor(x, 6).real
        np.testing.assert_allclose(c, KUMMER_TAYLOR[x], rtol=1e-13)

    def test_first_coefficient_sign_at_one(self):
        assert specfun.kummer_m_taylor(1.0, 1).real[1] == pytest.approx(0.7965995992970532, rel=1e-15)

    def test_zero_order_constant(self):
        assert specfun.kummer_m_taylor(3.0, 0).real.tolist() == [1.0]

    @pytest.mark.parametrize("x", [0.3, 1.0, 2.0, 5.0])
    def test_routes_agree(self, x):
        a = specfun.kummer_m_taylor(x, 8, method="direct").real
        b = specfun.kummer_m_taylor(x, 8, method="transformed").real
        np.testing.assert_allclose(a, b, rtol=1e-9)

    def test_large_x_uses_stable_route(self):
        c = specfun.kummer_m_taylor(1e4, 3).real
        # c_1 = E[H_N], N ~ Poisson(x) ~ ln x + γ for large x
        assert c[1] == pytest.approx(math.log(1e4) + specfun.EULER_GAMMA, rel=1e-6)

    @pytest.mark.parametrize("bad", [0.0, -2.0, float("nan"), float("inf")])
    def test_bad_x(self, bad):
        with pytest.raises((DomainError, InvalidArgument)):
            specfun.kummer_m_taylor(bad, 3)

    def test_unknown_method(self):
        with pytest.raises(InvalidArgument):
            specfun.kummer_m_taylor(1.0, 3, method="magic")


class TestKummerComplex:
    @pytest.mark.parametrize("x", [0.01, 0.5, 2.0, 3.0, 30.0, 200.0])
    @pytest.mark.parametrize("k", [0.1, 1.0, 7.5, 40.0])
    def test_against_mpmath(self, x, k):
        val, log_val = specfun.kummer_m_complex(k, x)
        ref = kummer_mp(-1j * k, -x)
        assert abs(val - ref) <= 1e-11 * abs(ref)
        assert abs(np.exp(log_val) - ref) <= 1e-11 * abs(ref)

    def test_zero_k_exact(self):
        val, log_val = specfun.kummer_m_complex(np.array([0.0, 1.0]), 5.0)
        assert val[0] == 1.0 and log_val[0] == 0.0

    def test_conjugate_symmetry(self):
        v1, _ = specfun.kummer_m_complex(2.5, 4.0)
        v2, _ = specfun.kummer_m_complex(-2.5, 4.0)
        assert v2 == pytest.approx(np.conj(v1), rel=1e-13)

    def test_log_does_not_overflow(self):
        # |𝐌| overflows a double here but its log stays finite
        _, log_val = specfun.kummer_m_complex(1e4, 1e3)
        assert np.isfinite(log_val)

    def test_array_shape_preserved(self):
        val, log_val = specfun.kummer_m_complex(np.linspace(0, 3, 12).reshape(3, 4), 1.5)
        assert val.shape == (3, 4) and log_val.shape == (3, 4)

    @given(st.floats(0.05, 60.0), st.floats(-15.0, 15.0))
    def test_routes_agree_where_both_are_accurate(self, x, k):
        if x > 2.0:
            a, _ = specfun.kummer_m_complex(k, x)
            b = kummer_mp(-1j * k, -x, dps=25)
        else:
            a, _ = specfun.kummer_m_complex(k, x, method="direct")
            b, _ = specfun.kummer_m_complex(k, x, method="transformed")
        assert abs(a - b) <= 1e-10 * abs(b) + 1e-300

    def test_non_finite_k(self):
        with pytest.raises(InvalidArgument):
            specfun.kummer_m_complex(float("nan"), 1.0)


class TestCrossChecks:
    @pytest.mark.parametrize("x", [0.01, 0.1, 1.0, 10.0, 50.0])
    @pytest.mark.parametrize("k", [1e-3, -1e-3, 3e-4])
    def test_taylor_polynomial_reproduces_complex_value(self, x, k):
        c = specfun.kummer_m_taylor(x, 8).coeffs
        poly = sum(c[j] * (1j * k) ** j for j in range(9))
        val, _ = specfun.kummer_m_complex(k, x)
        assert abs(poly - val) <= 1e-9 * abs(val)

    @pytest.mark.parametrize("x", [0.01, 0.5, 1.0, 2.5, 5.0])
    def test_incomplete_gamma_alternating_form(self, x):
        tail = math.fsum((-x) ** k / (k * math.factorial(k)) for k in range(1, 80))
        alt = -specfun.EULER_GAMMA - math.log(x) - tail
        assert specfun.incomplete_gamma_zero(x) == pytest.approx(alt, rel=1e-10, abs=0)
