import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import E1, PAIR_CUMULANTS, pair_cgf_derivative
from skewdisorder import cumulants as cu
from skewdisorder.errors import InvalidArgument, PrecisionLossError, UnsupportedOrder


class TestSeries:
    @pytest.mark.parametrize("x", sorted(PAIR_CUMULANTS))
    def test_against_mpmath_derivatives(self, x):
        got = cu.cumulants_series(2, x, 6).values
        ref = PAIR_CUMULANTS[x]
        # κ_1 at x = 10 sits on the cancellation floor of ~1e-10
        tol = [1e-10] + [1e-11] * 5
        for g, r, t in zip(got, ref, tol):
            assert g == pytest.approx(r, rel=t, abs=0)

    @pytest.mark.parametrize("x", [0.01, 0.1, 1.0])
    def test_mean_closed_form_at_moderate_x(self, x):
        assert cu.cumulants_series(2, x, 1).values[0] == pytest.approx(E1[x], rel=1e-13)

    def test_scales_linearly_with_pairs(self):
        a = np.array(cu.cumulants_series(2, 0.7, 5).values)
        b = np.array(cu.cumulants_series(60, 0.7, 5).values)
        np.testing.assert_allclose(b, 30 * a, rtol=1e-15)

    def test_rescaled(self):
        c = cu.cumulants_series(40, 1.0, 2)
        assert c.rescaled[1] == pytest.approx(1.3758792443817816, rel=1e-13)

    def test_order_limit(self):
        with pytest.raises(PrecisionLossError):
            cu.cumulants_series(4, 1.0, 17)
        assert len(cu.cumulants_series(4, 1.0, 16).values) == 16

    @pytest.mark.parametrize("J", [0, -1, 2.5, True])
    def test_bad_order(self, J):
        with pytest.raises(InvalidArgument):
            cu.cumulants_series(4, 1.0, J)

    def test_small_x_polygamma_limits(self):
        k = cu.cumulants_series(2, 1e-6, 4).values
        assert k[1] == pytest.approx(math.pi**2 / 6, abs=1e-4)
        assert k[2] == pytest.approx(-2 * 1.2020569031595942, abs=1e-3)
        assert k[3] == pytest.approx(math.pi**4 / 15, abs=1e-3)

    @pytest.mark.parametrize("j", [2, 3, 4])
    def test_large_x_limit_vanishes(self, j):
        vals = [abs(cu.cumulants_series(2, x, 4).rescaled[j - 1]) for x in (1e2, 1e3, 1e4)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 1e-3

    @given(st.floats(1e-3, 40.0))
    def test_variance_positive_and_decreasing_in_x(self, x):
        k2a = cu.cumulants_series(2, x, 2).values[1]
        k2b = cu.cumulants_series(2, 1.1 * x, 2).values[1]
        assert 0 < k2b < k2a < math.pi**2 / 6 + 1e-12

    @given(st.floats(0.1, 10.0))
    def test_left_skewed_in_crossover(self, x):
        assert cu.cumulants_series(2, x, 3).values[2] < 0

    def test_set_accessors(self):
        c = cu.cumulants_series(8, 1.0, 3)
        assert c.kappa(2) == c.values[1]
        assert set(c.as_dict()) == {"kappa1", "kappa2", "kappa3"}
        with pytest.raises(InvalidArgument):
            c.kappa(4)


class TestIndependentPaths:
    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
    def test_faa_di_bruno(self, x):
        a = cu.cumulants_series(2, x, 6).values
        b = cu.cumulants_faa_di_bruno(2, x, 6).values
        np.testing.assert_allclose(b, a, rtol=1e-9)

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
    def test_finite_difference(self, x):
        a = cu.cumulants_series(2, x, 4).values
        b = cu.cumulants_finite_difference(2, x, 4).values
        np.testing.assert_allclose(b, a, rtol=1e-5)

    @pytest.mark.parametrize("j", [2, 3, 4])
    def test_mpmath_differentiation(self, j):
        assert cu.cumulants_series(2, 2.5, 4).values[j - 1] == pytest.approx(pair_cgf_derivative(2.5, j), rel=1e-11)

    def test_partition_counts(self):
        # p(j) = 1, 2, 3, 5, 7, 11
        assert [len(list(cu._partitions(j))) for j in range(1, 7)] == [1, 2, 3, 5, 7, 11]

    def test_path_limits(self):
        with pytest.raises(InvalidArgument):
            cu.cumulants_faa_di_bruno(2, 1.0, 7)
        with pytest.raises(InvalidArgument):
            cu.cumulants_finite_difference(2, 1.0, 5)


class TestClosedForms:
    def test_kappa1(self):
        assert cu.kappa1(8, 1.0) == pytest.approx(4 * 0.21938393439552027, rel=2e-15, abs=0)

    def test_kappa1_rejects_bad_x(self):
        with pytest.raises(InvalidArgument):
            cu.kappa1(8, 0.0)

    def test_ratio(self):
        c = cu.CumulantSet(2, 1.0, (0.0, 4.0, -8.0, 16.0))
        assert cu.cumulant_ratio(c, 3) == -1.0
        assert cu.cumulant_ratio(c, 4) == 1.0
        with pytest.raises(InvalidArgument):
            cu.cumulant_ratio(c, 2)


class TestAsymptotics:
    def test_negative_alpha_variance(self):
        errs = []
        for M in (500, 1000, 2000):
            x = M**-1.0
            exact = cu.cumulants_series(M, x, 2).values[1]
            errs.append(abs(exact / cu.asymptotic_predict(M, -1.0, 2) - 1))
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3

    def test_negative_alpha_mean(self):
        M = 2000
        exact = cu.kappa1(M, M**-1.0)
        assert cu.asymptotic_predict(M, -1.0, 1) == pytest.approx(exact, rel=1e-5)

    @pytest.mark.parametrize("j", [3, 4])
    def test_negative_alpha_higher(self, j):
        M = 4000
        exact = cu.cumulants_series(M, M**-0.5, j).values[j - 1]
        assert cu.asymptotic_predict(M, -0.5, j) == pytest.approx(exact, rel=1e-3)

    def test_zero_alpha_is_exact(self):
        for j in (1, 2, 5):
            law = cu.asymptotic_law(0.0, j)
            exact = cu.cumulants_series(300, 1.0, j).values[j - 1]
            assert law(300) == pytest.approx(exact, rel=1e-12)

    def test_positive_alpha_variance(self):
        M = 2000
        exact = cu.cumulants_series(M, M**0.5, 2).values[1]
        assert exact / math.sqrt(M) == pytest.approx(1.0, abs=0.05)
        assert cu.asymptotic_predict(M, 0.5, 2) == pytest.approx(math.sqrt(M), rel=1e-12)

    @pytest.mark.parametrize("j", [3, 4])
    def test_positive_alpha_power_law(self, j):
        # the constant is a leading-order estimate; the exponent is what matters
        alpha = 0.5
        ratios = []
        for M in (4000, 64000):
            exact = cu.cumulants_series(M, M**alpha, j).values[j - 1]
            ratios.append(exact / cu.asymptotic_predict(M, alpha, j))
        assert ratios[0] > 0 and ratios[1] > 0
        assert ratios[1] / ratios[0] == pytest.approx(1.0, abs=0.15)

    def test_regimes(self):
        assert cu.asymptotic_law(-0.3, 2).regime == "alpha<0"
        assert cu.asymptotic_law(0.3, 2).regime == "0<alpha<1"
        assert cu.asymptotic_law(1.0, 2).regime == "alpha=1"
        assert cu.asymptotic_law(1.5, 2).regime == "alpha>1"

    def test_unsupported_order(self):
        with pytest.raises(UnsupportedOrder):
            cu.asymptotic_law(-1.0, 5)
        with pytest.raises(InvalidArgument):
            cu.asymptotic_law(-1.0, 0)
