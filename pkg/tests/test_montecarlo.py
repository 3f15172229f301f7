import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from oracles import dense_skew_circulant, q_matrix_dense
from skewdisorder.charfun import DisorderScale
from skewdisorder.cumulants import cumulants_series, kappa1
from skewdisorder.errors import InvalidArgument
from skewdisorder.inversion import DistributionGrid, default_grid
from skewdisorder.montecarlo import (
    SampleBatch,
    _chunk_rng,
    empirical_cumulants,
    histogram,
    k_statistics,
    ks_compare,
    sample,
)


class TestSampler:
    def test_each_draw_is_a_dense_log_determinant(self):
        scale = DisorderScale(6, 0.9)
        batch = sample(scale, 25, seed=3, chunk=25)
        rng = _chunk_rng(3, 0)
        entries = rng.normal(0.0, math.sqrt(2 * scale.sigma2 / 6), (25, 6))
        Q = q_matrix_dense(6)
        for e, F in zip(entries, batch.samples):
            sign, ref = np.linalg.slogdet(Q + dense_skew_circulant(e))
            assert sign > 0
            assert F == pytest.approx(ref, abs=1e-10)

    def test_reproducible(self):
        s = DisorderScale(8, 1.0)
        a = sample(s, 3000, 11, chunk=700)
        b = sample(s, 3000, 11, chunk=700)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_independent_of_worker_count(self):
        s = DisorderScale(8, 1.0)
        a = sample(s, 5000, 2, chunk=512, jobs=1)
        b = sample(s, 5000, 2, chunk=512, jobs=4)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_seeds_differ(self):
        s = DisorderScale(4, 1.0)
        assert not np.array_equal(sample(s, 50, 1).samples, sample(s, 50, 2).samples)

    @pytest.mark.parametrize("bad", [dict(count=0), dict(seed=-1), dict(phase_source="pi"), dict(chunk=0)])
    def test_argument_checks(self, bad):
        kw = dict(count=10, seed=0, phase_source="q", chunk=16)
        kw.update(bad)
        with pytest.raises(InvalidArgument):
            sample(DisorderScale(4, 1.0), **kw)

    def test_mean_two_by_two(self):
        b = sample(DisorderScale(2, 1.0), 1_000_000, seed=101)
        e = empirical_cumulants(b, 1)
        assert abs(e.values[0] - 0.21938393439552027) < 4 * e.errors[0]

    def test_variance_eight(self):
        b = sample(DisorderScale(8, 1.0), 1_000_000, seed=102)
        e = empirical_cumulants(b, 3)
        exact = cumulants_series(8, 1.0, 3).values
        assert abs(e.values[1] - exact[1]) < 4 * e.errors[1]
        assert abs(e.values[2] - exact[2]) < 4 * e.errors[2]

    @pytest.mark.parametrize("other", ["zero", "random"])
    def test_phase_invariance(self, other):
        s = DisorderScale(8, 1.0)
        ks = ks_compare(sample(s, 200_000, 5, "q"), sample(s, 200_000, 6, other))
        assert ks["statistic"] < ks["critical_1pct"]

    def test_clt_trend_of_sample_skewness(self):
        skews = {}
        for M in (8, 32, 128):
            e = empirical_cumulants(sample(DisorderScale(M, 1.0), 400_000, seed=M), 3)
            skews[M] = e.values[2] / e.values[1] ** 1.5 * math.sqrt(M)
        assert skews[32] == pytest.approx(skews[8], rel=0.2)
        assert skews[128] == pytest.approx(skews[8], rel=0.2)


class TestKStatistics:
    def test_constant_batch(self):
        e = empirical_cumulants(np.full(100, 2.5), 2)
        assert e.values[0] == 2.5 and e.values[1] == 0.0

    @given(st.lists(st.floats(-1e3, 1e3), min_size=12, max_size=60))
    def test_against_scipy_kstat(self, data):
        data = np.array(data)
        if np.ptp(data) < 1e-3:
            return
        k = k_statistics(data, 4)
        for n in range(1, 5):
            ref = stats.kstat(data, n)
            assert k[n - 1] == pytest.approx(ref, rel=1e-7, abs=1e-7 * np.ptp(data) ** n)

    def test_jackknife_against_brute_force(self):
        data = np.random.default_rng(4).gamma(2.0, size=80)
        e = empirical_cumulants(data, 4)
        loo = np.array([k_statistics(np.delete(data, i), 4) for i in range(data.size)])
        n = data.size
        se = np.sqrt((n - 1) / n * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
        np.testing.assert_allclose(e.errors, se, rtol=1e-8)

    def test_gaussian_higher_cumulants_vanish(self):
        data = np.random.default_rng(8).standard_normal(1_000_000)
        e = empirical_cumulants(data, 4)
        assert abs(e.values[2]) < 4 * e.errors[2]
        assert abs(e.values[3]) < 4 * e.errors[3]

    def test_needs_enough_samples(self):
        with pytest.raises(InvalidArgument):
            empirical_cumulants(np.arange(39.0), 4)


class TestHistogram:
    def test_integral_is_fraction_inside(self):
        data = np.random.default_rng(1).normal(size=5000)
        f = np.linspace(-1.0, 2.0, 31)
        h = histogram(data, f)
        inside = np.mean((data >= -1.0) & (data <= 2.0))
        assert h.integral() == pytest.approx(inside, abs=1e-12)

    def test_empty_overlap(self):
        h = histogram(np.zeros(100), np.linspace(5, 6, 11))
        assert np.all(h.p == 0)

    def test_metadata_from_batch(self):
        b = sample(DisorderScale(4, 2.0), 1000, 0)
        h = histogram(b, default_grid(kappa1(4, 2.0), 1.0, 65))
        assert h.meta["M"] == 4 and h.meta["count"] == 1000
        assert isinstance(h, DistributionGrid)


class TestSerialisation:
    def test_csv_round_trip(self, tmp_path):
        b = sample(DisorderScale.from_alpha(6, -0.5), 40, seed=9, phase_source="zero", chunk=16)
        path = tmp_path / "s.csv"
        text = b.to_csv(path)
        assert text.startswith("# seed=9 M=6")
        back = SampleBatch.from_csv(path)
        np.testing.assert_array_equal(back.samples, b.samples)
        assert back.scale == b.scale and back.phase_source == "zero" and back.chunk == 16

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidArgument):
            SampleBatch([1.0, float("nan")], DisorderScale(2, 1.0), 0)
