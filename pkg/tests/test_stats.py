"""Weighted EDF statistics, Monte-Carlo p-values, and the trial protocol."""

import io
import math

import numpy as np
import pytest
import scipy.stats as spstats

from qgauss.generator import UniformStream, generate, init, make_spec
from qgauss.maps import MapConfig
from qgauss.stats import (
    DEFAULT_NULL_SEED,
    autocorrelation,
    gof_test,
    lyapunov,
    mc_p_value,
    run_trial_table,
    sup_weighted_statistic,
)


def _identity_cdf(arr):
    return np.asarray(arr, dtype=float)


class TestSupWeightedStatistic:
    def test_single_point_example(self):
        # one sample at the median: both one-sided deviations are 0.5
        stat = sup_weighted_statistic([0.0], lambda a: np.full_like(a, 0.5))
        assert stat == pytest.approx(0.5, abs=1e-15)

    def test_equioscillating_quantiles(self):
        M = 40
        samples = np.sort((np.arange(M) + 0.5) / M)
        stat = sup_weighted_statistic(samples, _identity_cdf)
        assert stat == pytest.approx(math.sqrt(M) * 0.5 / M, abs=1e-13)

    def test_anderson_weight_dominates_ks(self):
        rng = np.random.default_rng(17)
        samples = np.sort(rng.uniform(size=250))
        ks = sup_weighted_statistic(samples, _identity_cdf, weight="one")
        ad = sup_weighted_statistic(samples, _identity_cdf, weight="anderson")
        assert ad >= ks

    def test_anderson_weight_at_median(self):
        # sqrt(1/(0.5*0.5)) = 2 exactly
        ks = sup_weighted_statistic([0.0], lambda a: np.full_like(a, 0.5))
        ad = sup_weighted_statistic([0.0], lambda a: np.full_like(a, 0.5),
                                    weight="anderson")
        assert ad == pytest.approx(2.0 * ks, abs=1e-14)

    def test_weight_clamp_keeps_statistic_finite(self):
        # a sample whose model cdf rounds to exactly 1.0 must not blow up
        M = 100
        samples = np.sort(np.linspace(0.01, 0.99, M))
        F = _identity_cdf(samples).copy()
        F[-1] = 1.0
        stat = sup_weighted_statistic(samples, lambda a: F, weight="anderson")
        assert math.isfinite(stat)
        # the clamped weight at u = 1 - 1/(2M) is sqrt(2M/(1 - 1/(2M)))
        assert stat <= math.sqrt(M) * 1.0 * math.sqrt(2 * M / (1 - 1 / (2 * M)))

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            sup_weighted_statistic([0.3, 0.1], _identity_cdf)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sup_weighted_statistic([], _identity_cdf)

    def test_rejects_unknown_weight(self):
        with pytest.raises(ValueError):
            sup_weighted_statistic([0.5], _identity_cdf, weight="cvm")


class TestMcPValue:
    def test_zero_statistic_gives_one(self):
        spec = make_spec(0.5)
        assert mc_p_value(spec, 50, 0.0, n_null=99) == pytest.approx(1.0)

    def test_huge_statistic_gives_floor(self):
        spec = make_spec(0.5)
        p = mc_p_value(spec, 50, 1e9, n_null=99)
        assert p == pytest.approx(1.0 / 100.0)

    def test_median_statistic_near_half(self):
        spec = make_spec(1.5)
        # draw one replicate and use its own null median as observed
        from qgauss.stats import _null_statistics
        ks_null, _ = _null_statistics(100, 499, DEFAULT_NULL_SEED)
        observed = float(np.median(ks_null))
        p = mc_p_value(spec, 100, observed, n_null=499)
        assert abs(p - 0.5) < 2.0 / math.sqrt(499)

    def test_probability_and_literal_modes_agree(self):
        """The quantile-drawing wording and the probability-space shortcut
        are the same law; on a small case the p-values coincide."""
        spec = make_spec(1.5)
        for observed in (0.4, 0.8, 1.2, 2.0):
            p_fast = mc_p_value(spec, 50, observed, n_null=99, seed=5,
                                method="probability")
            p_lit = mc_p_value(spec, 50, observed, n_null=99, seed=5,
                               method="literal")
            assert p_fast == pytest.approx(p_lit, abs=0.05)

    def test_rejects_nonpositive_n_null(self):
        with pytest.raises(ValueError):
            mc_p_value(make_spec(1.0), 50, 0.5, n_null=0)

    def test_rejects_negative_statistic(self):
        with pytest.raises(ValueError):
            mc_p_value(make_spec(1.0), 50, -0.1)

    def test_null_p_values_are_uniform(self):
        """Self-consistency: p-values of null draws are ~Uniform(0,1)."""
        stream = UniformStream(314159)
        spec = make_spec(0.5)
        pvals = []
        for _ in range(200):
            u = np.sort(stream.take(100))
            stat = sup_weighted_statistic(u, _identity_cdf)
            pvals.append(mc_p_value(spec, 100, stat, n_null=499))
        p = spstats.kstest(pvals, "uniform").pvalue
        assert p > 0.01


class TestGofTest:
    def test_model_samples_pass(self):
        from qgauss.distribution import quantile
        stream = UniformStream(777)
        samples = [quantile(0.5, u) for u in stream.take(400)]
        res = gof_test(samples, 0.5, kind="ks", n_null=199)
        assert res.p_value > 0.05
        assert res.kind == "ks"
        assert res.n_samples == 400

    def test_wrong_model_fails(self):
        stream = UniformStream(778)
        # uniform(-1, 1) pretending to be a Gaussian
        samples = 2.0 * stream.take(2000) - 1.0
        res = gof_test(samples, 1.0, kind="ks", n_null=199)
        assert res.p_value <= 0.01

    def test_arrangements_identical_for_compact_family(self):
        stream = UniformStream(779)
        from qgauss.distribution import quantile
        samples = [quantile(0.0, u) for u in stream.take(300)]
        a = gof_test(samples, 0.0, kind="ad", n_null=99, arrangement="direct")
        b = gof_test(samples, 0.0, kind="ad", n_null=99,
                     arrangement="complement")
        assert a.statistic == pytest.approx(b.statistic, rel=1e-12)
        assert a.p_value == b.p_value

    def test_rejects_unknown_arrangement(self):
        with pytest.raises(ValueError):
            gof_test([0.0], 1.0, arrangement="fast")


class TestAutocorrelation:
    def test_constant_sequence_is_zero(self):
        x = [3.5] * 64
        for m in (0, 1, 5):
            assert autocorrelation(x, m) == pytest.approx(0.0, abs=1e-12)

    def test_alternating_sequence(self):
        x = [1.0, -1.0] * 50
        assert autocorrelation(x, 0) == pytest.approx(1.0)
        assert autocorrelation(x, 1) == pytest.approx(-1.0)

    def test_lag_zero_is_biased_variance(self):
        rng = np.random.default_rng(23)
        x = rng.normal(size=500)
        assert autocorrelation(x, 0) == pytest.approx(float(np.var(x)),
                                                      rel=1e-12)

    def test_lag_bounds(self):
        with pytest.raises(ValueError):
            autocorrelation([1.0, 2.0], 2)
        with pytest.raises(ValueError):
            autocorrelation([1.0, 2.0], -1)


class TestLyapunov:
    def test_analytic_route_smoke(self):
        lam = lyapunov(make_spec(0.5).q_int, MapConfig(), z0=1.0, t=20000)
        assert lam == pytest.approx(math.log(2.0), rel=0.02)

    def test_chain_rule_route_smoke(self):
        cfg = MapConfig(l=3, c=1)
        lam = lyapunov(make_spec(0.5).q_int, cfg, z0=1.0, t=20000)
        assert lam == pytest.approx(math.log(3.0), rel=0.02)

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValueError):
            lyapunov(1.0, MapConfig(), z0=1.0, t=0)


class TestTrialTable:
    def test_small_table_shape_and_determinism(self):
        q_list = [0.5, 1.5]
        t1 = run_trial_table(q_list, trials=3, samples=400, n_null=99,
                             master_seed=1)
        t2 = run_trial_table(q_list, trials=3, samples=400, n_null=99,
                             master_seed=1)
        assert t1.rows == t2.rows
        assert len(t1.rows) == 2
        assert all(len(r.p_ks) == 3 for r in t1.rows)
        assert t1.rows[0].p_ks_best == max(t1.rows[0].p_ks)

    def test_jobs_do_not_change_results(self):
        q_list = [0.5, 1.5]
        serial = run_trial_table(q_list, trials=2, samples=300, n_null=99,
                                 master_seed=2, jobs=1)
        parallel = run_trial_table(q_list, trials=2, samples=300, n_null=99,
                                   master_seed=2, jobs=2)
        assert serial.rows == parallel.rows

    def test_csv_layout(self):
        tab = run_trial_table([0.5, 1.5], trials=2, samples=200, n_null=99,
                              master_seed=3)
        buf = io.StringIO()
        tab.to_csv(buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "q,nu,p_AD_best,p_KS_best"
        assert lines[1].startswith("0.5,,")      # nu column empty for q <= 1
        assert lines[2].startswith("1.5,3,")     # nu = 3 exactly

    def test_metadata_round_trip(self):
        tab = run_trial_table([1.0], trials=1, samples=100, n_null=99,
                              master_seed=4)
        meta = tab.metadata()
        assert meta["samples"] == 100
        assert meta["master_seed"] == 4
        assert meta["d"] == 8

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            run_trial_table([1.0], trials=0)
        with pytest.raises(ValueError):
            run_trial_table([1.0], samples=-5)


class TestSensitivityOrdering:
    def test_ad_reacts_to_tail_surplus_before_ks(self):
        """Heavy-tail contamination of a Gaussian shows up in the weighted
        statistic first; the unweighted one barely moves."""
        rng = np.random.default_rng(909)
        base = np.sort(rng.normal(size=2000))
        contaminated = base.copy()
        contaminated[-4:] = [15.0, 18.0, 22.0, 30.0]  # far-tail surplus
        contaminated = np.sort(contaminated)

        from qgauss.distribution import cdf_array
        ks_clean = sup_weighted_statistic(base, lambda a: cdf_array(1.0, a))
        ks_dirty = sup_weighted_statistic(contaminated,
                                          lambda a: cdf_array(1.0, a))
        ad_clean = sup_weighted_statistic(base, lambda a: cdf_array(1.0, a),
                                          weight="anderson")
        ad_dirty = sup_weighted_statistic(contaminated,
                                          lambda a: cdf_array(1.0, a),
                                          weight="anderson")
        assert (ad_dirty / ad_clean) > (ks_dirty / ks_clean)
        # with the weight clamped at sqrt(2M), four surplus points contribute
        # about sqrt(M) * (4/M) * sqrt(2M) = 4*sqrt(2) to the weighted sup
        assert ad_dirty > 1.5 * ad_clean
        assert ad_dirty == pytest.approx(4.0 * math.sqrt(2.0), rel=0.05)
