import math

import numpy as np
import pytest
from scipy import special as sp

import sigfrac as sg
from sigfrac.montecarlo import (AssociationRule, EmpiricalDistribution,
                                FadingModel, SimConfig, _rng_for,
                                arcsine_moment, conjecture_report,
                                empirical_ccdf, empirical_moment, ks_distance,
                                sample_nakagami, sample_plp, sample_sf,
                                sample_sf_topk)
from sigfrac.rayleigh import NetworkParams, sf_ccdf_exact

KS99 = 1.63  # 99% Kolmogorov quantile of sqrt(N) D_N


class TestConfigTypes:
    def test_fading_validation(self):
        assert FadingModel.none().second_moment == 1.0
        assert FadingModel.nakagami(2.0).second_moment == 1.5
        with pytest.raises(ValueError):
            FadingModel(kind="nakagami")
        with pytest.raises(ValueError):
            FadingModel.nakagami(0.0)
        with pytest.raises(ValueError):
            FadingModel(kind="rice")

    def test_assoc_validation(self):
        assert AssociationRule.kth_strongest(2).k == 2
        with pytest.raises(ValueError):
            AssociationRule(kind="kth")
        with pytest.raises(ValueError):
            AssociationRule(kind="other")

    def test_config_validation(self, params_half):
        with pytest.raises(ValueError):
            SimConfig(params=params_half, fading=FadingModel.none(),
                      assoc=AssociationRule.nba(), samples=0)
        with pytest.raises(ValueError):
            SimConfig(params=params_half, fading=FadingModel.none(),
                      assoc=AssociationRule.nba(), samples=10, tail_eps=1.5)
        # rba and kth are no-fading constructions
        with pytest.raises(ValueError):
            SimConfig(params=params_half, fading=FadingModel.nakagami(1.0),
                      assoc=AssociationRule.rba(), samples=10)
        with pytest.raises(ValueError):
            SimConfig(params=params_half, fading=FadingModel.nakagami(1.0),
                      assoc=AssociationRule.kth_strongest(2), samples=10)


class TestNakagami:
    def test_rayleigh_moments(self):
        rng = _rng_for(1, 0)
        h = sample_nakagami(1.0, rng, 10**6)
        n = h.size
        assert abs(h.mean() - 1.0) < 3.0 / math.sqrt(n)
        # var of Exp(1) is 1; var of the variance estimator ~ 8/n
        assert abs(h.var() - 1.0) < 3.0 * math.sqrt(8.0 / n)

    def test_nakagami2_second_moment(self):
        rng = _rng_for(2, 0)
        h = sample_nakagami(2.0, rng, 10**6)
        se = np.std(h * h) / math.sqrt(h.size)
        assert abs(np.mean(h * h) - 1.5) < 3.0 * se

    def test_half_small_x_slope(self):
        # F_h(x) ~ c x^(1/2) near 0: log-log slope of the empirical cdf
        rng = _rng_for(3, 0)
        h = sample_nakagami(0.5, rng, 10**6)
        x1, x2 = 1e-4, 1e-2
        f1, f2 = np.mean(h <= x1), np.mean(h <= x2)
        slope = (math.log(f2) - math.log(f1)) / (math.log(x2) - math.log(x1))
        assert abs(slope - 0.5) < 0.05

    def test_mean_one_all_m(self):
        rng = _rng_for(4, 0)
        for m in (0.5, 1.0, 2.0, 3.7):
            h = sample_nakagami(m, rng, 200_000)
            assert abs(h.mean() - 1.0) < 4.0 * h.std() / math.sqrt(h.size)


class TestSamplePlp:
    def _collect(self, params, n, seed, k=2):
        rng = _rng_for(seed, 0)
        out = np.empty((n, k))
        for i in range(n):
            xi, flag = sample_plp(params, 100_000, 1e-4, rng)
            assert not flag
            out[i] = xi[:k]
        return out

    def test_first_point_is_weibull(self, params_half):
        n = 50_000
        xi = self._collect(params_half, n, 11)[:, 0]
        dist = EmpiricalDistribution(samples=np.sort(
            1.0 - np.exp(-np.sort(xi) ** 0.5)))
        # equivalent: KS of xi_1 against 1 - exp(-x^d)
        d = ks_distance(dist, lambda u: u)
        assert d < KS99 / math.sqrt(n)

    def test_second_point_distribution(self, params_half):
        n = 50_000
        xi2 = np.sort(self._collect(params_half, n, 12)[:, 1])
        u = sp.gammainc(2.0, xi2 ** 0.5)   # regularized lower gamma cdf
        dist = EmpiricalDistribution(samples=np.sort(u))
        assert ks_distance(dist, lambda v: v) < KS99 / math.sqrt(n)

    def test_increments_are_unit_exponential(self, params_half):
        rng = _rng_for(13, 0)
        means = []
        for _ in range(200):
            xi, _ = sample_plp(params_half, 100_000, 1e-4, rng)
            g = xi ** 0.5
            means.append(np.diff(g).mean())
            assert np.all(np.diff(xi) > 0.0)
        total = np.mean(means)
        assert abs(total - 1.0) < 0.05


class TestSampleSf:
    def test_support(self, params_half):
        cfg = SimConfig(params=params_half, fading=FadingModel.nakagami(1.0),
                        assoc=AssociationRule.nba(), samples=20_000, seed=21)
        x = sample_sf(cfg).dist.samples
        assert x.min() >= 0.0 and x.max() <= 1.0

    def test_kth_support(self, params_half):
        for k in (2, 3):
            cfg = SimConfig(params=params_half, fading=FadingModel.none(),
                            assoc=AssociationRule.kth_strongest(k),
                            samples=20_000, seed=22 + k)
            x = sample_sf(cfg).dist.samples
            assert x.max() <= 1.0 / k

    def test_rayleigh_matches_exact_ccdf(self, params_half):
        cfg = SimConfig(params=params_half, fading=FadingModel.nakagami(1.0),
                        assoc=AssociationRule.nba(), samples=10**5, seed=23)
        dist = sample_sf(cfg).dist
        for t in (0.1, 0.5, 0.9):
            ref = sf_ccdf_exact(params_half, t)
            se = math.sqrt(ref * (1.0 - ref) / dist.count)
            assert abs(dist.ccdf(t) - ref) < 3.0 * se

    def test_no_fading_matches_g1(self, nofad_half_top5, params_half):
        sf1 = np.sort(nofad_half_top5[:, 0])
        n = sf1.size
        for t in (0.5, 0.7, 0.9):
            ref = sg.g_n(params_half, 1, t)
            se = math.sqrt(ref * (1.0 - ref) / n)
            emp = np.mean(sf1 > t)
            assert abs(emp - ref) < 3.0 * se

    def test_rba_matches_beta_law(self):
        p = NetworkParams.from_delta(2.0 / 3.0)
        cfg = SimConfig(params=p, fading=FadingModel.none(),
                        assoc=AssociationRule.rba(), samples=20_000, seed=25)
        dist = sample_sf(cfg).dist
        assert ks_distance(dist, lambda t: np.array(
            [sg.rba_cdf(p, float(v)) for v in t])) < KS99 / math.sqrt(dist.count)

    def test_isba_fading_invariance(self, params_half):
        n = 10**5
        cfg_f = SimConfig(params=params_half, fading=FadingModel.nakagami(1.0),
                          assoc=AssociationRule.isba(), samples=n, seed=26)
        cfg_n = SimConfig(params=params_half, fading=FadingModel.none(),
                          assoc=AssociationRule.isba(), samples=n, seed=27)
        df, dn = sample_sf(cfg_f).dist, sample_sf(cfg_n).dist
        for t in np.linspace(0.05, 0.9, 18):
            a, b = df.ccdf(t), dn.ccdf(t)
            se = math.sqrt(max(b * (1.0 - b), 1e-9) * 2.0 / n)
            assert abs(a - b) < 3.0 * se

    def test_isba_equals_nba_without_fading(self, params_half):
        kw = dict(params=params_half, fading=FadingModel.none(),
                  samples=5_000, seed=28)
        a = sample_sf(SimConfig(assoc=AssociationRule.isba(), **kw)).dist
        b = sample_sf(SimConfig(assoc=AssociationRule.nba(), **kw)).dist
        np.testing.assert_array_equal(a.samples, b.samples)


class TestDeterminism:
    def test_worker_count_invariance(self, params_half):
        cfg = SimConfig(params=params_half, fading=FadingModel.nakagami(1.0),
                        assoc=AssociationRule.nba(), samples=40_000, seed=31)
        a = sample_sf(cfg, workers=1).dist.samples
        b = sample_sf(cfg, workers=3).dist.samples
        np.testing.assert_array_equal(a, b)

    def test_worker_count_invariance_rba(self, params_half):
        cfg = SimConfig(params=params_half, fading=FadingModel.none(),
                        assoc=AssociationRule.rba(), samples=40_000, seed=32)
        a = sample_sf(cfg, workers=1).dist.samples
        b = sample_sf(cfg, workers=2).dist.samples
        np.testing.assert_array_equal(a, b)

    def test_topk_invariance(self, params_half):
        cfg = SimConfig(params=params_half, fading=FadingModel.none(),
                        assoc=AssociationRule.nba(), samples=40_000, seed=33)
        a, _ = sample_sf_topk(cfg, 3, workers=1)
        b, _ = sample_sf_topk(cfg, 3, workers=3)
        np.testing.assert_array_equal(a, b)


class TestTruncation:
    def test_budget_doubling_below_noise(self, params_half):
        base = dict(params=params_half, fading=FadingModel.nakagami(1.0),
                    assoc=AssociationRule.nba(), samples=10**5, seed=41)
        r1 = sample_sf(SimConfig(point_budget=500_000, **base)).dist
        r2 = sample_sf(SimConfig(point_budget=1_000_000, **base)).dist
        se = float(r1.samples.std()) / math.sqrt(r1.count)
        assert abs(empirical_moment(r1, 1) - empirical_moment(r2, 1)) < se

    def test_tail_eps_refinement_below_noise(self, params_half):
        base = dict(params=params_half, fading=FadingModel.nakagami(1.0),
                    assoc=AssociationRule.nba(), samples=10**5, seed=42)
        r1 = sample_sf(SimConfig(tail_eps=1e-4, **base)).dist
        r2 = sample_sf(SimConfig(tail_eps=1e-5, **base)).dist
        se = float(r1.samples.std()) / math.sqrt(r1.count)
        assert abs(empirical_moment(r1, 1) - empirical_moment(r2, 1)) < se

    def test_tight_budget_flags_and_aborts(self, params_half):
        cfg = SimConfig(params=params_half, fading=FadingModel.nakagami(1.0),
                        assoc=AssociationRule.nba(), samples=2_000, seed=43,
                        point_budget=16)
        with pytest.raises(sg.SimulationError):
            sample_sf(cfg)


class TestEmpirical:
    def test_ccdf_and_moment(self):
        dist = EmpiricalDistribution(samples=np.array([0.25, 0.75]))
        assert empirical_ccdf(dist, 0.5) == 0.5
        assert empirical_ccdf(dist, 0.75) == 0.0
        assert empirical_moment(dist, 1) == 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            EmpiricalDistribution(samples=np.array([]))
        with pytest.raises(ValueError):
            EmpiricalDistribution(samples=np.array([0.5, 0.2]))
        with pytest.raises(ValueError):
            EmpiricalDistribution(samples=np.array([0.2, 1.5]))

    def test_ks_of_uniforms(self):
        rng = _rng_for(51, 0)
        n = 100_000
        u = np.sort(rng.random(n))
        dist = EmpiricalDistribution(samples=u)
        assert ks_distance(dist, lambda t: t) < KS99 / math.sqrt(n)

    def test_ks_exactness_small_case(self):
        dist = EmpiricalDistribution(samples=np.array([0.5]))
        assert ks_distance(dist, lambda t: t) == 0.5


class TestConjectureReport:
    def test_arcsine_moments(self):
        assert arcsine_moment(1) == 0.5
        assert arcsine_moment(2) == 0.375
        assert arcsine_moment(10) == pytest.approx(
            math.comb(20, 10) / 4.0 ** 10, rel=1e-15)

    def test_report_structure(self):
        rep = conjecture_report(20_000, seed=61)
        assert len(rep.empirical_moments) == 10
        assert rep.arcsine_moments[0] == 0.5
        assert rep.flagged == 0
        assert 0.0 < rep.ks_distance < 0.05
        d = rep.to_dict()
        assert len(d["moments"]) == 10
        assert d["moments"][1]["arcsine"] == 0.375

    def test_moments_consistent_at_moderate_n(self):
        rep = conjecture_report(200_000, seed=62)
        # ~4.4 sigma envelope at this sample size for every moment order
        assert max(rep.rel_moment_diffs) < 2e-2
        assert rep.ks_distance < KS99 / math.sqrt(200_000) * 1.5
