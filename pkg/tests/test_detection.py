"""Tests for the energy-detection probability layer.

The average-Pd series is checked against direct numerical integration of
the conditional detection probability over the SNR density (an
independent scipy route), against closed forms where they exist, and for
the documented diagnostics and failure modes.
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from specsense.detection import (
    DetectorConfig,
    RocCurve,
    SeriesControl,
    average_pd,
    average_pd_detail,
    average_pd_direct,
    average_pd_quadrature,
    collaborative_pd,
    collaborative_pfa,
    pd_awgn,
    pfa,
    roc_curve,
    sls_average_pd,
    sls_pfa,
    threshold_for_pfa,
    truncation_bound,
)
from specsense.fading import FadingParams
from specsense.special_fn import ConvergenceError, marcum_q

CH = FadingParams.from_db(2.0, 3.0, 5.0)


class TestConfigTypes:
    def test_detector_config_validation(self):
        with pytest.raises(ValueError):
            DetectorConfig(u=0, threshold=1.0)
        with pytest.raises(ValueError):
            DetectorConfig(u=2.5, threshold=1.0)
        with pytest.raises(ValueError):
            DetectorConfig(u=2, threshold=-1.0)
        with pytest.raises(ValueError):
            DetectorConfig(u=2, threshold=1.0, noise_uncertainty_db=-0.1)

    def test_noise_uncertainty_factor(self):
        cfg = DetectorConfig(u=1, threshold=4.0, noise_uncertainty_db=3.0)
        assert math.isclose(cfg.alpha, 10.0 ** 0.3, rel_tol=1e-15)
        assert math.isclose(cfg.effective_threshold, 4.0 * 10.0 ** 0.6, rel_tol=1e-14)
        assert DetectorConfig(u=1, threshold=4.0).effective_threshold == 4.0

    def test_series_control_validation(self):
        with pytest.raises(ValueError):
            SeriesControl(rel_tol=0.0)
        with pytest.raises(ValueError):
            SeriesControl(max_terms=9)

    def test_roc_curve_validation(self):
        with pytest.raises(ValueError):
            RocCurve(points=((0.2, 0.5), (0.1, 0.6)), sweep="x")
        with pytest.raises(ValueError):
            RocCurve(points=((0.1, 1.5),), sweep="x")
        c = RocCurve(points=((0.1, 0.3), (0.2, 0.5)), sweep="two points")
        np.testing.assert_array_equal(c.pf, [0.1, 0.2])
        np.testing.assert_array_equal(c.pd, [0.3, 0.5])


class TestFalseAlarm:
    def test_closed_forms(self):
        # u = 1: Pf = exp(-lam/2); u = 2: Pf = (1 + lam/2) exp(-lam/2)
        lam = 7.779440339734858
        assert math.isclose(pfa(DetectorConfig(u=2, threshold=lam)), 0.1, rel_tol=1e-12)
        assert math.isclose(
            pfa(DetectorConfig(u=2, threshold=lam)),
            (1.0 + lam / 2.0) * math.exp(-lam / 2.0),
            rel_tol=1e-13,
        )
        assert pfa(DetectorConfig(u=3, threshold=0.0)) == 1.0
        for lam in (0.5, 4.0, 11.0):
            assert math.isclose(
                pfa(DetectorConfig(u=1, threshold=lam)), math.exp(-lam / 2.0), rel_tol=1e-13
            )

    def test_pfa_ignores_noise_uncertainty(self):
        # the nominal threshold sets the false-alarm rate
        a = pfa(DetectorConfig(u=2, threshold=6.0, noise_uncertainty_db=2.0))
        b = pfa(DetectorConfig(u=2, threshold=6.0))
        assert a == b


class TestThresholdInversion:
    def test_frozen_anchors(self):
        # the solver promises |pfa(lam) - target| <= 1e-12, so lam itself
        # is pinned only up to the local slope of the tail function
        for (u, target), want in (
            ((1, 0.1), 4.6051701859880913),
            ((2, 0.1), 7.779440339734858),
            ((3, 0.1), 10.64464067566842),
            ((2, 0.01), 13.276704135987624),
            ((3, 1e-4), 27.856341236013917),
        ):
            assert math.isclose(threshold_for_pfa(u, target), want, rel_tol=1e-9)

    def test_exponential_case_closed_form(self):
        # at u = 1 the exact inverse is -2 ln(target); the solver's
        # 1e-12 pfa tolerance translates to a lambda window of 2e-12/target
        for p in (0.3, 0.05, 1e-6):
            got = threshold_for_pfa(1, p)
            assert abs(got - (-2.0 * math.log(p))) <= 2.1e-12 / p
            assert abs(math.exp(-got / 2.0) - p) <= 1e-12

    def test_round_trips(self):
        for u in (1, 2, 3, 4, 5):
            for target in (0.9, 0.5, 0.1, 1e-3, 1e-8):
                lam = threshold_for_pfa(u, target)
                assert abs(pfa(DetectorConfig(u=u, threshold=lam)) - target) <= 1e-12

    def test_rejects_bad_targets(self):
        with pytest.raises(ValueError):
            threshold_for_pfa(2, 0.0)
        with pytest.raises(ValueError):
            threshold_for_pfa(2, 1.0)
        with pytest.raises(ValueError):
            threshold_for_pfa(0, 0.1)


class TestAwgnDetection:
    def test_boundary_cases(self):
        cfg = DetectorConfig(u=2, threshold=6.0)
        assert pd_awgn(cfg, 0.0) == pfa(cfg)
        assert pd_awgn(DetectorConfig(u=2, threshold=0.0), 1.3) == 1.0

    def test_equals_marcum(self):
        got = pd_awgn(DetectorConfig(u=1, threshold=0.5), 2.0)
        assert got == marcum_q(1, 2.0, math.sqrt(0.5))

    def test_against_noncentral_chi_square(self):
        # statistic ~ noncentral chi-square, 2u dof, noncentrality 2 gamma
        for u in (1, 2, 4):
            for gamma in (0.3, 2.0, 9.0):
                for lam in (1.0, 6.5, 20.0):
                    cfg = DetectorConfig(u=u, threshold=lam)
                    want = stats.ncx2.sf(lam, 2 * u, 2.0 * gamma)
                    assert math.isclose(pd_awgn(cfg, gamma), want, rel_tol=1e-10)

    def test_noise_uncertainty_degrades_detection(self):
        lam = threshold_for_pfa(2, 0.1)
        clean = pd_awgn(DetectorConfig(u=2, threshold=lam), 3.0)
        rough = pd_awgn(DetectorConfig(u=2, threshold=lam, noise_uncertainty_db=2.0), 3.0)
        assert rough < clean


class TestAveragePd:
    def test_zero_threshold(self):
        assert average_pd(DetectorConfig(u=2, threshold=0.0), CH) == 1.0

    def test_noise_uncertainty_folds_into_threshold(self):
        cfg_a = DetectorConfig(u=2, threshold=10.0, noise_uncertainty_db=1.0)
        cfg_b = DetectorConfig(u=2, threshold=cfg_a.effective_threshold)
        assert average_pd(cfg_a, CH) == average_pd(cfg_b, CH)

    def test_against_quadrature(self):
        for u, p, lam in (
            (1, FadingParams(m=1.0, m_s=1.1, mean_snr=2.0), 4.0),
            (2, FadingParams(m=3.5, m_s=4.3, mean_snr=5.0), 10.0),
            (3, FadingParams(m=0.7, m_s=2.0, mean_snr=0.5), 15.0),
            (2, FadingParams(m=20.0, m_s=30.0, mean_snr=1.0), 7.0),
        ):
            cfg = DetectorConfig(u=u, threshold=lam)
            assert abs(average_pd(cfg, p) - average_pd_quadrature(cfg, p)) < 1e-8

    def test_detail_diagnostics(self):
        pd_val, used, last = average_pd_detail(DetectorConfig(u=2, threshold=7.0), CH)
        assert pd_val == average_pd(DetectorConfig(u=2, threshold=7.0), CH)
        assert 10 <= used <= 200
        assert 0.0 <= last < 1e-10

    def test_truncation_failure_raises(self):
        with pytest.raises(ConvergenceError):
            average_pd(DetectorConfig(u=2, threshold=60.0), CH, SeriesControl(max_terms=10))

    def test_bounded(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            p = FadingParams(
                m=float(rng.uniform(0.5, 15.0)),
                m_s=float(rng.uniform(1.05, 25.0)),
                mean_snr=float(10.0 ** rng.uniform(-1.0, 1.5)),
            )
            cfg = DetectorConfig(u=int(rng.integers(1, 4)), threshold=float(rng.uniform(0.1, 40.0)))
            val = average_pd(cfg, p)
            assert 0.0 <= val <= 1.0


class TestPartialSums:
    def test_direct_series_is_monotone_from_below(self):
        cfg = DetectorConfig(u=2, threshold=8.0)
        p = FadingParams(m=2.0, m_s=6.0, mean_snr=2.0)
        full = average_pd(cfg, p)
        partial = [average_pd_direct(cfg, p, n) for n in (5, 10, 20, 40, 80)]
        assert all(b >= a for a, b in zip(partial, partial[1:]))
        assert all(v <= full + 1e-12 for v in partial)
        assert full - partial[-1] < 1e-3

    def test_truncation_bound_dominates_remainder(self):
        cfg = DetectorConfig(u=2, threshold=8.0)
        p = FadingParams(m=2.0, m_s=6.0, mean_snr=2.0)
        full = average_pd(cfg, p)
        bounds = []
        for t0 in (5, 10, 20, 40, 80):
            realized = full - average_pd_direct(cfg, p, t0)
            bound = truncation_bound(cfg, p, t0)
            assert bound >= realized - 1e-14
            bounds.append(bound)
        assert all(b <= a for a, b in zip(bounds, bounds[1:]))

    def test_closed_form_bound_is_infinite(self):
        # the hypergeometric 1F0 majorant diverges, so the closed-form
        # variant reports an unusable (infinite) bound by design
        assert truncation_bound(DetectorConfig(u=1, threshold=5.0), CH, 10, closed_form=True) == math.inf
        assert math.isfinite(truncation_bound(DetectorConfig(u=1, threshold=5.0), CH, 10))

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            average_pd_direct(DetectorConfig(u=1, threshold=5.0), CH, 0)
        with pytest.raises(ValueError):
            truncation_bound(DetectorConfig(u=1, threshold=5.0), CH, 0)
        with pytest.raises(ValueError):
            truncation_bound(DetectorConfig(u=1, threshold=5.0), CH, 10, n_cap=5)


class TestFusionRules:
    def test_or_and_closed_forms(self):
        assert collaborative_pd(0.5, 2, "or") == 0.75
        assert collaborative_pd(0.5, 2, "and") == 0.25
        assert collaborative_pd(0.37, 1, "or") == 0.37
        assert math.isclose(collaborative_pfa(0.1, 4, "or"), 1.0 - 0.9 ** 4, rel_tol=1e-15)
        assert math.isclose(collaborative_pfa(0.1, 4, "and"), 1e-4, rel_tol=1e-12)

    def test_or_dominates_and(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            p = float(rng.uniform(0.0, 1.0))
            n = int(rng.integers(1, 9))
            assert collaborative_pd(p, n, "or") >= collaborative_pd(p, n, "and")

    def test_validation(self):
        with pytest.raises(ValueError):
            collaborative_pd(1.2, 2, "or")
        with pytest.raises(ValueError):
            collaborative_pd(0.5, 0, "or")
        with pytest.raises(ValueError):
            collaborative_pd(0.5, 2, "xor")


class TestSquareLawSelection:
    def test_single_branch_reduces_to_plain(self):
        cfg = DetectorConfig(u=2, threshold=7.0)
        assert sls_pfa(2, 7.0, 1) == pfa(cfg)
        assert sls_average_pd(cfg, [CH]) == average_pd(cfg, CH)

    def test_false_alarm_closed_form(self):
        # branch Pf = exp(-lam/2) at u = 1; two branches: 1 - (1 - Pf)^2
        lam = 2.0 * math.log(10.0)
        assert math.isclose(sls_pfa(1, lam, 2), 1.0 - 0.81, rel_tol=1e-12)

    def test_identical_branches_identity(self):
        cfg = DetectorConfig(u=2, threshold=7.0)
        one = average_pd(cfg, CH)
        two = sls_average_pd(cfg, [CH, CH])
        assert math.isclose(two, 1.0 - (1.0 - one) ** 2, rel_tol=1e-12)

    def test_more_branches_help(self):
        cfg = DetectorConfig(u=2, threshold=9.0)
        vals = [sls_average_pd(cfg, [CH] * n) for n in (1, 2, 4)]
        assert vals[0] < vals[1] < vals[2]
        assert sls_pfa(2, 9.0, 1) < sls_pfa(2, 9.0, 2) < sls_pfa(2, 9.0, 4)

    def test_validation(self):
        with pytest.raises(ValueError):
            sls_pfa(2, 7.0, 0)
        with pytest.raises(ValueError):
            sls_average_pd(DetectorConfig(u=2, threshold=7.0), [])


class TestRocCurve:
    def test_zero_snr_is_chance_line(self):
        grid = np.geomspace(1e-4, 0.99, 30)
        curve = roc_curve(0.0, DetectorConfig(u=2, threshold=1.0), pf_grid=grid)
        assert float(np.max(np.abs(curve.pd - curve.pf))) < 1e-11

    def test_detection_beats_chance_under_fading(self):
        grid = np.geomspace(1e-3, 0.99, 25)
        curve = roc_curve(CH, DetectorConfig(u=2, threshold=1.0), pf_grid=grid)
        assert np.all(curve.pd >= curve.pf)
        assert curve.meta["kind"] == "fading"
        assert curve.meta["channel"] == (CH.m, CH.m_s, CH.mean_snr)

    def test_rayleigh_overlay_against_exponential_quadrature(self):
        # m = 1 with very large m_s approximates Rayleigh fading, whose
        # average Pd is an exponential-weighted integral we can do directly
        u = 2
        ch = FadingParams(m=1.0, m_s=1e4, mean_snr=10.0 ** 0.5)
        grid = np.geomspace(1e-3, 0.9, 8)
        curve = roc_curve(ch, DetectorConfig(u=u, threshold=1.0), pf_grid=grid)
        for pf_i, pd_i in curve.points:
            lam = threshold_for_pfa(u, pf_i)
            want, _ = integrate.quad(
                lambda g: stats.ncx2.sf(lam, 2 * u, 2.0 * g) * math.exp(-g / ch.mean_snr) / ch.mean_snr,
                0.0,
                np.inf,
                limit=300,
            )
            assert abs(pd_i - want) < 1e-3

    def test_default_grid(self):
        curve = roc_curve(1.0, DetectorConfig(u=1, threshold=1.0))
        assert len(curve.points) == 200
        assert curve.pf[0] == pytest.approx(1e-4)
        assert curve.pf[-1] == pytest.approx(0.999)

    def test_fusion_path_matches_manual_composition(self):
        grid = np.array([0.05, 0.2, 0.6])
        n = 4
        curve = roc_curve(CH, DetectorConfig(u=2, threshold=1.0), pf_grid=grid, fusion="or", n_users=n)
        for pf_i, pd_i in curve.points:
            unit_pf = 1.0 - (1.0 - pf_i) ** (1.0 / n)
            lam = threshold_for_pfa(2, unit_pf)
            unit_pd = average_pd(DetectorConfig(u=2, threshold=lam), CH)
            assert math.isclose(pd_i, 1.0 - (1.0 - unit_pd) ** n, rel_tol=1e-10)

    def test_sls_points_recover_target_false_alarm(self):
        curve = roc_curve([CH, CH], DetectorConfig(u=2, threshold=1.0), pf_grid=np.array([0.1, 0.5]))
        assert curve.meta["kind"] == "sls"
        for pf_i, pd_i in curve.points:
            unit = 1.0 - (1.0 - pf_i) ** 0.5
            lam = threshold_for_pfa(2, unit)
            assert abs(sls_pfa(2, lam, 2) - pf_i) < 1e-10
            assert pd_i == sls_average_pd(DetectorConfig(u=2, threshold=lam), [CH, CH])

    def test_validation(self):
        cfg = DetectorConfig(u=2, threshold=1.0)
        with pytest.raises(ValueError):
            roc_curve(CH, cfg, pf_grid=np.array([0.5, 0.1]))
        with pytest.raises(ValueError):
            roc_curve(CH, cfg, pf_grid=np.array([0.0, 0.5]))
        with pytest.raises(ValueError):
            roc_curve(CH, cfg, pf_grid=np.array([0.1, 0.5]), fusion="majority")
        with pytest.raises(ValueError):
            roc_curve([CH, CH], cfg, pf_grid=np.array([0.1, 0.5]), fusion="or")
        with pytest.raises(ValueError):
            roc_curve(-1.0, cfg, pf_grid=np.array([0.1, 0.5]))
        with pytest.raises(ValueError):
            roc_curve([], cfg, pf_grid=np.array([0.1, 0.5]))
