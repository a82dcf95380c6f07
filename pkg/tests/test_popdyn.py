"""Degree-correlated population dynamics against closed-form density evolution."""

import numpy as np
import pytest
from scipy.stats import binom

from bgmlab.channel import Bec, BpskAwgn
from bgmlab.popdyn import EdgeDegreeLaw, law_from_ensemble, popdyn_run, regular_law


def law_correlation(law):
    kv = law.var_degrees.astype(float)
    kc = law.chk_degrees.astype(float)
    ev = (law.q_v * kv).sum()
    ec = (law.q_c * kc).sum()
    cov = (law.joint * np.outer(kv - ev, kc - ec)).sum()
    sv = np.sqrt((law.q_v * (kv - ev) ** 2).sum())
    sc = np.sqrt((law.q_c * (kc - ec) ** 2).sum())
    return cov / (sv * sc)


class TestEdgeDegreeLaw:
    def test_conditionals_normalized(self):
        law = law_from_ensemble(256, 256, 0.03, r_star=-0.3, a=1.5)
        np.testing.assert_allclose(law.cond_c_given_v.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(law.cond_v_given_c.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(law.joint.sum(), 1.0, atol=1e-12)

    def test_node_law_divides_out_edge_weighting(self):
        law = EdgeDegreeLaw(
            var_degrees=np.array([2, 4]),
            chk_degrees=np.array([3]),
            joint=np.array([[0.5], [0.5]]),
        )
        # equal edge mass on degrees 2 and 4 means twice as many degree-2 nodes
        np.testing.assert_allclose(law.node_v, [2 / 3, 1 / 3], atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            EdgeDegreeLaw(np.array([2]), np.array([3]), np.ones((2, 1)))
        with pytest.raises(ValueError):
            EdgeDegreeLaw(np.array([2]), np.array([3]), np.zeros((1, 1)))
        with pytest.raises(ValueError):
            EdgeDegreeLaw(np.array([2]), np.array([3]), -np.ones((1, 1)))
        with pytest.raises(ValueError):
            EdgeDegreeLaw(np.array([0]), np.array([3]), np.ones((1, 1)))
        with pytest.raises(ValueError):
            EdgeDegreeLaw(
                np.array([2]), np.array([1]), np.ones((1, 1)), parity_attached=True
            )


class TestLawFromEnsemble:
    def test_neutral_exponent_gives_product_law(self):
        law = law_from_ensemble(128, 128, 0.05, r_star=0.0, a=0.0)
        np.testing.assert_allclose(
            law.joint, np.outer(law.q_v, law.q_c), atol=1e-12
        )
        assert abs(law_correlation(law)) < 1e-10

    def test_marginals_match_excess_weighted_binomials(self):
        k = m = 512
        rho = 0.02
        law = law_from_ensemble(k, m, rho, r_star=-0.4, a=2.0)
        support = np.arange(m + 1)
        pmf = binom.pmf(support, m, rho)
        keep = (pmf >= 1e-9) & (support >= 1)
        q_v = support[keep] * pmf[keep]
        q_v = q_v / q_v.sum()
        np.testing.assert_allclose(law.joint.sum(axis=1), q_v, atol=1e-6)
        # check side: plus one for the parity slot
        np.testing.assert_allclose(law.chk_degrees, support[keep] + 1)
        np.testing.assert_allclose(law.joint.sum(axis=0), q_v, atol=1e-6)

    def test_disassortative_constants_build_and_tilt_negative(self):
        # mean variable degree 10.24 at design rate one half
        law = law_from_ensemble(1024, 1024, 0.01, r_star=-0.5, a=2.6)
        assert law.parity_attached
        assert law_correlation(law) < -0.2

    def test_assortative_complement_tilts_positive(self):
        law = law_from_ensemble(1024, 1024, 0.01, r_star=0.5, a=2.6)
        assert law_correlation(law) > 0.0


class TestPopdynRun:
    def test_matches_erasure_density_evolution(self):
        # fresh variable-to-check erasure fraction per round against the
        # scalar recursion for the (3,6)-regular tree ensemble
        n = 100_000
        for eps in (0.42, 0.35):
            records = popdyn_run(
                Bec(eps), regular_law(3, 6), population=n, iterations=12, seed=3
            )
            x = 1.0
            for rec in records:
                x = eps * (1.0 - (1.0 - x) ** 5) ** 2
                tol = max(0.02 * x, 6.0 * np.sqrt(max(x, 1e-12) / n))
                assert abs(rec.edge_error_rate - x) <= tol

    def test_near_silent_channel_clears_in_one_round(self):
        records = popdyn_run(
            BpskAwgn(1e-3), regular_law(3, 6), population=2000, iterations=2, seed=0
        )
        assert records[0].error_rate == 0.0
        assert records[1].error_rate == 0.0

    def test_error_rate_nonincreasing_below_threshold(self):
        n = 100_000
        for eps in (0.42, 0.35):
            records = popdyn_run(
                Bec(eps), regular_law(3, 6), population=n, iterations=12, seed=3
            )
            errs = [r.error_rate for r in records]
            for before, after in zip(errs, errs[1:]):
                assert after - before < 3.0 / np.sqrt(n)

    def test_deterministic_per_seed(self):
        law = law_from_ensemble(64, 64, 0.06, r_star=-0.3, a=1.3)
        ch = BpskAwgn(0.9)
        a = popdyn_run(ch, law, population=3000, iterations=4, seed=11)
        b = popdyn_run(ch, law, population=3000, iterations=4, seed=11)
        assert a == b
        c = popdyn_run(ch, law, population=3000, iterations=4, seed=12)
        assert a != c

    def test_correlated_law_runs_and_improves(self):
        law = law_from_ensemble(256, 256, 0.04, r_star=-0.5, a=2.6)
        records = popdyn_run(
            BpskAwgn(0.75), law, population=20_000, iterations=8, seed=2
        )
        assert records[-1].error_rate < records[0].error_rate
        assert all(np.isfinite(r.llr_mean) and np.isfinite(r.llr_var) for r in records)

    def test_validation(self):
        with pytest.raises(ValueError):
            popdyn_run(Bec(0.4), regular_law(3, 6), population=0)
        with pytest.raises(ValueError):
            popdyn_run(Bec(0.4), regular_law(3, 6), iterations=-1)
