"""Blinking-mirror heterodyne statistics: determinism, moments, sweeps.

The decisive oracle is the closed-form Bernoulli-plus-Gaussian variance;
sampled variances must sit within three standard errors of it, with the
standard error computed from the exact fourth central moment rather than
from the samples themselves.
"""

import numpy as np
import pytest

from qdiode.mirror import (
    IQRecord,
    MirrorModel,
    analytic_iq_variance,
    iq_variance,
    simulate_mirror,
    spawn_seeds,
    sweep_row,
    variance_vs_power,
)


def variance_standard_error(p, a, sigma_w, n):
    """Exact standard error of the sample variance of I = a X + w."""
    bern = p * (1.0 - p)
    mu4 = (a ** 4 * bern * ((1.0 - p) ** 3 + p ** 3)
           + 6.0 * a ** 2 * bern * sigma_w ** 2 + 3.0 * sigma_w ** 4)
    var = a ** 2 * bern + sigma_w ** 2
    return np.sqrt((mu4 - var ** 2) / n)


# ----------------------------------------------------------------------------
#                      Determinism and trivial limits
# ----------------------------------------------------------------------------

class TestDeterminism:
    def test_same_seed_bit_identical(self):
        m = MirrorModel(p_dark=0.4, alpha=1.3 + 0.6j, sigma_w=0.2,
                        n_samples=5000, seed=42)
        r1 = simulate_mirror(m)
        r2 = simulate_mirror(m)
        np.testing.assert_array_equal(r1.i_samples, r2.i_samples)
        np.testing.assert_array_equal(r1.q_samples, r2.q_samples)

    def test_different_seeds_differ(self):
        kwargs = dict(p_dark=0.4, alpha=1.3, sigma_w=0.2, n_samples=5000)
        r1 = simulate_mirror(MirrorModel(seed=1, **kwargs))
        r2 = simulate_mirror(MirrorModel(seed=2, **kwargs))
        assert not np.array_equal(r1.i_samples, r2.i_samples)

    def test_record_length(self):
        m = MirrorModel(p_dark=0.5, alpha=1.0, sigma_w=0.1,
                        n_samples=317, seed=0)
        r = simulate_mirror(m)
        assert r.i_samples.size == 317
        assert r.q_samples.size == 317

    def test_spawned_seeds_distinct_and_reproducible(self):
        seeds = spawn_seeds(123, 16)
        assert len(set(seeds)) == 16
        assert seeds == spawn_seeds(123, 16)
        assert seeds != spawn_seeds(124, 16)


class TestTrivialLimits:
    def test_never_reflecting_no_noise_is_silent(self):
        m = MirrorModel(p_dark=0.0, alpha=2.0 + 1.0j, sigma_w=0.0,
                        n_samples=1000, seed=5)
        r = simulate_mirror(m)
        np.testing.assert_array_equal(r.i_samples, np.zeros(1000))
        np.testing.assert_array_equal(r.q_samples, np.zeros(1000))

    def test_always_reflecting_no_noise_is_constant(self):
        m = MirrorModel(p_dark=1.0, alpha=2.0 + 1.0j, sigma_w=0.0,
                        n_samples=1000, seed=5)
        r = simulate_mirror(m)
        np.testing.assert_array_equal(r.i_samples, np.full(1000, 2.0))
        np.testing.assert_array_equal(r.q_samples, np.full(1000, 1.0))

    def test_noise_free_samples_are_two_valued(self):
        m = MirrorModel(p_dark=0.5, alpha=1.7, sigma_w=0.0,
                        n_samples=4000, seed=9)
        r = simulate_mirror(m)
        values = np.unique(r.i_samples)
        np.testing.assert_array_equal(values, [0.0, 1.7])

    def test_pure_noise_variance(self):
        m = MirrorModel(p_dark=0.0, alpha=3.0, sigma_w=0.5,
                        n_samples=2 ** 16, seed=11)
        vi, vq = iq_variance(simulate_mirror(m))
        se = 0.25 * np.sqrt(2.0 / (2 ** 16 - 1))
        assert abs(vi - 0.25) < 3.0 * se
        assert abs(vq - 0.25) < 3.0 * se


# ----------------------------------------------------------------------------
#                       Variance against the closed form
# ----------------------------------------------------------------------------

class TestVarianceOracle:
    def test_in_phase_variance(self):
        p, a, sw, n = 0.37, 2.2, 0.3, 2 ** 18
        m = MirrorModel(p_dark=p, alpha=a, sigma_w=sw, n_samples=n, seed=77)
        vi, _ = iq_variance(simulate_mirror(m))
        expected, _ = analytic_iq_variance(p, a, sw)
        assert abs(vi - expected) < 3.0 * variance_standard_error(p, a, sw, n)

    def test_quadrature_split_for_complex_amplitude(self):
        p, sw, n = 0.5, 0.1, 2 ** 18
        alpha = 1.5 + 0.4j
        m = MirrorModel(p_dark=p, alpha=alpha, sigma_w=sw, n_samples=n, seed=3)
        vi, vq = iq_variance(simulate_mirror(m))
        ei, eq = analytic_iq_variance(p, alpha, sw)
        assert abs(vi - ei) < 3.0 * variance_standard_error(p, 1.5, sw, n)
        assert abs(vq - eq) < 3.0 * variance_standard_error(p, 0.4, sw, n)

    def test_analytic_closed_form(self):
        vi, vq = analytic_iq_variance(0.25, 2.0 + 1.0j, 0.3)
        np.testing.assert_allclose(vi, 4.0 * 0.25 * 0.75 + 0.09)
        np.testing.assert_allclose(vq, 1.0 * 0.25 * 0.75 + 0.09)

    def test_variance_peaks_at_half_occupation(self):
        rows = [analytic_iq_variance(p, 1.0, 0.0)[0]
                for p in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert np.argmax(rows) == 2


class TestDwellMode:
    def test_marginal_occupation_preserved(self):
        p, n, dwell = 0.3, 2 ** 18, 25.0
        m = MirrorModel(p_dark=p, alpha=1.0, sigma_w=0.0, n_samples=n,
                        seed=21, dwell_samples=dwell)
        r = simulate_mirror(m)
        occupation = np.mean(r.i_samples)
        # Correlated samples inflate the standard error by roughly the
        # square root of twice the dwell time.
        se = np.sqrt(p * (1.0 - p) / n) * np.sqrt(2.0 * dwell)
        assert abs(occupation - p) < 4.0 * se

    def test_dwell_correlates_consecutive_samples(self):
        kwargs = dict(p_dark=0.5, alpha=1.0, sigma_w=0.0, n_samples=2 ** 16,
                      seed=33)
        iid = simulate_mirror(MirrorModel(dwell_samples=0.0, **kwargs)).i_samples
        slow = simulate_mirror(MirrorModel(dwell_samples=50.0, **kwargs)).i_samples

        def lag_one(x):
            d = x - x.mean()
            return np.mean(d[1:] * d[:-1]) / np.mean(d * d)

        assert abs(lag_one(iid)) < 0.02
        assert lag_one(slow) > 0.9

    def test_dwell_variance_matches_analytic(self):
        p, a, n = 0.4, 1.8, 2 ** 18
        m = MirrorModel(p_dark=p, alpha=a, sigma_w=0.0, n_samples=n,
                        seed=55, dwell_samples=10.0)
        vi, _ = iq_variance(simulate_mirror(m))
        expected, _ = analytic_iq_variance(p, a, 0.0)
        se = variance_standard_error(p, a, 0.0, n) * np.sqrt(2.0 * 10.0)
        assert abs(vi - expected) < 4.0 * se


# ----------------------------------------------------------------------------
#                         Power sweeps and validation
# ----------------------------------------------------------------------------

class TestVarianceVsPower:
    def test_slope_and_flat_quadrature(self):
        p_fwd, p_rev, sw = 0.6, 0.05, 0.05
        powers = np.linspace(0.5, 4.0, 6)
        rows = variance_vs_power(p_fwd, p_rev, powers, sigma_w=sw, seed=101,
                                 n_samples=2 ** 16)
        slope_fwd = np.polyfit(powers, [r.var_i_fwd for r in rows], 1)[0]
        slope_rev = np.polyfit(powers, [r.var_i_rev for r in rows], 1)[0]
        np.testing.assert_allclose(slope_fwd, p_fwd * (1.0 - p_fwd), rtol=0.10)
        np.testing.assert_allclose(slope_rev, p_rev * (1.0 - p_rev), rtol=0.10)
        assert slope_fwd > slope_rev
        # alpha is real, so the out-of-phase quadrature stays at the floor.
        se_q = sw ** 2 * np.sqrt(2.0 / (2 ** 16 - 1))
        for r in rows:
            assert abs(r.var_q_fwd - sw ** 2) < 4.0 * se_q
            assert abs(r.var_q_rev - sw ** 2) < 4.0 * se_q

    def test_rows_carry_analytic_reference(self):
        rows = variance_vs_power(0.5, 0.1, [1.0, 2.0], sigma_w=0.2, seed=7,
                                 n_samples=256)
        for r in rows:
            np.testing.assert_allclose(
                r.var_i_fwd_analytic,
                analytic_iq_variance(0.5, np.sqrt(r.power), 0.2)[0])

    def test_sweep_is_order_independent(self):
        # Child streams are spawned per point, so a single matching point
        # computed via sweep_row with the same child seeds reproduces the
        # sweep's row exactly.
        powers = [1.0, 3.0]
        rows = variance_vs_power(0.4, 0.1, powers, sigma_w=0.1, seed=88,
                                 n_samples=4096)
        seeds = spawn_seeds(88, 4)
        alone = sweep_row(3.0, 0.4, 0.1, 0.1, 4096, seeds[2], seeds[3])
        np.testing.assert_array_equal(rows[1].var_i_fwd, alone.var_i_fwd)
        np.testing.assert_array_equal(rows[1].var_i_rev, alone.var_i_rev)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            variance_vs_power(0.5, 0.1, [-1.0, 1.0], sigma_w=0.1, seed=1,
                              n_samples=16)


class TestValidation:
    @pytest.mark.parametrize("bad", [-0.1, 1.1])
    def test_occupation_out_of_range(self, bad):
        with pytest.raises(ValueError, match="p_dark"):
            MirrorModel(p_dark=bad, alpha=1.0, sigma_w=0.1, n_samples=10,
                        seed=0)

    def test_negative_noise_rejected(self):
        with pytest.raises(ValueError, match="sigma_w"):
            MirrorModel(p_dark=0.5, alpha=1.0, sigma_w=-0.1, n_samples=10,
                        seed=0)

    def test_empty_record_rejected(self):
        with pytest.raises(ValueError, match="n_samples"):
            MirrorModel(p_dark=0.5, alpha=1.0, sigma_w=0.1, n_samples=0,
                        seed=0)

    def test_negative_dwell_rejected(self):
        with pytest.raises(ValueError, match="dwell"):
            MirrorModel(p_dark=0.5, alpha=1.0, sigma_w=0.1, n_samples=10,
                        seed=0, dwell_samples=-1.0)

    def test_variance_needs_two_samples(self):
        r = IQRecord(i_samples=np.array([1.0]), q_samples=np.array([1.0]))
        with pytest.raises(ValueError, match="two samples"):
            iq_variance(r)
