import numpy as np
import pytest

from chiralqed import (
    ASYMPTOTIC_UNIT,
    NegativeRate,
    PoleHit,
    RAW,
    g2,
    psi2_closed,
    psi2_numeric,
    resonant_transmission,
    t_matrix,
)

# pinned on-shell symmetric-point values, T(2w, 0, 2w, 0) = -2i g^2/(pi^2 gt^3),
# from direct substitution into the rational form
T_PINNED = {
    (0.5, 0.5): -0.05066059182116889j,
    (0.3, 0.9): -0.01055428996274352j,
}


class TestTMatrix:
    def test_vanishes_without_channel_coupling(self):
        assert t_matrix(1.0, 0.3, 2.0, 0.1, 0.0, 1.0) == 0.0

    def test_pinned_symmetric_point(self):
        for (gamma, gp), expected in T_PINNED.items():
            got = t_matrix(0.0, 0.0, 0.0, 0.0, gamma, gp, omega_eg=0.0)
            assert abs(got - expected) < 1e-15
            # omega shift cancels when the total energy is on-shell
            shifted = t_matrix(2 * 7.0, 0.0, 2 * 7.0, 0.0, gamma, gp, omega_eg=7.0)
            assert abs(shifted - expected) < 1e-15

    def test_large_momentum_decay(self):
        base = abs(t_matrix(0.0, 0.0, 0.0, 0.0, 0.5, 0.5))
        far = abs(t_matrix(0.0, 1e4, 0.0, 0.0, 0.5, 0.5))
        assert far < 1e-7 * base

    def test_pole_hit_at_zero_width(self):
        with pytest.raises((PoleHit, ValueError)):
            t_matrix(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def test_negative_rates_rejected(self):
        with pytest.raises(NegativeRate):
            t_matrix(0.0, 0.0, 0.0, 0.0, -0.1, 0.5)


class TestPsi2Closed:
    def test_large_separation_asymptote(self):
        gamma, gp = 0.3, 0.9
        t = resonant_transmission(gamma, gp)
        got = psi2_closed(1e3, gamma, gp, omega_eg=2.0, center_of_mass=0.4)
        expected = (t**2 / np.pi) * np.exp(2j * 2.0 * 0.4)
        assert abs(got - expected) < 1e-15

    def test_zero_separation_full_reflection(self):
        # gamma' = 0, gamma_tot = 1: pi * psi2(0) = 1 - 4 = -3
        got = psi2_closed(0.0, 1.0, 0.0)
        assert np.pi * got == pytest.approx(-3.0)

    def test_threshold_wavefunction_survives(self):
        # at the transmission zero the exponential piece remains
        gamma = 0.5
        r = 0.8
        got = psi2_closed(r, gamma, gamma)
        expected = -(4 * gamma**2 / np.pi) * np.exp(-abs(r))
        assert abs(got - expected) < 1e-15
        assert got != 0.0

    def test_even_in_r(self):
        vals_plus = psi2_closed(np.linspace(0, 5, 11), 0.3, 0.9)
        vals_minus = psi2_closed(-np.linspace(0, 5, 11), 0.3, 0.9)
        assert np.abs(vals_plus - vals_minus).max() == 0.0


class TestPsi2Numeric:
    def test_matches_closed_form(self):
        for gamma in (0.1, 0.5, 1.0):
            gp = 1.0 - gamma if gamma < 1 else 0.0
            for r in (0.0, 0.4, 2.0, 10.0):
                a = psi2_numeric(r, gamma, gp)
                b = psi2_closed(r, gamma, gp)
                assert abs(a - b) < 1e-6

    def test_free_limit(self):
        # gamma = 0: only the delta terms survive
        got = psi2_numeric(1.3, 0.0, 1.0)
        assert abs(got - 1.0 / np.pi) < 1e-12

    def test_threshold_pure_exponential(self):
        gamma = 0.5
        got = psi2_numeric(0.7, gamma, gamma)
        expected = -(4 * gamma**2 / np.pi) * np.exp(-0.7)
        assert abs(got - expected) < 1e-8


class TestG2:
    def test_divergence_sentinel_on_ridge(self):
        corr = g2(np.linspace(0, 5, 21), 0.5, 0.5)
        assert corr.divergent
        assert np.all(np.isinf(corr.g2_values))
        # the numerator channel stays finite for heatmap rendering
        assert np.all(np.isfinite(corr.psi2_values))

    def test_sentinel_fires_only_on_ridge(self):
        assert not g2([0.0], 0.5 + 1e-6, 0.5 - 1e-6).divergent
        assert g2([0.0], 0.5 + 1e-14, 0.5 - 1e-14).divergent

    def test_zero_delay_value_lossless(self):
        # gamma' = 0: g2(0) = (1 - 4)^2 = 9 under asymptotic-unit scaling
        corr = g2([0.0], 1.0, 0.0, normalization=ASYMPTOTIC_UNIT)
        assert corr.g2_values[0] == pytest.approx(9.0, abs=1e-9)

    def test_zero_delay_closed_form_across_ratios(self):
        for ratio in (0.1, 0.3, 0.45, 0.7, 0.9):
            gamma, gp = ratio, 1.0 - ratio
            corr = g2([0.0], gamma, gp)
            expected = (1.0 - 4.0 * gamma**2 / (gp - gamma) ** 2) ** 2
            assert corr.g2_values[0] == pytest.approx(expected, rel=1e-12)

    def test_symmetry_in_delay(self):
        taus = np.linspace(0.1, 20.0, 40)
        plus = g2(taus, 0.3, 0.9).g2_values
        minus = g2(-taus, 0.3, 0.9).g2_values
        assert np.abs(plus - minus).max() < 1e-12

    def test_asymptotic_unit_limit(self):
        corr = g2([50.0], 0.3, 0.7, normalization=ASYMPTOTIC_UNIT)
        assert abs(corr.g2_values[0] - 1.0) < 1e-6

    def test_raw_asymptote_is_one_over_pi_squared(self):
        corr = g2([50.0], 0.3, 0.7, normalization=RAW)
        assert abs(corr.g2_values[0] - 1.0 / np.pi**2) < 1e-6

    def test_normalizations_differ_by_pi_squared(self):
        taus = np.linspace(0.0, 5.0, 11)
        raw = g2(taus, 0.2, 0.8, normalization=RAW)
        unit = g2(taus, 0.2, 0.8, normalization=ASYMPTOTIC_UNIT)
        assert np.abs(unit.g2_values - np.pi**2 * raw.g2_values).max() < 1e-12

    def test_monotone_envelope_at_late_delay(self):
        taus = np.linspace(5.0, 25.0, 200)
        corr = g2(taus, 0.2, 0.8)
        deviation = np.abs(corr.g2_values - 1.0)
        assert np.all(np.diff(deviation) <= 0)

    def test_free_emitter_flat(self):
        corr = g2(np.linspace(0, 10, 21), 0.0, 1.0)
        assert np.abs(corr.g2_values - 1.0).max() < 1e-12

    def test_rejects_unknown_normalization(self):
        with pytest.raises(ValueError):
            g2([0.0], 0.2, 0.8, normalization="other")

    def test_rejects_nonfinite_grid(self):
        with pytest.raises(ValueError):
            g2([np.inf], 0.2, 0.8)
