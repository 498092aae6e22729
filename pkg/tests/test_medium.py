import math

import pytest

import timebin as tb
from conftest import TWO_PI, reference_config


class TestPhysicalConfig:
    def test_ratio_from_velocity_ratio(self):
        assert reference_config().ratio == 0.3

    def test_ratio_from_couplings(self):
        g2 = TWO_PI * 1e9
        cfg = reference_config(
            velocity_ratio=None, coupling_g1=2.0 * g2, coupling_g2=g2)
        assert math.isclose(cfg.ratio, 0.25, rel_tol=1e-15)

    def test_both_forms_rejected(self):
        with pytest.raises(tb.ConfigurationError):
            reference_config(coupling_g1=1e9, coupling_g2=1e9)

    def test_neither_form_rejected(self):
        with pytest.raises(tb.ConfigurationError):
            reference_config(velocity_ratio=None)

    def test_partial_couplings_rejected(self):
        with pytest.raises(tb.ConfigurationError):
            reference_config(velocity_ratio=None, coupling_g1=1e9)

    @pytest.mark.parametrize("ratio", [0.0, -0.5, 1.2])
    def test_ratio_out_of_range(self, ratio):
        with pytest.raises(tb.ConfigurationError):
            reference_config(velocity_ratio=ratio)

    def test_swapped_couplings_rejected(self):
        # channel 1 must be the slower, i.e. the more strongly coupled one
        with pytest.raises(tb.ConfigurationError):
            reference_config(
                velocity_ratio=None, coupling_g1=1e9, coupling_g2=2e9)

    @pytest.mark.parametrize("field", [
        "wavelength", "optical_decay", "rabi_drive", "atom_density",
        "medium_length", "pulse_duration"])
    def test_nonpositive_scalar_rejected(self, field):
        with pytest.raises(tb.ConfigurationError):
            reference_config(**{field: 0.0})

    def test_with_drive(self, rb_config):
        doubled = rb_config.with_drive(2.0 * rb_config.rabi_drive)
        assert doubled.rabi_drive == 2.0 * rb_config.rabi_drive
        assert doubled.atom_density == rb_config.atom_density


class TestDeriveParams:
    def test_reference_values(self, rb_params):
        p = rb_params
        assert math.isclose(p.cross_section, 1.5278874536821951e-13, rel_tol=1e-12)
        assert math.isclose(p.optical_depth, 15.278874536821951, rel_tol=1e-12)
        assert math.isclose(p.v2, 12337.005501361702, rel_tol=1e-12)
        assert math.isclose(p.v1, 3701.1016504085105, rel_tol=1e-12)
        assert math.isclose(p.beta_l, 2.7895280790362262, rel_tol=1e-12)
        assert math.isclose(p.kappa1_l, 0.50929581789406508, rel_tol=1e-12)
        assert math.isclose(p.kappa2_l, 0.15278874536821951, rel_tol=1e-12)
        assert math.isclose(p.eit_window, 482231350.18603742, rel_tol=1e-12)
        assert math.isclose(p.measure, 5995.8491600000007, rel_tol=1e-12)

    def test_cross_section_formula(self, rb_config, rb_params):
        expected = 3.0 * rb_config.wavelength**2 / (4.0 * math.pi)
        assert math.isclose(rb_params.cross_section, expected, rel_tol=1e-15)

    def test_velocity_ratio_preserved(self, rb_params):
        assert math.isclose(rb_params.v1 / rb_params.v2, 0.3, rel_tol=1e-12)

    def test_absorption_identities(self, rb_config, rb_params):
        # kappa2 L = (decay/drive)^2 alpha, channel 1 scaled by 1/ratio
        gamma = rb_config.optical_decay
        omega = rb_config.rabi_drive
        base = gamma**2 * rb_params.optical_depth / omega**2
        assert math.isclose(rb_params.kappa2_l, base, rel_tol=1e-12)
        assert math.isclose(rb_params.kappa1_l, base / 0.3, rel_tol=1e-12)

    def test_coupling_velocity_identity(self, rb_config, rb_params):
        # beta = drive / sqrt(v1 v2)
        expected = rb_config.rabi_drive / math.sqrt(rb_params.v1 * rb_params.v2)
        assert math.isclose(rb_params.beta, expected, rel_tol=1e-12)

    def test_couplings_enter_through_ratio_only(self):
        by_ratio = tb.derive_params(reference_config(velocity_ratio=0.25))
        g2 = TWO_PI * 5e8
        by_pair = tb.derive_params(reference_config(
            velocity_ratio=None, coupling_g1=2.0 * g2, coupling_g2=g2))
        assert by_ratio == by_pair

    @pytest.mark.parametrize("scale", [0.5, 2.0, 7.0])
    def test_drive_scaling_law(self, rb_config, rb_params, scale):
        scaled = tb.derive_params(
            rb_config.with_drive(scale * rb_config.rabi_drive))
        assert math.isclose(scaled.v1, rb_params.v1 * scale**2, rel_tol=1e-12)
        assert math.isclose(scaled.v2, rb_params.v2 * scale**2, rel_tol=1e-12)
        assert math.isclose(scaled.beta, rb_params.beta / scale, rel_tol=1e-12)
        assert math.isclose(scaled.kappa1, rb_params.kappa1 / scale**2, rel_tol=1e-12)
        assert math.isclose(scaled.kappa2, rb_params.kappa2 / scale**2, rel_tol=1e-12)
        assert scaled.optical_depth == rb_params.optical_depth

    def test_dimensionless_velocity_is_transit_fraction(self, rb_config, rb_params):
        expected = rb_config.pulse_duration * rb_params.v1 / rb_config.medium_length
        assert math.isclose(rb_params.v1_sim, expected, rel_tol=1e-15)


class TestRegime:
    def test_reference_violations(self, rb_params):
        violations = tb.validate_regime(rb_params)
        names = [v.constraint for v in violations]
        assert names == [
            "v1_sim >= transit_margin / sqrt(optical_depth)",
            "v2_sim >= transit_margin / sqrt(optical_depth)",
            "kappa1_l <= absorption_max",
        ]
        by_name = {v.constraint: v for v in violations}
        kappa = by_name["kappa1_l <= absorption_max"]
        assert math.isclose(kappa.observed, 0.50929581789406508, rel_tol=1e-12)
        assert kappa.bound == 0.2

    def test_clean_config_passes(self):
        # strong drive, deep medium: every inequality holds
        length = 100e-6
        sigma = 3.0 * (0.8e-6) ** 2 / (4.0 * math.pi)
        cfg = reference_config(
            atom_density=400.0 / (sigma * length),
            rabi_drive=70.0 * TWO_PI * 3e6,
            pulse_duration=2.17e-9,
            velocity_ratio=0.5,
        )
        params = tb.derive_params(cfg)
        assert tb.validate_regime(params) == []

    def test_threshold_tightening_is_monotone(self, rb_params):
        loose = tb.RegimeThresholds(
            drive_margin=1.0, transit_margin=0.1, absorption_max=1.0)
        tight = tb.RegimeThresholds(
            drive_margin=20.0, transit_margin=5.0, absorption_max=0.05)
        loose_set = {v.constraint for v in tb.validate_regime(rb_params, loose)}
        tight_set = {v.constraint for v in tb.validate_regime(rb_params, tight)}
        assert loose_set <= tight_set

    def test_fast_transit_flagged(self):
        # pulse crossing the cell faster than its own duration
        cfg = reference_config(rabi_drive=TWO_PI * 3e6 * 40.0)
        params = tb.derive_params(cfg)
        names = {v.constraint for v in tb.validate_regime(params)}
        assert "v1_sim < 1" in names

    def test_violation_str_mentions_both_sides(self, rb_params):
        v = tb.validate_regime(rb_params)[0]
        text = str(v)
        assert "observed" in text and "bound" in text

    def test_bad_thresholds_rejected(self):
        with pytest.raises(tb.ConfigurationError):
            tb.RegimeThresholds(drive_margin=-1.0)


class TestFrame:
    def test_nondimensionalize_round_trip(self, rb_config, rb_params):
        frame = tb.nondimensionalize(rb_params)
        v1, v2, beta = tb.redimensionalize(frame, rb_config)
        assert math.isclose(v1, rb_params.v1, rel_tol=1e-12)
        assert math.isclose(v2, rb_params.v2, rel_tol=1e-12)
        assert math.isclose(beta, rb_params.beta, rel_tol=1e-12)

    def test_frame_fields(self, rb_params):
        frame = tb.nondimensionalize(rb_params)
        assert frame.v1 == rb_params.v1_sim
        assert frame.v2 == rb_params.v2_sim
        assert frame.beta == rb_params.beta_l
        assert frame.measure == rb_params.measure

    def test_delay_rate(self):
        frame = tb.SimulationFrame(v1=0.1, v2=0.25, beta=1.0, measure=10.0)
        assert math.isclose(frame.delay_rate, 6.0, rel_tol=1e-15)

    def test_invalid_frames_rejected(self):
        with pytest.raises(tb.ConfigurationError):
            tb.SimulationFrame(v1=0.3, v2=0.2, beta=1.0, measure=10.0)
        with pytest.raises(tb.ConfigurationError):
            tb.SimulationFrame(v1=0.1, v2=0.2, beta=-1.0, measure=10.0)
