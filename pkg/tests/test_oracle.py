import math

import numpy as np
import pytest

import timebin as tb
from conftest import vacuum_like


def rel_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


class TestIntegratorConfig:
    def test_defaults(self):
        cfg = tb.IntegratorConfig()
        assert cfg.n_z_steps == 400
        assert cfg.checkpoints == (1.0,)

    def test_too_few_steps_rejected(self):
        with pytest.raises(tb.ConfigurationError):
            tb.IntegratorConfig(n_z_steps=100)

    def test_checkpoints_must_ascend(self):
        with pytest.raises(tb.ConfigurationError):
            tb.IntegratorConfig(checkpoints=(0.5, 0.25))
        with pytest.raises(tb.ConfigurationError):
            tb.IntegratorConfig(checkpoints=())
        with pytest.raises(tb.ConfigurationError):
            tb.IntegratorConfig(checkpoints=(-0.5, 1.0))

    def test_oversized_step_rejected(self, rb_input):
        frame = tb.SimulationFrame(v1=0.1, v2=0.25, beta=15.0, measure=1000.0)
        vac = vacuum_like(rb_input)
        with pytest.raises(tb.ConfigurationError):
            tb.integrate(rb_input, vac, tb.IntegratorConfig(n_z_steps=200),
                         frame)


class TestIntegration:
    def test_no_coupling_is_pure_advection(self, rb_input, rb_frame):
        frame = tb.SimulationFrame(
            v1=rb_frame.v1, v2=rb_frame.v2, beta=0.0, measure=rb_frame.measure)
        vac = vacuum_like(rb_input)
        states = tb.integrate(rb_input, vac, tb.IntegratorConfig(), frame)
        expected = tb.shift(rb_input, 1.0 / frame.v1)
        # repeated resampling accumulates only spline-level error
        assert float(np.max(np.abs(
            states[-1].phi1.values - expected.values))) < 1e-6
        assert states[-1].n2 == 0.0

    def test_matches_kernel_route(self, fine_input, rb_frame):
        vac = vacuum_like(fine_input)
        states = tb.integrate(fine_input, vac, tb.IntegratorConfig(), rb_frame)
        reference = tb.state_at(fine_input, 1.0, rb_frame)
        assert rel_l2(states[-1].phi1.values, reference.phi1.values) < 1e-3
        assert rel_l2(states[-1].phi2.values, reference.phi2.values) < 1e-3

    def test_equal_velocity_matches_rotation(self):
        frame = tb.SimulationFrame(v1=0.2, v2=0.2, beta=2.0, measure=1000.0)
        grid = tb.TimeGrid(-6.0, 12.0, 2048)
        f1 = tb.gaussian_envelope(grid, frame.measure)
        vac = vacuum_like(f1)
        states = tb.integrate(f1, vac, tb.IntegratorConfig(n_z_steps=800),
                              frame)
        e1, e2 = tb.propagate_equal_velocity(f1, vac, 1.0, frame.beta, frame.v1)
        assert rel_l2(states[-1].phi1.values, e1.values) < 1e-5
        assert rel_l2(states[-1].phi2.values, e2.values) < 1e-5

    def test_linearity(self, rb_input, rb_frame):
        vac = vacuum_like(rb_input)
        cfg = tb.IntegratorConfig(n_z_steps=200)
        base = tb.integrate(rb_input, vac, cfg, rb_frame)[-1]
        scaled = tb.integrate(
            rb_input.with_values(0.5j * rb_input.values), vac, cfg,
            rb_frame)[-1]
        assert float(np.max(np.abs(
            scaled.phi1.values - 0.5j * base.phi1.values))) < 1e-12

    def test_norm_drift_small(self, rb_input, rb_frame):
        states = tb.integrate(rb_input, vacuum_like(rb_input),
                              tb.IntegratorConfig(), rb_frame)
        assert states[-1].residual < 1e-5

    def test_intermediate_checkpoints(self, rb_input, rb_frame):
        cfg = tb.IntegratorConfig(checkpoints=(0.25, 0.5, 1.0))
        states = tb.integrate(rb_input, vacuum_like(rb_input), cfg, rb_frame)
        assert [s.z for s in states] == [0.25, 0.5, 1.0]
        n2 = [s.n2 for s in states]
        assert n2[0] > 0.0

    def test_conservation_tolerance_enforced(self, rb_input, rb_frame):
        with pytest.raises(tb.NumericalCheckError) as err:
            tb.integrate(rb_input, vacuum_like(rb_input),
                         tb.IntegratorConfig(n_z_steps=200), rb_frame,
                         conservation_tol=1e-9)
        assert "residual" in err.value.diagnostics

    def test_support_exit_rejected(self, rb_frame):
        # grid too short for the slow channel transit
        grid = tb.TimeGrid(-6.0, 8.0, 1024)
        f1 = tb.gaussian_envelope(grid, rb_frame.measure)
        with pytest.raises(tb.DomainError):
            tb.integrate(f1, vacuum_like(f1), tb.IntegratorConfig(), rb_frame)


class TestConvergence:
    def test_second_order(self, fine_input, rb_frame):
        order = tb.convergence_order(
            fine_input, vacuum_like(fine_input), rb_frame)
        assert 1.7 < order < 2.5

    def test_error_shrinks_fourfold(self, fine_input, rb_frame):
        vac = vacuum_like(fine_input)
        reference = tb.state_at(fine_input, 1.0, rb_frame)
        gaps = []
        for n in (200, 400):
            states = tb.integrate(
                fine_input, vac, tb.IntegratorConfig(n_z_steps=n), rb_frame)
            gaps.append(rel_l2(states[-1].phi1.values,
                               reference.phi1.values))
        assert 3.4 < gaps[0] / gaps[1] < 4.6
