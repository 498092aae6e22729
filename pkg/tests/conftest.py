import math

import numpy as np
import pytest

import timebin as tb

TWO_PI = 2.0 * math.pi


def reference_config(**overrides) -> tb.PhysicalConfig:
    """Warm alkali-vapor reference point used throughout the suite."""
    kw = dict(
        wavelength=0.8e-6,
        optical_decay=TWO_PI * 3e6,
        rabi_drive=TWO_PI * 3e7,
        atom_density=1e18,
        medium_length=100e-6,
        pulse_duration=2e-9,
        velocity_ratio=0.3,
    )
    kw.update(overrides)
    return tb.PhysicalConfig(**kw)


@pytest.fixture(scope="session")
def rb_config():
    return reference_config()


@pytest.fixture(scope="session")
def rb_params(rb_config):
    return tb.derive_params(rb_config)


@pytest.fixture(scope="session")
def rb_frame(rb_params):
    return tb.nondimensionalize(rb_params)


@pytest.fixture(scope="session")
def rb_input(rb_frame):
    grid = tb.build_exit_grid(rb_frame)
    return tb.gaussian_envelope(grid, rb_frame.measure)


@pytest.fixture(scope="session")
def rb_exit(rb_input, rb_frame):
    return tb.state_at(rb_input, 1.0, rb_frame)


@pytest.fixture(scope="session")
def rb_split(rb_exit, rb_frame):
    return tb.split_modes(rb_exit, rb_frame)


@pytest.fixture(scope="session")
def fine_input(rb_frame):
    """Finer grid for the kernel-vs-integrator comparisons."""
    grid = tb.build_exit_grid(rb_frame, dt_target=0.0016)
    return tb.gaussian_envelope(grid, rb_frame.measure)


def vacuum_like(env: tb.Envelope) -> tb.Envelope:
    return env.with_values(np.zeros_like(env.values))
