"""Two-channel slow-light propagation and time-bin qubit analysis.

A single-photon pulse entering a driven medium splits between two slow
channels; interference between the surviving and regenerated parts
carves the exit envelope into two time bins, a photonic qubit.  The
package derives the propagation parameters from laboratory inputs,
propagates envelopes by exact Bessel-kernel quadrature (cross-checked
by an independent step integrator), splits and scores the exit state,
and evaluates the entropy, phase-space, and Bell measures of the bins.
"""

from .analysis import (
    BellScanResult,
    CalibrationResult,
    ModeSplit,
    OrthogonalityReport,
    ZScanResult,
    bell_combination,
    bell_diagonal,
    bell_scan,
    build_exit_grid,
    calibrate_omega,
    check_orthogonality,
    entanglement_entropy,
    exit_state,
    scan_z,
    split_modes,
    wigner,
)
from .errors import (
    CalibrationError,
    ConfigurationError,
    DomainError,
    NumericalCheckError,
    RegimeError,
)
from .kernel import (
    KernelQuadrature,
    TwoChannelState,
    bessel_j,
    phi1_time_slice,
    propagate_equal_velocity,
    propagate_phi1,
    propagate_phi2,
    state_at,
)
from .medium import (
    C_LIGHT,
    DerivedParams,
    PhysicalConfig,
    RegimeThresholds,
    RegimeViolation,
    SimulationFrame,
    derive_params,
    nondimensionalize,
    redimensionalize,
    validate_regime,
)
from .oracle import IntegratorConfig, convergence_order, integrate
from .pulse import (
    Envelope,
    TimeGrid,
    gaussian_envelope,
    inner_product,
    norm,
    read_envelope_csv,
    shift,
    write_envelope_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BellScanResult",
    "C_LIGHT",
    "CalibrationError",
    "CalibrationResult",
    "ConfigurationError",
    "DerivedParams",
    "DomainError",
    "Envelope",
    "IntegratorConfig",
    "KernelQuadrature",
    "ModeSplit",
    "NumericalCheckError",
    "OrthogonalityReport",
    "PhysicalConfig",
    "RegimeError",
    "RegimeThresholds",
    "RegimeViolation",
    "SimulationFrame",
    "TimeGrid",
    "TwoChannelState",
    "ZScanResult",
    "bell_combination",
    "bell_diagonal",
    "bell_scan",
    "bessel_j",
    "build_exit_grid",
    "calibrate_omega",
    "check_orthogonality",
    "convergence_order",
    "derive_params",
    "entanglement_entropy",
    "exit_state",
    "gaussian_envelope",
    "inner_product",
    "integrate",
    "nondimensionalize",
    "norm",
    "phi1_time_slice",
    "propagate_equal_velocity",
    "propagate_phi1",
    "propagate_phi2",
    "read_envelope_csv",
    "redimensionalize",
    "scan_z",
    "shift",
    "split_modes",
    "state_at",
    "validate_regime",
    "wigner",
    "write_envelope_csv",
]
