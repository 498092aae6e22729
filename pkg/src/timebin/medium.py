"""Physical parameters of the driven two-channel slow-light medium.

Converts laboratory inputs (wavelength, decay rate, drive strength, atom
density, cell length, pulse duration) into the derived propagation
parameters: group velocities of the two channels, the cross-coupling
rate, residual absorption rates, and the transparency bandwidth.  Also
checks the inequalities that delimit the validity regime of the lossless
transport model, and maps everything into the dimensionless frame used
by the solvers (time in pulse durations, distance in cell lengths).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigurationError

C_LIGHT = 299_792_458.0
"""Vacuum speed of light in m/s."""


@dataclass(frozen=True)
class PhysicalConfig:
    """Laboratory-frame description of medium, drive, and pulse.

    All rates are angular (rad/s).  The relative strength of the two
    optical channels can be given either as the velocity ratio
    ``velocity_ratio`` = v1/v2 in (0, 1], or as the pair of atom-field
    coupling rates ``coupling_g1``/``coupling_g2``; exactly one of the
    two forms must be supplied.
    """

    wavelength: float
    optical_decay: float
    rabi_drive: float
    atom_density: float
    medium_length: float
    pulse_duration: float
    velocity_ratio: float | None = None
    coupling_g1: float | None = None
    coupling_g2: float | None = None

    def __post_init__(self):
        scalars = {
            "wavelength": self.wavelength,
            "optical_decay": self.optical_decay,
            "rabi_drive": self.rabi_drive,
            "atom_density": self.atom_density,
            "medium_length": self.medium_length,
            "pulse_duration": self.pulse_duration,
        }
        for name, value in scalars.items():
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigurationError(f"{name} must be a finite number")
            if value <= 0.0:
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        has_ratio = self.velocity_ratio is not None
        has_couplings = self.coupling_g1 is not None or self.coupling_g2 is not None
        if has_ratio == has_couplings:
            raise ConfigurationError(
                "give exactly one of velocity_ratio or the coupling pair"
            )
        if has_ratio:
            if not (0.0 < self.velocity_ratio <= 1.0):
                raise ConfigurationError(
                    f"velocity_ratio must lie in (0, 1], got {self.velocity_ratio!r}"
                )
        else:
            if self.coupling_g1 is None or self.coupling_g2 is None:
                raise ConfigurationError("both coupling rates are required")
            for name, value in (("coupling_g1", self.coupling_g1),
                                ("coupling_g2", self.coupling_g2)):
                if not math.isfinite(value) or value <= 0.0:
                    raise ConfigurationError(f"{name} must be positive and finite")
            if self.coupling_g2 > self.coupling_g1:
                raise ConfigurationError(
                    "coupling_g2 must not exceed coupling_g1 "
                    "(channel 1 is the slower one)"
                )

    @property
    def ratio(self) -> float:
        """Velocity ratio v1/v2, whichever way it was specified."""
        if self.velocity_ratio is not None:
            return self.velocity_ratio
        return (self.coupling_g2 / self.coupling_g1) ** 2

    def with_drive(self, rabi_drive: float) -> "PhysicalConfig":
        """Copy of this config with a different drive strength."""
        return replace(self, rabi_drive=rabi_drive)


@dataclass(frozen=True)
class DerivedParams:
    """Propagation parameters computed from a :class:`PhysicalConfig`.

    SI quantities: scattering cross-section ``cross_section`` (m^2),
    group velocities ``v1`` <= ``v2`` (m/s), cross-coupling rate
    ``beta`` (1/m), residual absorption rates ``kappa1``/``kappa2``
    (1/m), transparency bandwidth ``eit_window`` (rad/s).

    Dimensionless combinations: resonant optical depth
    ``optical_depth``, ``beta_l`` = beta * L, ``kappa1_l``/``kappa2_l``,
    drive contrast (drive/decay)^2, grid velocities ``v1_sim``/``v2_sim``
    (= T v_i / L, the fraction of the cell crossed per pulse duration),
    and ``measure`` = c T / L, the weight that makes the dimensionless
    norm integral equal the physical photon number.
    """

    cross_section: float
    optical_depth: float
    v1: float
    v2: float
    beta: float
    kappa1: float
    kappa2: float
    eit_window: float
    beta_l: float
    kappa1_l: float
    kappa2_l: float
    drive_contrast: float
    v1_sim: float
    v2_sim: float
    measure: float


@dataclass(frozen=True)
class SimulationFrame:
    """Dimensionless inputs consumed by the propagation routines.

    Time is measured in pulse durations, distance in cell lengths:
    ``v1``/``v2`` are cell lengths per pulse duration, ``beta`` is the
    coupling accumulated over one cell length, and ``measure`` converts
    grid integrals of squared envelopes into photon numbers.
    """

    v1: float
    v2: float
    beta: float
    measure: float

    def __post_init__(self):
        if not (0.0 < self.v1 <= self.v2):
            raise ConfigurationError("need 0 < v1 <= v2")
        if self.beta < 0.0 or not math.isfinite(self.beta):
            raise ConfigurationError("beta must be finite and non-negative")
        if self.measure <= 0.0:
            raise ConfigurationError("measure must be positive")

    @property
    def delay_rate(self) -> float:
        """Walk-off accumulated per unit length, 1/v1 - 1/v2."""
        return 1.0 / self.v1 - 1.0 / self.v2


def derive_params(cfg: PhysicalConfig) -> DerivedParams:
    """Compute propagation parameters from laboratory inputs.

    The resonant cross-section is 3 lambda^2 / 4 pi and the optical
    depth alpha = N sigma L.  The stronger channel's coupling density is
    anchored to that depth, g2^2 N / c = decay * alpha / L, which fixes

    * v2 = drive^2 L / (decay * alpha) and v1 = ratio * v2,
    * beta L = decay * alpha / (drive * sqrt(ratio)),
    * kappa2 L = decay^2 alpha / drive^2 and kappa1 L = kappa2 L / ratio,
    * transparency bandwidth drive^2 / (decay * sqrt(alpha)).

    Raising the drive by a factor s therefore speeds both channels by
    s^2, weakens the coupling by 1/s, and suppresses absorption by 1/s^2.
    """
    lam = cfg.wavelength
    gamma = cfg.optical_decay
    omega = cfg.rabi_drive
    length = cfg.medium_length
    duration = cfg.pulse_duration
    rho = cfg.ratio

    sigma = 3.0 * lam * lam / (4.0 * math.pi)
    alpha = cfg.atom_density * sigma * length

    # Coupling densities g_i^2 N / c in 1/m.
    g2_density = gamma * alpha / length
    g1_density = g2_density / rho

    v2 = omega * omega / g2_density
    v1 = rho * v2
    beta = math.sqrt(g1_density * g2_density) / omega
    kappa1 = g1_density * gamma / (omega * omega)
    kappa2 = g2_density * gamma / (omega * omega)
    eit_window = omega * omega / (gamma * math.sqrt(alpha))

    return DerivedParams(
        cross_section=sigma,
        optical_depth=alpha,
        v1=v1,
        v2=v2,
        beta=beta,
        kappa1=kappa1,
        kappa2=kappa2,
        eit_window=eit_window,
        beta_l=beta * length,
        kappa1_l=kappa1 * length,
        kappa2_l=kappa2 * length,
        drive_contrast=(omega / gamma) ** 2,
        v1_sim=duration * v1 / length,
        v2_sim=duration * v2 / length,
        measure=C_LIGHT * duration / length,
    )


@dataclass(frozen=True)
class RegimeThresholds:
    """Bounds used by :func:`validate_regime`.

    ``drive_margin``: minimum of (drive/decay)^2 per unit optical depth,
    keeping the pulse spectrum inside the transparency window.
    ``transit_margin``: minimum of T v_i / L relative to 1/sqrt(alpha),
    keeping the compressed pulse shorter than the cell.
    ``absorption_max``: largest tolerable residual absorption kappa_i L.
    """

    drive_margin: float = 5.0
    transit_margin: float = 2.0
    absorption_max: float = 0.2

    def __post_init__(self):
        for name in ("drive_margin", "transit_margin", "absorption_max"):
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"{name} must be positive")


@dataclass(frozen=True)
class RegimeViolation:
    """One failed regime inequality, with both sides evaluated."""

    constraint: str
    observed: float
    bound: float

    def __str__(self):
        return f"{self.constraint}: observed {self.observed:.6g} vs bound {self.bound:.6g}"


def validate_regime(
    params: DerivedParams,
    thresholds: RegimeThresholds = RegimeThresholds(),
) -> list[RegimeViolation]:
    """Check the inequalities behind the lossless transport model.

    Returns one entry per failed inequality; an empty list means every
    check passed.  Violations are data, not errors: callers decide
    whether to proceed, and the solvers run regardless.

    Checks, per channel i where applicable:

    * (drive/decay)^2 >= drive_margin * alpha
    * T v_i / L >= transit_margin / sqrt(alpha)
    * T v_i / L < 1  (the pulse must not outrun the cell)
    * kappa_i L <= absorption_max
    """
    th = thresholds
    alpha = params.optical_depth
    out: list[RegimeViolation] = []

    bound = th.drive_margin * alpha
    if params.drive_contrast < bound:
        out.append(RegimeViolation(
            "drive_contrast >= drive_margin * optical_depth",
            params.drive_contrast, bound))

    slowdown_bound = th.transit_margin / math.sqrt(alpha)
    for label, v_sim in (("1", params.v1_sim), ("2", params.v2_sim)):
        if v_sim < slowdown_bound:
            out.append(RegimeViolation(
                f"v{label}_sim >= transit_margin / sqrt(optical_depth)",
                v_sim, slowdown_bound))
    for label, v_sim in (("1", params.v1_sim), ("2", params.v2_sim)):
        if not v_sim < 1.0:
            out.append(RegimeViolation(f"v{label}_sim < 1", v_sim, 1.0))

    for label, kl in (("1", params.kappa1_l), ("2", params.kappa2_l)):
        if kl > th.absorption_max:
            out.append(RegimeViolation(
                f"kappa{label}_l <= absorption_max", kl, th.absorption_max))

    return out


def nondimensionalize(params: DerivedParams) -> SimulationFrame:
    """Solver frame for these parameters (time in T, distance in L)."""
    return SimulationFrame(
        v1=params.v1_sim,
        v2=params.v2_sim,
        beta=params.beta_l,
        measure=params.measure,
    )


def redimensionalize(
    frame: SimulationFrame, cfg: PhysicalConfig
) -> tuple[float, float, float]:
    """Recover SI (v1, v2, beta) from a frame built for ``cfg``."""
    scale = cfg.medium_length / cfg.pulse_duration
    return (frame.v1 * scale, frame.v2 * scale, frame.beta / cfg.medium_length)
