"""Command-line front end: ``timebin <job> --config <file> --out <dir>``.

Configs are flat ``key = value`` files with ``#`` comments.  Every run
writes a ``summary.txt`` in the output directory that echoes the parsed
configuration followed by ``summary.*`` result keys; the echo section
parses back into the identical job configuration, and ``summary.*``
keys are ignored by the parser, so a summary file is itself a valid
config.  All numbers are written with 17 significant digits and no
timestamps ever appear, so repeated runs are byte-identical.

Exit codes: 0 on success, 2 for configuration, domain, regime, or
calibration problems, 3 when a numerical self-check fails.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    bell_scan,
    build_exit_grid,
    calibrate_omega,
    check_orthogonality,
    entanglement_entropy,
    scan_z,
    split_modes,
)
from .errors import (
    CalibrationError,
    ConfigurationError,
    DomainError,
    NumericalCheckError,
    RegimeError,
)
from .kernel import KernelQuadrature, state_at
from .medium import (
    PhysicalConfig,
    derive_params,
    nondimensionalize,
    RegimeThresholds,
    validate_regime,
)
from .oracle import IntegratorConfig, integrate
from .pulse import TimeGrid, gaussian_envelope, norm

JOB_KINDS = ("derive", "propagate", "scan-z", "modes", "bell", "calibrate")

_PHYSICAL_KEYS = (
    "wavelength_m",
    "optical_decay_rad_s",
    "rabi_drive_rad_s",
    "atom_density_per_m3",
    "medium_length_m",
    "pulse_duration_s",
)

# key -> (value kind, jobs that accept it; () means every job)
_KEY_TABLE: dict[str, tuple[str, tuple[str, ...]]] = {
    "job": ("job", ()),
    "wavelength_m": ("float", ()),
    "optical_decay_rad_s": ("float", ()),
    "rabi_drive_rad_s": ("float", ()),
    "atom_density_per_m3": ("float", ()),
    "medium_length_m": ("float", ()),
    "pulse_duration_s": ("float", ()),
    "velocity_ratio": ("float", ()),
    "coupling_g1_rad_s": ("float", ()),
    "coupling_g2_rad_s": ("float", ()),
    "t_min": ("float", ("propagate", "scan-z", "modes")),
    "t_max": ("float", ("propagate", "scan-z", "modes")),
    "n_points": ("int", ("propagate", "scan-z", "modes")),
    "quad_nodes": ("int", ("propagate", "scan-z", "modes", "calibrate")),
    "oracle_steps": ("int", ("propagate",)),
    "z_checkpoints": ("floats", ("propagate",)),
    "z_min": ("float", ("scan-z",)),
    "z_max": ("float", ("scan-z",)),
    "n_z": ("int", ("scan-z",)),
    "bell_r1": ("float", ("bell",)),
    "j_min": ("float", ("bell",)),
    "j_max": ("float", ("bell",)),
    "n_j": ("int", ("bell",)),
    "target_r1": ("float", ("calibrate",)),
    "omega_min_gamma": ("float", ("calibrate",)),
    "omega_max_gamma": ("float", ("calibrate",)),
    "n_scan": ("int", ("calibrate",)),
    "drive_margin": ("float", ("derive",)),
    "transit_margin": ("float", ("derive",)),
    "absorption_max": ("float", ("derive",)),
}

_REQUIRED: dict[str, tuple[str, ...]] = {
    "derive": _PHYSICAL_KEYS,
    "propagate": _PHYSICAL_KEYS + ("z_checkpoints",),
    "scan-z": _PHYSICAL_KEYS + ("z_min", "z_max", "n_z"),
    "modes": _PHYSICAL_KEYS,
    "bell": ("bell_r1",),
    "calibrate": _PHYSICAL_KEYS + ("target_r1",),
}


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (tuple, list)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


@dataclass
class JobConfig:
    """Parsed, validated configuration for one run."""

    job: str
    values: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def physical(self) -> PhysicalConfig:
        kw = dict(
            wavelength=self.values["wavelength_m"],
            optical_decay=self.values["optical_decay_rad_s"],
            rabi_drive=self.values["rabi_drive_rad_s"],
            atom_density=self.values["atom_density_per_m3"],
            medium_length=self.values["medium_length_m"],
            pulse_duration=self.values["pulse_duration_s"],
        )
        if "velocity_ratio" in self.values:
            kw["velocity_ratio"] = self.values["velocity_ratio"]
        if "coupling_g1_rad_s" in self.values:
            kw["coupling_g1"] = self.values["coupling_g1_rad_s"]
        if "coupling_g2_rad_s" in self.values:
            kw["coupling_g2"] = self.values["coupling_g2_rad_s"]
        return PhysicalConfig(**kw)

    def echo_lines(self) -> list[str]:
        lines = [f"job = {self.job}"]
        for key, value in self.values.items():
            lines.append(f"{key} = {_fmt(value)}")
        return lines


def _parse_value(key: str, kind: str, raw: str, line_no: int) -> object:
    try:
        if kind == "float":
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        if kind == "int":
            return int(raw, 10)
        if kind == "floats":
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            if not parts:
                raise ValueError("empty list")
            values = tuple(float(p) for p in parts)
            if not all(math.isfinite(v) for v in values):
                raise ValueError("not finite")
            return values
        if kind == "job":
            if raw not in JOB_KINDS:
                raise ValueError(f"must be one of {', '.join(JOB_KINDS)}")
            return raw
    except ValueError as exc:
        raise ConfigurationError(
            f"line {line_no}: bad value for {key}: {raw!r} ({exc})"
        ) from None
    raise ConfigurationError(f"line {line_no}: unhandled kind {kind}")


def parse_config(text: str) -> JobConfig:
    """Parse a flat key = value config into a validated :class:`JobConfig`.

    Unknown keys, duplicates, and malformed lines are reported with
    their line numbers, all at once.  Keys under the reserved
    ``summary.`` namespace are ignored so result summaries round-trip.
    A missing required key (an empty file in the extreme) is reported
    by name.
    """
    errors: list[str] = []
    seen: dict[str, int] = {}
    values: dict[str, object] = {}
    job: str | None = None

    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {line_no}: expected 'key = value', got {line!r}")
            continue
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key.startswith("summary."):
            continue
        if key not in _KEY_TABLE:
            errors.append(f"line {line_no}: unknown key {key!r}")
            continue
        if key in seen:
            errors.append(
                f"line {line_no}: duplicate key {key!r} (first set on line "
                f"{seen[key]})")
            continue
        seen[key] = line_no
        if not raw:
            errors.append(f"line {line_no}: empty value for {key!r}")
            continue
        kind = _KEY_TABLE[key][0]
        try:
            parsed = _parse_value(key, kind, raw, line_no)
        except ConfigurationError as exc:
            errors.append(str(exc))
            continue
        if key == "job":
            job = parsed
        else:
            values[key] = parsed

    if errors:
        raise ConfigurationError("\n".join(errors))

    if job is None:
        missing = ["job"] + [k for k in _PHYSICAL_KEYS if k not in values]
        raise ConfigurationError(
            "missing required keys: " + ", ".join(missing)
            + " (full requirements depend on the job kind)")

    missing = [k for k in _REQUIRED[job] if k not in values]
    if missing:
        raise ConfigurationError(
            f"job {job!r} is missing required keys: " + ", ".join(missing))

    foreign = [
        k for k in values
        if _KEY_TABLE[k][1] and job not in _KEY_TABLE[k][1]
    ]
    if foreign:
        raise ConfigurationError(
            f"keys not applicable to job {job!r}: " + ", ".join(sorted(foreign)))

    cfg = JobConfig(job=job, values=values)
    if job != "bell":
        try:
            cfg.physical()
        except ConfigurationError as exc:
            raise ConfigurationError(f"invalid physical parameters: {exc}") from None
    return cfg


@dataclass
class RunSummary:
    """Everything a run reports: config echo plus result keys."""

    job: str
    echo: list[str]
    results: dict
    version: str
    config_sha256: str

    def to_text(self) -> str:
        lines = ["# configuration"]
        lines.extend(self.echo)
        lines.append("# results")
        lines.append(f"summary.tool_version = {self.version}")
        lines.append(f"summary.config_sha256 = {self.config_sha256}")
        for key, value in self.results.items():
            lines.append(f"summary.{key} = {_fmt(value)}")
        return "\n".join(lines) + "\n"


def _write_table(path: Path, header: str, columns) -> None:
    rows = zip(*columns)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{float(v):.17g}" for v in row) + "\n")


def _grid_for(cfg: JobConfig, frame, z_max: float) -> TimeGrid:
    t_min = cfg.get("t_min")
    t_max = cfg.get("t_max")
    n_points = cfg.get("n_points")
    if t_min is not None and t_max is not None and n_points is not None:
        return TimeGrid(t_min, t_max, n_points)
    if t_min is not None or t_max is not None or n_points is not None:
        raise ConfigurationError(
            "give all of t_min, t_max, n_points or none of them")
    return build_exit_grid(frame, z_max=z_max)


def _quad_for(cfg: JobConfig) -> KernelQuadrature:
    nodes = cfg.get("quad_nodes")
    return KernelQuadrature(int(nodes)) if nodes is not None else KernelQuadrature()


def _channel_csv(path: Path, grid, phi1, phi2) -> None:
    _write_table(
        path,
        "t,re_phi1,im_phi1,abs2_phi1,abs2_phi2",
        (grid.times, phi1.values.real, phi1.values.imag,
         np.abs(phi1.values) ** 2, np.abs(phi2.values) ** 2),
    )


def _job_derive(cfg: JobConfig, out: Path, results: dict, n_threads: int) -> None:
    params = derive_params(cfg.physical())
    kwargs = {}
    for key in ("drive_margin", "transit_margin", "absorption_max"):
        if cfg.get(key) is not None:
            kwargs[key] = cfg.get(key)
    violations = validate_regime(params, RegimeThresholds(**kwargs))
    results.update(
        cross_section_m2=params.cross_section,
        optical_depth=params.optical_depth,
        v1_m_s=params.v1,
        v2_m_s=params.v2,
        beta_per_m=params.beta,
        kappa1_per_m=params.kappa1,
        kappa2_per_m=params.kappa2,
        eit_window_rad_s=params.eit_window,
        beta_l=params.beta_l,
        kappa1_l=params.kappa1_l,
        kappa2_l=params.kappa2_l,
        drive_contrast=params.drive_contrast,
        v1_sim=params.v1_sim,
        v2_sim=params.v2_sim,
        measure=params.measure,
        regime_violations=len(violations),
    )
    for i, v in enumerate(violations, start=1):
        results[f"violation_{i}"] = str(v)


def _job_propagate(cfg: JobConfig, out: Path, results: dict, n_threads: int) -> None:
    frame = nondimensionalize(derive_params(cfg.physical()))
    checkpoints = tuple(sorted(cfg.get("z_checkpoints")))
    if any(c <= 0.0 for c in checkpoints):
        raise ConfigurationError("z_checkpoints must be positive")
    grid = _grid_for(cfg, frame, z_max=checkpoints[-1])
    quad = _quad_for(cfg)
    f1 = gaussian_envelope(grid, frame.measure)
    results["n_checkpoints"] = len(checkpoints)
    states = []
    for z in checkpoints:
        state = state_at(f1, z, frame, quad)
        states.append(state)
        _channel_csv(out / f"envelope_z{z:g}.csv", grid, state.phi1, state.phi2)
        tag = f"z{z:g}"
        results[f"n1_{tag}"] = state.n1
        results[f"n2_{tag}"] = state.n2
        results[f"residual_{tag}"] = state.residual

    steps = cfg.get("oracle_steps")
    if steps is not None:
        vacuum = f1.with_values(np.zeros_like(f1.values))
        osc = IntegratorConfig(n_z_steps=int(steps), checkpoints=checkpoints)
        for state, ostate in zip(states, integrate(f1, vacuum, osc, frame)):
            tag = f"z{state.z:g}"
            ref = float(np.linalg.norm(state.phi1.values))
            gap = float(np.linalg.norm(state.phi1.values - ostate.phi1.values))
            results[f"oracle_gap_{tag}"] = gap / ref if ref else gap
            results[f"oracle_residual_{tag}"] = ostate.residual


def _job_scan_z(cfg: JobConfig, out: Path, results: dict, n_threads: int) -> None:
    frame = nondimensionalize(derive_params(cfg.physical()))
    z_min, z_max = cfg.get("z_min"), cfg.get("z_max")
    n_z = int(cfg.get("n_z"))
    if not (0.0 < z_min < z_max):
        raise ConfigurationError("need 0 < z_min < z_max")
    if n_z < 2:
        raise ConfigurationError("need n_z >= 2")
    grid = _grid_for(cfg, frame, z_max=z_max)
    f1 = gaussian_envelope(grid, frame.measure)
    result = scan_z(
        f1, frame, np.linspace(z_min, z_max, n_z), _quad_for(cfg),
        n_threads=n_threads)
    _write_table(out / "conversion_scan.csv", "z,n1,n2",
                 (result.z_values, result.n1_values, result.n2_values))
    results.update(
        peak_z=result.peak_z,
        peak_n2=result.peak_n2,
        revival_threshold=result.revival_threshold,
        revival_z="none" if result.revival_z is None else result.revival_z,
    )


def _job_modes(cfg: JobConfig, out: Path, results: dict, n_threads: int) -> None:
    frame = nondimensionalize(derive_params(cfg.physical()))
    grid = _grid_for(cfg, frame, z_max=1.0)
    quad = _quad_for(cfg)
    f1 = gaussian_envelope(grid, frame.measure)
    state = state_at(f1, 1.0, frame, quad)
    split = split_modes(state, frame)
    report = check_orthogonality(state, split, f1, frame, quad)
    _channel_csv(out / "exit_profile.csv", grid, state.phi1, state.phi2)
    results.update(
        t_star=split.t_star,
        peak_time_fast=split.peak_times[0],
        peak_time_slow=split.peak_times[1],
        r1=split.r1,
        r2=split.r2,
        entropy_bits=entanglement_entropy(split.r1),
        overlap_residual=split.overlap_residual,
        norm_residual=split.norm_residual,
        n1_exit=state.n1,
        n2_exit=state.n2,
        windowed_overlap=report.windowed_overlap,
        temporal_overlap=report.temporal_overlap,
        spatial_overlap=report.spatial_overlap,
        probe_time=report.probe_time,
        probe_z=report.probe_z,
    )


def _job_bell(cfg: JobConfig, out: Path, results: dict, n_threads: int) -> None:
    r1 = cfg.get("bell_r1")
    j_min = cfg.get("j_min", 0.0)
    j_max = cfg.get("j_max", 3.0)
    n_j = int(cfg.get("n_j", 601))
    if not (0.0 <= j_min < j_max):
        raise ConfigurationError("need 0 <= j_min < j_max")
    if n_j < 3:
        raise ConfigurationError("need n_j >= 3")
    scan = bell_scan(r1, np.linspace(j_min, j_max, n_j))
    _write_table(out / "bell_scan.csv", "J,B", (scan.j_values, scan.b_values))
    results.update(
        r1=r1,
        entropy_bits=entanglement_entropy(r1),
        j_opt=scan.j_opt,
        b_opt=scan.b_opt,
        violation=scan.violation,
    )


def _job_calibrate(cfg: JobConfig, out: Path, results: dict, n_threads: int) -> None:
    physical = cfg.physical()
    bracket = (cfg.get("omega_min_gamma", 5.0), cfg.get("omega_max_gamma", 20.0))
    n_scan = int(cfg.get("n_scan", 9))
    kwargs = {}
    if cfg.get("quad_nodes") is not None:
        kwargs["quad"] = KernelQuadrature(int(cfg.get("quad_nodes")))
    result = calibrate_omega(
        cfg.get("target_r1"), physical, bracket=bracket, n_scan=n_scan, **kwargs)
    _write_table(
        out / "calibration_scan.csv", "omega_ratio,r1",
        (result.scan_ratios, result.scan_r1))
    results.update(
        target_r1=result.target_r1,
        omega_ratio=result.omega_ratio,
        omega_rad_s=result.omega,
        achieved_r1=result.achieved_r1,
        n_crossings=len(result.crossings),
    )
    for i, (ratio, r1) in enumerate(result.crossings, start=1):
        results[f"crossing_{i}_omega_ratio"] = ratio
        results[f"crossing_{i}_r1"] = r1


_JOBS = {
    "derive": _job_derive,
    "propagate": _job_propagate,
    "scan-z": _job_scan_z,
    "modes": _job_modes,
    "bell": _job_bell,
    "calibrate": _job_calibrate,
}


def run(cfg: JobConfig, config_text: str, out_dir, n_threads: int = 1) -> RunSummary:
    """Execute a parsed job and write its outputs under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results: dict = {}
    _JOBS[cfg.job](cfg, out, results, n_threads)
    summary = RunSummary(
        job=cfg.job,
        echo=cfg.echo_lines(),
        results=results,
        version=__version__,
        config_sha256=hashlib.sha256(config_text.encode()).hexdigest(),
    )
    (out / "summary.txt").write_text(summary.to_text(), encoding="ascii")
    return summary


def _threads_from_env() -> int:
    raw = os.environ.get("TIMEBIN_THREADS", "1")
    try:
        value = int(raw, 10)
    except ValueError:
        raise ConfigurationError(f"TIMEBIN_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigurationError("TIMEBIN_THREADS must be >= 1")
    return value


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="timebin",
        description="Two-channel slow-light propagation and time-bin analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in JOB_KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} job")
        p.add_argument("--config", required=True, help="path to a key=value config")
        p.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    try:
        try:
            config_text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot read config: {exc}") from None
        cfg = parse_config(config_text)
        if cfg.job != args.command:
            raise ConfigurationError(
                f"config declares job = {cfg.job!r} but the "
                f"{args.command!r} command was invoked")
        summary = run(cfg, config_text, args.out, n_threads=_threads_from_env())
    except (ConfigurationError, DomainError, RegimeError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalCheckError as exc:
        print(f"numerical check failed: {exc}", file=sys.stderr)
        if exc.diagnostics:
            for key, value in exc.diagnostics.items():
                print(f"  {key} = {value}", file=sys.stderr)
        return 3
    sys.stdout.write(summary.to_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
