"""Run configuration schema shared by the service and the CLI.

A run configuration is a JSON document with seven sections.  Sections
are mandatory; every leaf carries a default corresponding to the
50-ion reference chain (0.1 MHz axial trap, 3.75 MHz transverse), so an
explicit config file only needs to spell out what it changes.  Unknown
keys are rejected.
"""

import hashlib
import json
import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

_RAMAN_WAVELENGTH_M = 369.5e-9


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpeciesSection(_Section):
    """Ion species: mass in atomic mass units, integer charge state."""

    mass_amu: float = Field(default=170.936323, gt=0.0)
    charge: int = Field(default=1, ge=1)


class TrapSection(_Section):
    """Trap frequencies (linear Hz, all positive) and ion count."""

    omega_x_hz: float = Field(default=0.1e6, gt=0.0)
    omega_y_hz: float = Field(default=4.2e6, gt=0.0)
    omega_z_hz: float = Field(default=3.75e6, gt=0.0)
    n_ions: int = Field(default=50, ge=1)


class SourceSection(_Section):
    """Spin-dependent optical force: Rabi rate, beat-note detuning below
    the zigzag band edge, wavevector projections, and an optional carrier
    term acting as a transverse field."""

    rabi_hz: float = Field(default=50.0e3, ge=0.0)
    detuning_from_zigzag_hz: float = Field(default=18.75e3, gt=0.0)
    k_proj_z_per_m: float = Field(default=4.0 * math.pi / _RAMAN_WAVELENGTH_M)
    k_proj_x_per_m: float = Field(default=0.0)
    carrier_rabi_hz: float = Field(default=0.0, ge=0.0)


class DriveSection(_Section):
    """Parametric drive: modulation index and drive frequency (Hz)."""

    delta_eta: float = Field(default=5.33, ge=0.0)
    omega_d_hz: float = Field(default=7.5e6, gt=0.0)


class RgSection(_Section):
    """Flow inputs: bare quartic in cutoff units (null derives it from
    the chain), flow step, and step count."""

    lambda0_dimensionless: float | None = Field(default=None, ge=0.0)
    flow_step: float = Field(default=0.002, gt=0.0, le=0.01)
    flow_steps: int = Field(default=5000, ge=1)


class DynamicsSection(_Section):
    """Sensing protocol window, sampling, and oracle size limits."""

    t_max_s: float = Field(default=1.0e-3, gt=0.0)
    samples: int = Field(default=6, ge=2)
    fock_cutoff: int = Field(default=6, ge=1, le=12)
    oracle_ions: int = Field(default=2, ge=1, le=3)


class OutputSection(_Section):
    """Output format and optional destination path."""

    format: Literal["csv", "json"] = "csv"
    path: str | None = None


class RunConfig(_Section):
    """Complete configuration of one run.  All sections are required."""

    species: SpeciesSection
    trap: TrapSection
    source: SourceSection
    drive: DriveSection
    rg: RgSection
    dynamics: DynamicsSection
    output: OutputSection


DEFAULT_CONFIG_DICT: dict = {
    "species": {},
    "trap": {},
    "source": {},
    "drive": {},
    "rg": {},
    "dynamics": {},
    "output": {},
}


def default_config() -> RunConfig:
    """The built-in reference configuration (50-ion chain)."""
    return RunConfig.model_validate(DEFAULT_CONFIG_DICT)


def config_sha256(config: RunConfig) -> str:
    """Deterministic digest of the fully resolved configuration."""
    canonical = json.dumps(
        config.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode()).hexdigest()
