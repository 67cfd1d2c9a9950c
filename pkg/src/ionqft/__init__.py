"""Trapped-ion chain microscopics, phonon-mediated spin couplings,
their field-theory renormalization near the zigzag transition, and the
qubit sensing protocols that probe them."""

__version__ = "0.1.0"

from .couplings import (
    IsingCouplings,
    SourceConfig,
    coarse_grained_couplings,
    exact_mode_couplings,
)
from .crystal import ChainModel, IonSpecies, TrapConfig, solve_equilibrium
from .drive import DriveConfig, dressed_params, modulation_ratio
from .dynamics import (
    OracleConfig,
    OracleResult,
    SpinState,
    evolve_ising,
    spin_boson_oracle,
    spin_echo_signal,
)
from .errors import ConfigError, IonqftError, NumericsError, PhysicsDomainError
from .modes import (
    LongWavelengthParams,
    ModeSpectrum,
    dispersion_thermo,
    long_wavelength_params,
    transverse_modes,
)
from .propagator import SpectralDecomposition, decompose_pole_cut, lattice_euclid_green
from .renorm import CriticalShift, RGState, critical_shift, rg_flow

__all__ = [
    "__version__",
    "ChainModel",
    "ConfigError",
    "CriticalShift",
    "DriveConfig",
    "IonSpecies",
    "IonqftError",
    "IsingCouplings",
    "LongWavelengthParams",
    "ModeSpectrum",
    "NumericsError",
    "OracleConfig",
    "OracleResult",
    "PhysicsDomainError",
    "RGState",
    "SourceConfig",
    "SpectralDecomposition",
    "SpinState",
    "TrapConfig",
    "coarse_grained_couplings",
    "critical_shift",
    "decompose_pole_cut",
    "dispersion_thermo",
    "dressed_params",
    "evolve_ising",
    "exact_mode_couplings",
    "lattice_euclid_green",
    "long_wavelength_params",
    "modulation_ratio",
    "rg_flow",
    "solve_equilibrium",
    "spin_boson_oracle",
    "spin_echo_signal",
    "transverse_modes",
]
