import math

import numpy as np
import pytest

from ionqft.couplings import SourceConfig
from ionqft.crystal import IonSpecies, TrapConfig, solve_equilibrium
from ionqft.modes import long_wavelength_params, transverse_modes

TWO_PI = 2.0 * math.pi
YB_MASS_AMU = 170.936323
RAMAN_K = 4.0 * math.pi / 369.5e-9


@pytest.fixture(scope="session")
def ytterbium():
    return IonSpecies(mass_amu=YB_MASS_AMU)


@pytest.fixture(scope="session")
def reference_chain(ytterbium):
    """50-ion chain, 0.1 MHz axial and 3.75 MHz transverse confinement."""
    trap = TrapConfig(
        omega_x=TWO_PI * 0.1e6,
        omega_y=TWO_PI * 4.2e6,
        omega_z=TWO_PI * 3.75e6,
        n_ions=50,
    )
    return solve_equilibrium(ytterbium, trap)


@pytest.fixture(scope="session")
def reference_spectrum(reference_chain):
    return transverse_modes(reference_chain)


@pytest.fixture(scope="session")
def reference_lw(reference_chain):
    return long_wavelength_params(reference_chain)


@pytest.fixture(scope="session")
def two_ion_chain(ytterbium):
    """Two-ion sensing crystal with tight axial confinement."""
    trap = TrapConfig(
        omega_x=TWO_PI * 2.0e6,
        omega_y=TWO_PI * 4.2e6,
        omega_z=TWO_PI * 2.1e6,
        n_ions=2,
    )
    return solve_equilibrium(ytterbium, trap)


@pytest.fixture(scope="session")
def two_ion_spectrum(two_ion_chain):
    return transverse_modes(two_ion_chain)


def detuned_source(spectrum_or_omega, detuning_hz: float, rabi_hz: float) -> SourceConfig:
    """Beat-note source a fixed linear frequency below a band anchor."""
    anchor = (
        float(np.min(spectrum_or_omega.frequencies))
        if hasattr(spectrum_or_omega, "frequencies")
        else float(spectrum_or_omega)
    )
    return SourceConfig(
        rabi_L=TWO_PI * rabi_hz,
        beatnote_omega=anchor - TWO_PI * detuning_hz,
        beatnote_k_proj=RAMAN_K,
    )
