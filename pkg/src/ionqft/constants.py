"""Physical constants and default ion species data.

All values are CODATA 2018 (matching scipy.constants) and are kept as
module-level floats so results are reproducible bit-for-bit across runs.
Internally every frequency is an angular frequency in rad/s; user-facing
configuration uses ordinary frequencies nu = omega/2pi in Hz.
"""

import scipy.constants as cons

ELEMENTARY_CHARGE = cons.elementary_charge      # 1.602176634e-19 C
EPSILON_0 = cons.epsilon_0                      # 8.8541878128e-12 F/m
HBAR = cons.hbar                                # 1.054571817e-34 J s
ATOMIC_MASS = cons.atomic_mass                  # 1.66053906660e-27 kg

# Coulomb energy scale e^2/(4 pi eps0), J m
COULOMB_CONST = ELEMENTARY_CHARGE**2 / (4.0 * cons.pi * EPSILON_0)

# 171Yb+ mass in atomic mass units (AME2020)
YB171_MASS_AMU = 170.936323

# 369.5 nm Yb+ cooling/Raman wavelength; counter-propagating beams give
# a beat-note wavevector difference of twice the single-photon value.
YB_RAMAN_WAVELENGTH_M = 369.5e-9


def ion_mass_kg(mass_amu: float) -> float:
    """Ion mass in kg from its value in atomic mass units."""
    return mass_amu * ATOMIC_MASS
