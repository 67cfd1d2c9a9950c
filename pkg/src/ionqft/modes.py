"""Transverse phonons: exact finite-N spectrum and homogeneous dispersion.

The transverse branch softens from the center-of-mass mode at the trap
frequency omega_z down to the zigzag mode at the Brillouin-zone edge;
its long-wavelength expansion defines the sound speed, Compton
wavelength, shear modulus, Luttinger parameter and effective Planck
constant of the emergent scalar field theory.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .crystal import ChainModel
from .errors import PhysicsDomainError
from .specfun import ZETA3, ZETA5, polylog3_circle

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ModeSpectrum:
    """Normal-mode frequencies (rad/s, ascending) and orthonormal mode matrix.

    mode_matrix[i, n] is the amplitude of ion i in mode n; columns are
    orthonormal eigenvectors with the largest-magnitude component made
    positive so the decomposition is deterministic.
    """

    frequencies: np.ndarray
    mode_matrix: np.ndarray

    def __post_init__(self) -> None:
        self.frequencies.setflags(write=False)
        self.mode_matrix.setflags(write=False)


@dataclass(frozen=True)
class LongWavelengthParams:
    """Derived parameters of the homogeneous-chain field theory.

    c_t: transverse sound speed (m/s); xi_0: bare Compton wavelength (m);
    omega_zz: zigzag frequency (rad/s); mu_r: shear modulus (N);
    K: dimensionless Luttinger parameter; hbar_eff: dimensionless
    effective Planck constant; lambda0_nat: bare quartic coupling in
    natural units (1/m^2); cutoff: Brillouin-zone edge pi/a (1/m).
    """

    c_t: float
    xi_0: float
    omega_zz: float
    mu_r: float
    K: float
    hbar_eff: float
    lambda0_nat: float
    cutoff: float


def zigzag_instability_ratio(chain: ChainModel) -> float:
    """Dimensionless distance to the zigzag transition; >= 1 is unstable."""
    ell_over_a = chain.length_scale_l / chain.bulk_spacing_a
    return float(
        (chain.trap.omega_x / chain.trap.omega_z)
        * ell_over_a**1.5
        * math.sqrt(3.5 * ZETA3)
    )


def transverse_modes(chain: ChainModel) -> ModeSpectrum:
    """Diagonalize the transverse dynamical matrix of a solved chain.

    A[i, j] = delta_ij (omega_z^2 + sum_k kappa_z[i, k]/m) -
    (1 - delta_ij) kappa_z[i, j]/m.  Any non-positive eigenvalue means
    the linear chain is mechanically unstable against zigzag buckling.
    """
    m = chain.species.mass_kg
    kz = chain.kappa_z / m
    a_mat = np.diag(chain.trap.omega_z**2 + np.sum(kz, axis=1)) - kz
    evals, evecs = np.linalg.eigh(a_mat)
    if evals[0] <= 0.0:
        raise PhysicsDomainError(
            "zigzag instability: most negative squared frequency "
            f"{evals[0]:.6e} (rad/s)^2, instability ratio "
            f"{zigzag_instability_ratio(chain):.4f}"
        )
    pivot = np.argmax(np.abs(evecs), axis=0)
    signs = np.sign(evecs[pivot, np.arange(evecs.shape[1])])
    return ModeSpectrum(frequencies=np.sqrt(evals), mode_matrix=evecs * signs)


def dispersion_thermo(
    omega_x: float, omega_z: float, length_scale_l: float, spacing_a: float, k
):
    """Squared transverse dispersion of the infinite homogeneous chain.

    omega^2(k) = omega_z^2 - omega_x^2 (l/a)^3 (2 zeta(3) -
    2 Re Li3(e^{ika})); wavenumbers outside [0, 2 pi/a) are reduced into
    the Brillouin zone.  Accepts scalar or array k (rad/m), returns
    (rad/s)^2.
    """
    karr = np.asarray(k, dtype=float)
    prefactor = omega_x**2 * (length_scale_l / spacing_a) ** 3
    theta = (karr * spacing_a) % (2.0 * np.pi)
    vals = omega_z**2 - prefactor * (2.0 * ZETA3 - 2.0 * polylog3_circle(theta))
    return float(vals) if np.ndim(k) == 0 else vals


def zigzag_frequency_sq(
    omega_x: float, omega_z: float, length_scale_l: float, spacing_a: float
) -> float:
    """Squared zigzag frequency omega_z^2 - (7/2) zeta(3) omega_x^2 (l/a)^3."""
    return omega_z**2 - 3.5 * ZETA3 * omega_x**2 * (length_scale_l / spacing_a) ** 3


def long_wavelength_params(chain: ChainModel) -> LongWavelengthParams:
    """Long-wavelength field-theory parameters of the chain's bulk.

    Uses the bulk spacing a and Coulomb scale of the solved chain; the
    zigzag frequency must be real (stable linear phase) or a
    PhysicsDomainError carrying the instability ratio is raised.
    """
    m = chain.species.mass_kg
    a = chain.bulk_spacing_a
    ell = chain.length_scale_l
    omega_x = chain.trap.omega_x
    omega_z = chain.trap.omega_z
    w_zz_sq = zigzag_frequency_sq(omega_x, omega_z, ell, a)
    if w_zz_sq <= 0.0:
        raise PhysicsDomainError(
            "zigzag instability: homogeneous zigzag frequency squared "
            f"{w_zz_sq:.6e} (rad/s)^2, instability ratio "
            f"{zigzag_instability_ratio(chain):.4f}"
        )
    c_t = math.sqrt(chain.species.coulomb_const * LOG2 / (m * a))
    omega_zz = math.sqrt(w_zz_sq)
    big_k = m * a * c_t / HBAR
    ell_over_a3 = (ell / a) ** 3
    return LongWavelengthParams(
        c_t=c_t,
        xi_0=c_t / omega_zz,
        omega_zz=omega_zz,
        mu_r=m * omega_x**2 * a * ell_over_a3 * LOG2,
        K=big_k,
        hbar_eff=math.sqrt(ell_over_a3 * LOG2) / big_k,
        lambda0_nat=(1.0 / (a**2 * big_k)) * 279.0 * ZETA5 / (2.0 * LOG2),
        cutoff=math.pi / a,
    )
