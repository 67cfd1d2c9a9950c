"""Green's functions of the transverse phonon field.

Continuum Euclidean propagators in one to three dimensions, the
Brillouin-zone integral of the lattice Euclidean propagator, its
closed-form decomposition into an exponentially screened pole term plus
an antiferromagnetic dipolar branch-cut tail, and the real-time lattice
Feynman kernel used by the impulsive sensing protocol.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import HBAR
from .errors import ConfigError, NumericsError, PhysicsDomainError
from .modes import LOG2, ModeSpectrum, zigzag_frequency_sq
from .specfun import bessel_k

_MAX_QUAD_POINTS = 2**22


@dataclass(frozen=True)
class EffectiveMass:
    """Detuning-shifted mass of the Euclidean propagator.

    m_eff_sq = (omega_zz^2 - omega_J^2)/c_t^2 is the inverse squared
    screening length (1/m^2); xi_eff = 1/sqrt(m_eff_sq) in meters.
    Positive by construction: the source must stay red-detuned from the
    transverse branch.
    """

    m_eff_sq: float
    xi_eff: float


@dataclass(frozen=True)
class SpectralDecomposition:
    """Two-term closed form of the lattice Euclidean propagator.

    Stored per unit effective coupling, with separations measured in
    lattice units r = x/a:

        J(x)/J_eff = (-1)^(r+1) * pole_amplitude * exp(-x * pole_decay)
                     + cut_amplitude / r**cut_power

    pole_amplitude and cut_amplitude are dimensionless, pole_decay is
    1/xi_eff in 1/m, and the branch-cut tail is dipolar (cut_power = 3).
    """

    pole_amplitude: float
    pole_decay: float
    cut_amplitude: float
    cut_power: int = 3


def euclid_green(d: int, m: float, x: float) -> float:
    """Euclidean propagator of a massive Gaussian field in d dimensions.

    d=1: e^{-mx}/(2m); d=2: K0(mx)/(2 pi); d=3: e^{-mx}/(4 pi x).
    The d >= 2 forms diverge at coincident points, so x = 0 is rejected.
    """
    if d not in (1, 2, 3):
        raise ConfigError(f"euclid_green supports d in {{1, 2, 3}}, got {d!r}")
    if m <= 0.0:
        raise ConfigError(f"euclid_green requires m > 0, got {m!r}")
    if x < 0.0:
        raise ConfigError(f"euclid_green requires x >= 0, got {x!r}")
    if d == 1:
        return math.exp(-m * x) / (2.0 * m)
    if x == 0.0:
        raise PhysicsDomainError(
            f"euclid_green is UV-divergent at coincident points for d={d}"
        )
    if d == 2:
        return bessel_k(0.0, m * x) / (2.0 * math.pi)
    return math.exp(-m * x) / (4.0 * math.pi * x)


def euclid_green_bessel(d: int, m: float, x: float) -> float:
    """Same propagator via the generic form (m/x)^nu K_nu(mx)/(2 pi)^(nu+1).

    nu = d/2 - 1; the half-integer orders use K_{1/2} = K_{-1/2}.
    Provided as an independent evaluation path for cross-checking.
    """
    if d not in (1, 2, 3):
        raise ConfigError(f"euclid_green_bessel supports d in {{1, 2, 3}}, got {d!r}")
    if m <= 0.0 or x <= 0.0:
        raise ConfigError("euclid_green_bessel requires m > 0 and x > 0")
    nu = d / 2.0 - 1.0
    return (m / x) ** nu * bessel_k(abs(nu), m * x) / (2.0 * math.pi) ** (nu + 1.0)


def lattice_euclid_green(
    dispersion: Callable[[np.ndarray], np.ndarray],
    detuning: float,
    a: float,
    x: float,
    quad_points: int = 4096,
) -> float:
    """Euclidean lattice propagator a Int_BZ dk/2pi e^{ikx}/(omega^2(k) - omega_J^2).

    The Brillouin-zone integral is evaluated with the periodic rectangle
    rule (equivalent to the discrete mode sum of a ring with quad_points
    sites) and the grid is doubled until the result is stable to 1e-8
    relative.  x must sit on the lattice, and the source frequency must
    lie below the band minimum.
    """
    if quad_points < 2**10:
        raise ConfigError(f"quad_points must be >= 1024, got {quad_points!r}")
    r = x / a
    if abs(r - round(r)) > 1e-9:
        raise ConfigError(f"x must be an integer multiple of a, got x/a={r!r}")
    prev = None
    n = int(quad_points)
    while n <= _MAX_QUAD_POINTS:
        k = (2.0 * np.pi / a) * np.arange(n) / n
        band = np.asarray(dispersion(k), dtype=float)
        if np.min(band) <= detuning**2:
            raise PhysicsDomainError(
                "resonance: detuning^2 reaches the phonon band "
                f"(min omega^2(k) = {np.min(band):.6e}, omega_J^2 = {detuning**2:.6e})"
            )
        # a * (1/2pi) * (2pi/(a n)) * sum over the grid collapses to a plain mean
        weights = 1.0 / (band - detuning**2)
        val = float(np.mean(np.cos(k * x) * weights))
        # the unsigned mean sets the rounding floor of the alternating sum
        floor = 1e-13 * float(np.mean(weights))
        if prev is not None and abs(val - prev) <= max(1e-8 * abs(val), floor):
            return val
        prev = val
        n *= 2
    raise NumericsError(
        f"Brillouin-zone quadrature did not converge to 1e-8 below {_MAX_QUAD_POINTS} points"
    )


def effective_mass(
    omega_x: float,
    omega_z: float,
    length_scale_l: float,
    spacing_a: float,
    detuning: float,
) -> EffectiveMass:
    """Screening mass of the propagator at a red-detuned source frequency."""
    w_zz_sq = zigzag_frequency_sq(omega_x, omega_z, length_scale_l, spacing_a)
    if w_zz_sq <= 0.0:
        raise PhysicsDomainError("zigzag instability: homogeneous band edge imaginary")
    if detuning**2 >= w_zz_sq:
        raise PhysicsDomainError(
            "resonance: source frequency at or above the zigzag band edge "
            f"(omega_J = {detuning:.6e}, omega_zz = {math.sqrt(w_zz_sq):.6e} rad/s)"
        )
    c_t_sq = omega_x**2 * (length_scale_l**3 / spacing_a) * LOG2
    m_eff_sq = (w_zz_sq - detuning**2) / c_t_sq
    return EffectiveMass(m_eff_sq=m_eff_sq, xi_eff=1.0 / math.sqrt(m_eff_sq))


def decompose_pole_cut(
    omega_x: float,
    omega_z: float,
    length_scale_l: float,
    spacing_a: float,
    detuning: float,
) -> SpectralDecomposition:
    """Pole + branch-cut closed form of the coarse-grained couplings.

    The simple pole of the long-wavelength propagator gives an
    exponential term alternating in sign from site to site with decay
    1/xi_eff; the branch cut of the lattice dispersion gives a positive
    dipolar tail.  Amplitudes are stored per unit effective coupling
    J_eff (the couplings module multiplies in the laser factors).
    """
    em = effective_mass(omega_x, omega_z, length_scale_l, spacing_a, detuning)
    ell3 = length_scale_l**3
    pole_amplitude = em.xi_eff * spacing_a**2 / (4.0 * ell3)
    cut_amplitude = (
        omega_x**4
        * LOG2
        * ell3
        / (2.0 * (omega_z**2 - detuning**2) ** 2 * spacing_a**3)
    )
    return SpectralDecomposition(
        pole_amplitude=pole_amplitude,
        pole_decay=1.0 / em.xi_eff,
        cut_amplitude=cut_amplitude,
    )


def feynman_lattice(
    spectrum: ModeSpectrum, mass_kg: float, t: float, i: int, j: int
) -> complex:
    """Real-time Feynman kernel between two ion sites.

    Delta(t; i, j) = sum_n M_in M_jn (hbar/2 m omega_n)
    [e^{-i omega_n t} theta(t) + e^{+i omega_n t} theta(-t)], with the
    equal-time convention theta(0) = 1/2 on each branch so Delta(0)
    matches the symmetric correlator.
    """
    w = spectrum.frequencies
    amp = spectrum.mode_matrix[i, :] * spectrum.mode_matrix[j, :] * (
        HBAR / (2.0 * mass_kg * w)
    )
    if t > 0.0:
        phase = np.exp(-1j * w * t)
    elif t < 0.0:
        phase = np.exp(1j * w * t)
    else:
        phase = np.ones_like(w)
    return complex(np.sum(amp * phase))
