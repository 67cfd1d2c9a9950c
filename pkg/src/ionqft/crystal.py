"""Ion-chain microscopics: equilibrium geometry and coupling matrices.

A linear Coulomb crystal in a harmonic trap is solved in dimensionless
units (lengths in units of the Coulomb length scale l, frequencies in
units of the axial frequency omega_x) and converted to SI once.  The
harmonic spring constants decay as the inverse cube of the ion distance
and the quartic anharmonicity as the inverse fifth power.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import COULOMB_CONST, ion_mass_kg
from .errors import ConfigError, NumericsError, PhysicsDomainError

_MAX_NEWTON_ITER = 200


@dataclass(frozen=True)
class IonSpecies:
    """Single ion species: mass in atomic mass units, charge in units of e."""

    mass_amu: float
    charge: int = 1

    def __post_init__(self) -> None:
        if self.mass_amu <= 0.0:
            raise ConfigError(f"ion mass must be positive, got {self.mass_amu!r} amu")
        if int(self.charge) != self.charge or self.charge < 1:
            raise ConfigError(f"ion charge must be a positive integer, got {self.charge!r}")

    @property
    def mass_kg(self) -> float:
        return ion_mass_kg(self.mass_amu)

    @property
    def coulomb_const(self) -> float:
        """(Ze)^2/(4 pi eps0) for this species, J m."""
        return self.charge**2 * COULOMB_CONST


@dataclass(frozen=True)
class TrapConfig:
    """Angular trap frequencies (rad/s) and ion number.

    The linear-chain regime requires omega_x < omega_z <= omega_y: the
    axial direction is the softest and the y branch is stiffer than the
    z branch along which the zigzag transition occurs.
    """

    omega_x: float
    omega_y: float
    omega_z: float
    n_ions: int

    def __post_init__(self) -> None:
        if min(self.omega_x, self.omega_y, self.omega_z) <= 0.0:
            raise ConfigError("all trap frequencies must be positive")
        if not (self.omega_x < self.omega_z <= self.omega_y):
            raise ConfigError(
                "linear-chain regime requires omega_x < omega_z <= omega_y, got "
                f"omega_x={self.omega_x:g}, omega_z={self.omega_z:g}, omega_y={self.omega_y:g}"
            )
        if int(self.n_ions) != self.n_ions or self.n_ions < 1:
            raise ConfigError(f"n_ions must be a positive integer, got {self.n_ions!r}")


@dataclass(frozen=True)
class ChainModel:
    """Solved chain: equilibrium positions plus stiffness/anharmonicity data.

    positions are sorted SI coordinates along the trap axis; kappa_z and
    kappa_x are the transverse/axial harmonic spring-constant matrices
    (N/m, negative off-diagonal for the transverse branch) and beta_z the
    quartic anharmonicity matrix (N/m^3).  bulk_spacing_a is the minimum
    adjacent gap, the lattice constant of the quasi-homogeneous bulk.
    """

    species: IonSpecies
    trap: TrapConfig
    length_scale_l: float
    positions: np.ndarray
    bulk_spacing_a: float
    kappa_z: np.ndarray = field(repr=False)
    kappa_x: np.ndarray = field(repr=False)
    beta_z: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        for arr in (self.positions, self.kappa_z, self.kappa_x, self.beta_z):
            arr.setflags(write=False)


def length_scale(species: IonSpecies, trap: TrapConfig) -> float:
    """Coulomb length l = ((Ze)^2/(4 pi eps0 m omega_x^2))^(1/3), meters."""
    return float(
        (species.coulomb_const / (species.mass_kg * trap.omega_x**2)) ** (1.0 / 3.0)
    )


def _force_and_jacobian(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dimensionless force balance residual and its Jacobian at positions u."""
    du = u[:, None] - u[None, :]
    np.fill_diagonal(du, 1.0)
    inv2_signed = np.sign(du) / du**2
    inv3 = 1.0 / np.abs(du) ** 3
    np.fill_diagonal(inv2_signed, 0.0)
    np.fill_diagonal(inv3, 0.0)
    force = u - np.sum(inv2_signed, axis=1)
    jac = -2.0 * inv3
    np.fill_diagonal(jac, 1.0 + 2.0 * np.sum(inv3, axis=1))
    return force, jac


def _solve_dimensionless(n: int, tol: float, initial_u: np.ndarray | None) -> np.ndarray:
    """Damped Newton iteration for the dimensionless equilibrium positions."""
    if n == 1:
        return np.zeros(1)
    if initial_u is None:
        span = 2.0 * n**0.66
        u = np.linspace(-span / 2.0, span / 2.0, n)
    else:
        u = np.sort(np.asarray(initial_u, dtype=float))
    f, _ = _force_and_jacobian(u)
    res = float(np.max(np.abs(f)))
    for _ in range(_MAX_NEWTON_ITER):
        # rounding floor of the force sum grows with the chain extent
        if res <= tol * max(1.0, float(np.max(np.abs(u)))):
            return u
        f, jac = _force_and_jacobian(u)
        step = np.linalg.solve(jac, f)
        lam = 1.0
        while lam > 1e-12:
            u_new = u - lam * step
            if np.all(np.diff(u_new) > 0.0):
                f_new, _ = _force_and_jacobian(u_new)
                res_new = float(np.max(np.abs(f_new)))
                if res_new < res:
                    break
            lam *= 0.5
        else:
            raise NumericsError(
                f"equilibrium line search stalled at residual {res:.3e}"
            )
        u, res = u_new, res_new
    raise NumericsError(
        f"equilibrium Newton iteration did not reach tol={tol:g}; max residual {res:.3e}"
    )


def _pairwise_matrices(
    positions: np.ndarray, coulomb: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dx = positions[:, None] - positions[None, :]
    adx = np.abs(dx)
    np.fill_diagonal(adx, 1.0)
    if np.any(adx[~np.eye(len(positions), dtype=bool)] == 0.0):
        raise PhysicsDomainError("degenerate geometry: coincident ion positions")
    kappa_z = -coulomb / adx**3
    beta_z = 9.0 * coulomb / adx**5
    np.fill_diagonal(kappa_z, 0.0)
    np.fill_diagonal(beta_z, 0.0)
    return kappa_z, -2.0 * kappa_z, beta_z


def stiffness_matrices(chain: ChainModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Harmonic (z and x branch) and quartic coupling matrices of a chain.

    kappa_z[i, j] = -C/|x_i - x_j|^3, kappa_x = -2 kappa_z and
    beta_z[i, j] = 9 C/|x_i - x_j|^5 with C = (Ze)^2/(4 pi eps0);
    diagonals are zero.
    """
    return _pairwise_matrices(chain.positions, chain.species.coulomb_const)


def solve_equilibrium(
    species: IonSpecies,
    trap: TrapConfig,
    tol: float = 1e-12,
    initial_u: np.ndarray | None = None,
) -> ChainModel:
    """Solve the linear-chain equilibrium and assemble the chain model.

    Newton iteration with the analytic Jacobian (the axial stiffness
    matrix) on the dimensionless force balance
    u_i - sum_{j<i} 1/(u_i-u_j)^2 + sum_{j>i} 1/(u_j-u_i)^2 = 0,
    started from a uniform grid of span 2 N^0.66, damped so the ion
    ordering is preserved.  The residual is driven below tol (default
    1e-12); failure to converge raises NumericsError.
    """
    if tol <= 0.0:
        raise ConfigError(f"tol must be positive, got {tol!r}")
    ell = length_scale(species, trap)
    u = _solve_dimensionless(trap.n_ions, tol, initial_u)
    positions = u * ell
    if trap.n_ions >= 2:
        spacing = float(np.min(np.diff(positions)))
    else:
        spacing = ell
    kappa_z, kappa_x, beta_z = _pairwise_matrices(positions, species.coulomb_const)
    return ChainModel(
        species=species,
        trap=trap,
        length_scale_l=ell,
        positions=positions,
        bulk_spacing_a=spacing,
        kappa_z=kappa_z,
        kappa_x=kappa_x,
        beta_z=beta_z,
    )
