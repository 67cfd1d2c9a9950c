"""Spin dynamics and sensing protocols.

Effective-Ising state-vector evolution, the two-qubit spin-echo
observable that reads out a single coupling, impulsive parity
interferometry that reconstructs the Feynman kernel, and a brute-force
spin-boson Schrodinger integrator used as the oracle against which the
effective Ising description is validated.

Spin basis convention: basis-state index bit i is qubit i in the Z
eigenbasis (bit 0 -> Z = +1).
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sparse

from .constants import HBAR
from .couplings import IsingCouplings, SourceConfig
from .crystal import ChainModel
from .errors import ConfigError, NumericsError
from .modes import ModeSpectrum
from .propagator import feynman_lattice

_MAX_QUBITS = 12


@dataclass(frozen=True)
class SpinState:
    """Normalized state vector of n <= 12 qubits in the Z product basis."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        dim = self.amplitudes.shape[0]
        n = dim.bit_length() - 1
        if dim != 2**n or self.amplitudes.ndim != 1:
            raise ConfigError(f"state dimension {dim} is not a power of two")
        if n > _MAX_QUBITS:
            raise ConfigError(f"capacity: {n} qubits exceeds the {_MAX_QUBITS}-qubit limit")
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"state norm {norm!r} differs from 1 beyond 1e-12")
        self.amplitudes.setflags(write=False)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1


def plus_state(n: int) -> SpinState:
    """|+>^n, the symmetric X-basis product state."""
    if n < 1 or n > _MAX_QUBITS:
        raise ConfigError(f"capacity: need 1 <= n <= {_MAX_QUBITS}, got {n!r}")
    dim = 2**n
    return SpinState(np.full(dim, 1.0 / math.sqrt(dim), dtype=complex))


def echo_input_state(n: int, i: int, j: int) -> SpinState:
    """Sensing pair i, j in |+>, every spectator qubit in |0>."""
    if not (0 <= i < n and 0 <= j < n and i != j):
        raise ConfigError(f"need distinct sensor indices below n={n}, got {i}, {j}")
    amps = np.zeros(2**n, dtype=complex)
    for s in (0, 1 << i, 1 << j, (1 << i) | (1 << j)):
        amps[s] = 0.5
    return SpinState(amps)


def _z_values(n: int) -> np.ndarray:
    """z[s, i] = +/-1 eigenvalue of Z_i on basis state s."""
    s = np.arange(2**n)[:, None]
    return 1.0 - 2.0 * ((s >> np.arange(n)[None, :]) & 1)


def _ising_diagonal(couplings: IsingCouplings) -> np.ndarray:
    """Diagonal of (1/2) sum_ij J_ij Z_i Z_j over the computational basis."""
    z = _z_values(couplings.j_matrix.shape[0])
    return 0.5 * np.einsum("si,ij,sj->s", z, couplings.j_matrix, z)


def evolve_ising(couplings: IsingCouplings, state: SpinState, t: float) -> SpinState:
    """Evolve under H = (1/2) sum J_ij Z_i Z_j - h_t sum X_i for time t.

    Pure ZZ evolution is exact diagonal phase accumulation; a nonzero
    transverse field uses the dense eigendecomposition of the real
    symmetric Hamiltonian.
    """
    n = couplings.j_matrix.shape[0]
    if n > _MAX_QUBITS:
        raise ConfigError(f"capacity: {n} qubits exceeds the {_MAX_QUBITS}-qubit limit")
    if state.n_qubits != n:
        raise ConfigError(f"state has {state.n_qubits} qubits, couplings have {n}")
    diag = _ising_diagonal(couplings)
    if couplings.transverse_field == 0.0:
        amps = np.exp(-1j * diag * t / HBAR) * state.amplitudes
        return SpinState(amps)
    h = np.diag(diag)
    idx = np.arange(2**n)
    for i in range(n):
        h[idx, idx ^ (1 << i)] -= couplings.transverse_field
    evals, evecs = np.linalg.eigh(h)
    amps = evecs @ (np.exp(-1j * evals * t / HBAR) * (evecs.T @ state.amplitudes))
    return SpinState(amps)


def apply_x(state: SpinState, i: int) -> SpinState:
    """Pauli X on qubit i (basis-index bit flip)."""
    idx = np.arange(state.amplitudes.shape[0])
    return SpinState(state.amplitudes[idx ^ (1 << i)])


def expectation_x(state: SpinState, i: int) -> float:
    """<X_i> on a spin state."""
    idx = np.arange(state.amplitudes.shape[0])
    return float(np.real(np.vdot(state.amplitudes, state.amplitudes[idx ^ (1 << i)])))


def expectation_z(state: SpinState, i: int) -> float:
    """<Z_i> on a spin state."""
    z = 1.0 - 2.0 * ((np.arange(state.amplitudes.shape[0]) >> i) & 1)
    return float(np.sum(z * np.abs(state.amplitudes) ** 2))


def spin_echo_signal(couplings: IsingCouplings, i: int, j: int, t: float) -> float:
    """Two-qubit spin-echo readout of a single coupling, state-vector path.

    Evolves |0...0> with the sensing pair in |+>, applies X_i X_j at
    mid-time, evolves again and returns <X_i> = cos(2 J_ij t / hbar).
    The echo requires a vanishing transverse field.
    """
    if couplings.transverse_field != 0.0:
        raise ConfigError("spin echo requires h_t = 0 during the echo window")
    n = couplings.j_matrix.shape[0]
    psi = echo_input_state(n, i, j)
    psi = evolve_ising(couplings, psi, 0.5 * t)
    psi = apply_x(apply_x(psi, i), j)
    psi = evolve_ising(couplings, psi, 0.5 * t)
    return expectation_x(psi, i)


def spin_echo_closed_form(couplings: IsingCouplings, i: int, j: int, t: float) -> float:
    """Analytic value of the echo observable, cos(2 J_ij t / hbar).

    Algebraically identical to spin_echo_signal for commuting ZZ terms;
    usable at any chain size.
    """
    return math.cos(2.0 * couplings.j_matrix[i, j] * t / HBAR)


def fit_echo_coupling(
    times: np.ndarray, signals: np.ndarray, j_guess: float
) -> dict:
    """Least-squares fit of A cos(2 J t / hbar) to an echo time series.

    Returns the extracted coupling (J), the oscillation period
    pi hbar / J, the contrast A and the rms residual.
    """
    from scipy.optimize import curve_fit

    times = np.asarray(times, dtype=float)
    signals = np.asarray(signals, dtype=float)

    def model(t, amp, j_over_hbar):
        return amp * np.cos(2.0 * j_over_hbar * t)

    popt, _ = curve_fit(
        model, times, signals, p0=[1.0, abs(j_guess) / HBAR], maxfev=20000
    )
    amp, j_over_hbar = popt
    j_fit = abs(j_over_hbar) * HBAR
    residual = float(np.sqrt(np.mean((model(times, *popt) - signals) ** 2)))
    return {
        "j_coupling": j_fit,
        "period_s": math.pi * HBAR / j_fit,
        "contrast": float(amp),
        "rms_residual": residual,
    }


def impulsive_generating_functional(
    spectrum: ModeSpectrum,
    chain: ChainModel,
    sources: Sequence[tuple[int, float, float]],
) -> complex:
    """Free generating functional Z0[J] for impulsive sources.

    sources is a list of (site, time, strength) with real strengths
    (time-integrated force over hbar, 1/m);
    Z0 = exp(-1/2 sum_ab J_a Delta(t_a - t_b; i_a, i_b) J_b) built on
    the lattice Feynman kernel.  |Z0| <= 1 always.
    """
    mass = chain.species.mass_kg
    q = 0.0 + 0.0j
    for ia, ta, ja in sources:
        for ib, tb, jb in sources:
            q += ja * jb * feynman_lattice(spectrum, mass, ta - tb, int(ia), int(ib))
    return complex(np.exp(-0.5 * q))


def parity_signals(
    spectrum: ModeSpectrum,
    chain: ChainModel,
    sources: Sequence[tuple[int, float, float]],
    qubit_energy_phase: float,
) -> tuple[float, float]:
    """Global parity observables (P1, P2) of the interferometric protocol.

    P1 = Re(Z0 e^{i Phi}), P2 = Im(Z0 e^{i Phi}); the qubit energy phase
    Phi is supplied by the caller because it is a protocol-dependent
    global offset.  P1^2 + P2^2 = |Z0|^2.
    """
    z0 = impulsive_generating_functional(spectrum, chain, sources)
    rotated = z0 * np.exp(1j * qubit_energy_phase)
    return float(np.real(rotated)), float(np.imag(rotated))


def reconstruct_propagator(
    spectrum: ModeSpectrum,
    chain: ChainModel,
    i: int,
    j: int,
    t1: float,
    t2: float,
    strength: float,
) -> complex:
    """Recover Delta(t1 - t2; i, j) from four parity experiments.

    Runs the protocol with sources on both qubits, each alone, and none,
    and forms the second difference of ln Z0; for the Gaussian theory
    the quadratic form makes this finite difference exact.
    """
    runs = {
        "both": [(i, t1, strength), (j, t2, strength)],
        "a": [(i, t1, strength)],
        "b": [(j, t2, strength)],
        "none": [],
    }
    logs = {
        key: np.log(impulsive_generating_functional(spectrum, chain, srcs))
        for key, srcs in runs.items()
    }
    second_diff = logs["both"] - logs["a"] - logs["b"] + logs["none"]
    return complex(-second_diff / strength**2)


@dataclass(frozen=True)
class OracleConfig:
    """Brute-force spin-boson integration parameters.

    fock_cutoff is the maximum per-mode occupation (default 6, cap 12);
    time_step defaults to 1/(50 max(omega_n, Delta omega_L)) and may only
    be tightened; n_samples output instants are spaced evenly over
    total_time.
    """

    n_ions: int
    total_time: float
    fock_cutoff: int = 6
    time_step: float | None = None
    n_samples: int = 6

    def __post_init__(self) -> None:
        if not 1 <= self.n_ions <= 3:
            raise ConfigError(f"oracle supports 1..3 ions, got {self.n_ions!r}")
        if not 1 <= self.fock_cutoff <= 12:
            raise ConfigError(f"fock_cutoff must lie in 1..12, got {self.fock_cutoff!r}")
        if self.total_time <= 0.0:
            raise ConfigError(f"total_time must be positive, got {self.total_time!r}")
        if self.time_step is not None and self.time_step <= 0.0:
            raise ConfigError(f"time_step must be positive, got {self.time_step!r}")
        if self.n_samples < 2:
            raise ConfigError(f"n_samples must be >= 2, got {self.n_samples!r}")


@dataclass(frozen=True)
class OracleResult:
    """Echo time series from the full spin-phonon integration.

    x_series[k, i] is <X_i> at times[k]; converged reports the Fock
    doubling certificate (required before any acceptance-grade use) and
    cert_delta the largest change under doubling.
    """

    times: np.ndarray
    x_series: np.ndarray
    fock_cutoff: int
    converged: bool
    cert_delta: float | None


def _oracle_operators(
    n_ions: int,
    nb: int,
    frequencies: np.ndarray,
    g_matrix: np.ndarray,
) -> tuple[np.ndarray, sparse.csr_matrix]:
    """Static diagonal (rad/s) and coupling operator of H(t)/hbar.

    Basis index = (spin s) x (occupations n_1..n_m, row-major);
    B = sum_{i,k} g[i,k] Z_i (a_k + a_k^dagger) so that
    H(t)/hbar = diag(E) + sin(Delta omega_L t) B.
    """
    n_spin = 2**n_ions
    m = len(frequencies)
    occ = np.indices((nb,) * m).reshape(m, -1)
    e_modes = frequencies @ occ
    e_diag = np.tile(e_modes, n_spin)
    z = _z_values(n_ions)
    w = z @ g_matrix
    dim = n_spin * nb**m
    rows, cols, vals = [], [], []
    n_fock = nb**m
    for k in range(m):
        stride = nb ** (m - 1 - k)
        mask = occ[k] < nb - 1
        base = np.flatnonzero(mask)
        ladder = np.sqrt(occ[k, base] + 1.0)
        for s in range(n_spin):
            offset = s * n_fock
            lo = offset + base
            hi = lo + stride
            coupling = w[s, k] * ladder
            rows.extend([hi, lo])
            cols.extend([lo, hi])
            vals.extend([coupling, coupling])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    b_op = sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    return e_diag, b_op


def _rk4_segment(
    psi: np.ndarray,
    t0: float,
    n_steps: int,
    dt: float,
    e_diag: np.ndarray,
    b_op: sparse.csr_matrix,
    beat: float,
) -> np.ndarray:
    """Fixed-step RK4 for d psi/dt = -i (E + sin(beat t) B) psi."""

    def deriv(t: float, v: np.ndarray) -> np.ndarray:
        return -1j * (e_diag * v + math.sin(beat * t) * (b_op @ v))

    for step in range(n_steps):
        t = t0 + step * dt
        k1 = deriv(t, psi)
        k2 = deriv(t + 0.5 * dt, psi + 0.5 * dt * k1)
        k3 = deriv(t + 0.5 * dt, psi + 0.5 * dt * k2)
        k4 = deriv(t + dt, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


def _run_echo_series(
    config: OracleConfig,
    chain: ChainModel,
    spectrum: ModeSpectrum,
    source: SourceConfig,
    fock_cutoff: int,
) -> tuple[np.ndarray, np.ndarray]:
    n = config.n_ions
    nb = fock_cutoff + 1
    w = spectrum.frequencies
    eta = abs(source.beatnote_k_proj) * np.sqrt(
        HBAR / (2.0 * chain.species.mass_kg * w)
    )
    g_matrix = source.rabi_L * spectrum.mode_matrix * eta[None, :]
    e_diag, b_op = _oracle_operators(n, nb, w, g_matrix)

    dt_req = 1.0 / (50.0 * max(float(np.max(w)), source.beatnote_omega))
    if config.time_step is not None:
        if config.time_step > dt_req:
            raise ConfigError(
                f"time_step {config.time_step:.3e} s exceeds the stability bound "
                f"{dt_req:.3e} s"
            )
        dt_req = config.time_step
    # land every half-sample instant exactly on a step
    block = 2 * config.n_samples
    n_total = block * max(1, math.ceil(config.total_time / (dt_req * block)))
    dt = config.total_time / n_total

    n_spin = 2**n
    dim = n_spin * nb**n
    psi0 = np.zeros(dim, dtype=complex)
    psi0[np.arange(n_spin) * nb**n] = 1.0 / math.sqrt(n_spin)

    half_stride = n_total // block
    checkpoints = []
    psi = psi0
    for k in range(config.n_samples):
        psi = _rk4_segment(
            psi, k * half_stride * dt, half_stride, dt, e_diag, b_op, source.beatnote_omega
        )
        checkpoints.append(psi)

    idx_fock = np.arange(nb**n)
    flip = (n_spin - 1) ^ np.arange(n_spin)
    times = np.empty(config.n_samples)
    x_series = np.empty((config.n_samples, n))
    for k, psi_half in enumerate(checkpoints, start=1):
        half_steps = k * half_stride
        t_half = half_steps * dt
        mat = psi_half.reshape(n_spin, -1)[flip]
        psi_f = _rk4_segment(
            mat.reshape(-1), t_half, half_steps, dt, e_diag, b_op, source.beatnote_omega
        )
        norm = float(np.linalg.norm(psi_f))
        if abs(norm - 1.0) > 1e-8:
            raise NumericsError(f"oracle norm drifted to {norm!r}; reduce time_step")
        grid = psi_f.reshape(n_spin, -1)
        times[k - 1] = 2.0 * t_half
        for i in range(n):
            swapped = grid[np.arange(n_spin) ^ (1 << i)]
            x_series[k - 1, i] = float(np.real(np.sum(np.conj(grid) * swapped)))
    return times, x_series


def spin_boson_oracle(
    config: OracleConfig,
    chain: ChainModel,
    spectrum: ModeSpectrum,
    source: SourceConfig,
    certify: bool = True,
) -> OracleResult:
    """Echo dynamics of the full spin-phonon Hamiltonian.

    Integrates H(t) = sum_n hbar omega_n a_n^dag a_n +
    sum_{i,n} hbar Omega_L eta_n M_in sin(Delta omega_L t) Z_i (a_n + a_n^dag)
    from |vac> x |+...+> with a global echo pulse at mid-time for each
    sample instant, and returns <X_i> at the sample times.  With
    certify=True the run is repeated at doubled Fock cutoff and must
    agree within 1e-4 on every sample.
    """
    if chain.trap.n_ions != config.n_ions:
        raise ConfigError(
            f"chain has {chain.trap.n_ions} ions but oracle config expects {config.n_ions}"
        )
    times, x_series = _run_echo_series(config, chain, spectrum, source, config.fock_cutoff)
    cert_delta = None
    converged = False
    if certify:
        _, x_check = _run_echo_series(
            config, chain, spectrum, source, 2 * config.fock_cutoff
        )
        cert_delta = float(np.max(np.abs(x_check - x_series)))
        if cert_delta > 1e-4:
            raise NumericsError(
                f"Fock truncation unconverged: doubling the cutoff moved "
                f"<X_i> by {cert_delta:.3e} (> 1e-4)"
            )
        converged = True
    return OracleResult(
        times=times,
        x_series=x_series,
        fock_cutoff=config.fock_cutoff,
        converged=converged,
        cert_delta=cert_delta,
    )
