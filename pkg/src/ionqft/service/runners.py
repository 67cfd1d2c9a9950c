"""Subcommand implementations: resolved config in, result table out.

Every runner returns a dict with `columns`, `rows`, `summary` and
`notes`; rows contain plain Python scalars so results serialize
identically through the service and the CLI.  All outputs are
deterministic functions of the configuration.
"""

import math

import numpy as np

from ..constants import HBAR
from ..couplings import (
    SourceConfig,
    coarse_grained_couplings,
    crossover_separation,
    effective_coupling_scale,
    exact_mode_couplings,
    validity_margin,
)
from ..crystal import ChainModel, IonSpecies, TrapConfig, solve_equilibrium
from ..drive import DriveConfig, dressed_params, drive_validity_ratio, modulation_ratio
from ..dynamics import (
    OracleConfig,
    fit_echo_coupling,
    impulsive_generating_functional,
    parity_signals,
    reconstruct_propagator,
    spin_boson_oracle,
    spin_echo_closed_form,
)
from ..errors import ConfigError, NumericsError
from ..modes import (
    LOG2,
    LongWavelengthParams,
    dispersion_thermo,
    long_wavelength_params,
    transverse_modes,
    zigzag_instability_ratio,
)
from ..propagator import decompose_pole_cut, feynman_lattice, lattice_euclid_green
from ..renorm import RGState, critical_shift, rg_flow
from .models import RunConfig

FIGURE_DETUNINGS_HZ = (18.75e3, 37.5e3, 93.75e3, 187.5e3, 937.5e3)

_TWO_PI = 2.0 * math.pi


def _angular(nu_hz: float) -> float:
    return _TWO_PI * nu_hz


def build_chain(config: RunConfig, n_ions: int | None = None) -> ChainModel:
    species = IonSpecies(mass_amu=config.species.mass_amu, charge=config.species.charge)
    trap = TrapConfig(
        omega_x=_angular(config.trap.omega_x_hz),
        omega_y=_angular(config.trap.omega_y_hz),
        omega_z=_angular(config.trap.omega_z_hz),
        n_ions=config.trap.n_ions if n_ions is None else n_ions,
    )
    return solve_equilibrium(species, trap)


def build_source(config: RunConfig, anchor_omega: float, detuning_hz: float | None = None) -> SourceConfig:
    """Beat-note source detuned below the given band-edge frequency."""
    delta = config.source.detuning_from_zigzag_hz if detuning_hz is None else detuning_hz
    return SourceConfig(
        rabi_L=_angular(config.source.rabi_hz),
        beatnote_omega=anchor_omega - _angular(delta),
        beatnote_k_proj=config.source.k_proj_z_per_m,
        beatnote_k_proj_x=config.source.k_proj_x_per_m,
        carrier_rabi=_angular(config.source.carrier_rabi_hz),
    )


def _central_pair(n: int) -> tuple[int, int]:
    if n < 2:
        raise ConfigError("sensing protocols need at least two ions")
    i = (n - 1) // 2
    return i, i + 1


def run_chain(config: RunConfig) -> dict:
    chain = build_chain(config)
    rows = [[i, float(x)] for i, x in enumerate(chain.positions)]
    summary = {
        "n_ions": chain.trap.n_ions,
        "length_scale_m": chain.length_scale_l,
        "bulk_spacing_m": chain.bulk_spacing_a,
        "span_m": float(chain.positions[-1] - chain.positions[0]),
        "instability_ratio": zigzag_instability_ratio(chain),
    }
    return {
        "columns": ["index", "position_m"],
        "rows": rows,
        "summary": summary,
        "notes": "equilibrium positions along the trap axis",
    }


def run_modes(config: RunConfig) -> dict:
    chain = build_chain(config)
    spectrum = transverse_modes(chain)
    rows = [
        [n, float(w), float(w / _TWO_PI)]
        for n, w in enumerate(spectrum.frequencies)
    ]
    summary = {
        "com_mode_hz": float(np.max(spectrum.frequencies) / _TWO_PI),
        "zigzag_mode_hz": float(np.min(spectrum.frequencies) / _TWO_PI),
        "instability_ratio": zigzag_instability_ratio(chain),
    }
    return {
        "columns": ["mode_index", "omega_rad_s", "frequency_hz"],
        "rows": rows,
        "summary": summary,
        "notes": "transverse phonon spectrum, ascending",
    }


def run_dispersion(config: RunConfig) -> dict:
    chain = build_chain(config)
    lw = long_wavelength_params(chain)
    k = np.linspace(0.0, lw.cutoff, 201)
    omega_sq = dispersion_thermo(
        chain.trap.omega_x,
        chain.trap.omega_z,
        chain.length_scale_l,
        chain.bulk_spacing_a,
        k,
    )
    rows = [
        [float(kv), float(w2), float(math.sqrt(w2))]
        for kv, w2 in zip(k, omega_sq)
    ]
    summary = _lw_summary(lw)
    return {
        "columns": ["k_rad_per_m", "omega_sq_rad2_s2", "omega_rad_s"],
        "rows": rows,
        "summary": summary,
        "notes": "homogeneous-chain transverse dispersion over half the zone",
    }


def _lw_summary(lw: LongWavelengthParams) -> dict:
    return {
        "c_t_m_s": lw.c_t,
        "xi_0_m": lw.xi_0,
        "omega_zz_rad_s": lw.omega_zz,
        "omega_zz_hz": lw.omega_zz / _TWO_PI,
        "mu_r_n": lw.mu_r,
        "luttinger_k": lw.K,
        "hbar_eff": lw.hbar_eff,
        "lambda0_nat_per_m2": lw.lambda0_nat,
        "cutoff_per_m": lw.cutoff,
    }


def run_couplings(config: RunConfig) -> dict:
    chain = build_chain(config)
    spectrum = transverse_modes(chain)
    lw = long_wavelength_params(chain)
    n = chain.trap.n_ions
    central, _ = _central_pair(n)
    rows = []
    for det_hz in FIGURE_DETUNINGS_HZ:
        source = build_source(config, lw.omega_zz, detuning_hz=det_hz)
        exact = exact_mode_couplings(spectrum, chain, source)
        pairs = [(central, j) for j in range(central + 1, n)]
        coarse = coarse_grained_couplings(
            chain.trap.omega_x,
            chain.trap.omega_z,
            chain.length_scale_l,
            chain.bulk_spacing_a,
            chain.species.mass_kg,
            n,
            source,
            pairs=pairs,
            positions=chain.positions,
        )
        for _, j in pairs:
            je = float(exact.j_matrix[central, j])
            jc = float(coarse.j_matrix[central, j])
            rows.append(
                [
                    float(det_hz),
                    central,
                    j,
                    float(chain.positions[j] - chain.positions[central]),
                    je,
                    jc,
                    abs(je),
                    je / jc if jc != 0.0 else float("nan"),
                ]
            )
    source0 = build_source(config, lw.omega_zz)
    decomp = decompose_pole_cut(
        chain.trap.omega_x,
        chain.trap.omega_z,
        chain.length_scale_l,
        chain.bulk_spacing_a,
        source0.beatnote_omega,
    )
    cross = crossover_separation(decomp, chain.bulk_spacing_a)
    summary = {
        "detunings_hz": list(FIGURE_DETUNINGS_HZ),
        "reference_index": central,
        "j_eff_joule": effective_coupling_scale(
            chain.trap.omega_x, chain.species.mass_kg, source0
        ),
        "effective_range_m": 1.0 / decomp.pole_decay,
        "crossover_separation_m": cross,
        "validity_margin": validity_margin(spectrum, source0, chain.species.mass_kg),
    }
    return {
        "columns": [
            "detuning_hz",
            "index_i",
            "index_j",
            "separation_m",
            "j_exact_joule",
            "j_coarse_joule",
            "abs_j_exact_joule",
            "exact_over_coarse",
        ],
        "rows": rows,
        "summary": summary,
        "notes": "couplings from the chain center at the five reference detunings",
    }


def run_propagator(config: RunConfig) -> dict:
    chain = build_chain(config)
    lw = long_wavelength_params(chain)
    source = build_source(config, lw.omega_zz)
    decomp = decompose_pole_cut(
        chain.trap.omega_x,
        chain.trap.omega_z,
        chain.length_scale_l,
        chain.bulk_spacing_a,
        source.beatnote_omega,
    )
    a = chain.bulk_spacing_a

    def band(k: np.ndarray) -> np.ndarray:
        return dispersion_thermo(
            chain.trap.omega_x, chain.trap.omega_z, chain.length_scale_l, a, k
        )

    # the closed form is per unit J_eff; the same normalization for the
    # Brillouin-zone integral is -(omega_x^2 log2 / 2) G(x)
    bridge = -0.5 * chain.trap.omega_x**2 * LOG2
    rows = []
    r_max = min(40, chain.trap.n_ions - 1) if chain.trap.n_ions > 1 else 40
    for r in range(1, r_max + 1):
        x = r * a
        g_lat = lattice_euclid_green(band, source.beatnote_omega, a, x)
        j_lat = bridge * g_lat
        sign = -1.0 if r % 2 == 0 else 1.0
        pole = sign * decomp.pole_amplitude * math.exp(-x * decomp.pole_decay)
        cut = decomp.cut_amplitude / r**decomp.cut_power
        closed = pole + cut
        interference = abs(1.0 + pole / cut) if cut != 0.0 else float("inf")
        rows.append(
            [
                r,
                float(x),
                float(g_lat),
                float(j_lat),
                float(closed),
                float(pole),
                float(cut),
                abs(closed - j_lat) / abs(j_lat) if j_lat != 0.0 else float("nan"),
                float(interference),
            ]
        )
    summary = {
        "detuning_hz": config.source.detuning_from_zigzag_hz,
        "xi_eff_m": 1.0 / decomp.pole_decay,
        "pole_amplitude": decomp.pole_amplitude,
        "cut_amplitude": decomp.cut_amplitude,
        "omega_zz_hz": lw.omega_zz / _TWO_PI,
    }
    return {
        "columns": [
            "separation_index",
            "x_m",
            "lattice_green",
            "j_lattice_over_jeff",
            "j_closed_over_jeff",
            "pole_term",
            "cut_term",
            "rel_deviation",
            "interference_factor",
        ],
        "rows": rows,
        "summary": summary,
        "notes": "Brillouin-zone propagator against its pole-plus-cut decomposition",
    }


def _initial_rg_state(config: RunConfig, lw: LongWavelengthParams) -> RGState:
    lam_hat = config.rg.lambda0_dimensionless
    if lam_hat is None:
        lam_hat = lw.lambda0_nat / lw.cutoff**2
    return RGState(
        m0_sq=1.0 / lw.xi_0**2,
        lambda0=lam_hat * lw.cutoff**2,
        cutoff=lw.cutoff,
    )


def run_rg_flow(config: RunConfig) -> dict:
    chain = build_chain(config)
    lw = long_wavelength_params(chain)
    state = _initial_rg_state(config, lw)
    trajectory = rg_flow(state, config.rg.flow_step, config.rg.flow_steps)
    cut_sq = lw.cutoff**2
    rows = [
        [float(s.flow_time), float(s.m0_sq / cut_sq), float(s.lambda0 / cut_sq)]
        for s in trajectory.states
    ]
    final = trajectory.states[-1]
    summary = {
        "diverged": trajectory.diverged,
        "steps_recorded": len(trajectory.states) - 1,
        "final_m_hat_sq": float(final.m0_sq / cut_sq),
        "final_lambda_hat": float(final.lambda0 / cut_sq),
        "initial_m_hat_sq": float(state.m0_sq / cut_sq),
        "initial_lambda_hat": float(state.lambda0 / cut_sq),
    }
    return {
        "columns": ["ell", "m_hat_sq", "lambda_hat"],
        "rows": rows,
        "summary": summary,
        "notes": "one-loop flow at fixed cutoff in cutoff units",
    }


def run_rg_critical(config: RunConfig) -> dict:
    chain = build_chain(config)
    lw = long_wavelength_params(chain)
    shift = critical_shift(lw, lambda0_hat=config.rg.lambda0_dimensionless)
    lam_hat = config.rg.lambda0_dimensionless
    if lam_hat is None:
        lam_hat = lw.lambda0_nat / lw.cutoff**2
    shift_ratio = (
        math.sqrt(shift.delta_omega_zz_sq) / lw.omega_zz
        if shift.delta_omega_zz_sq > 0.0
        else 0.0
    )
    summary = {
        "lambda0_hat": lam_hat,
        "m_c_sq_natural_per_m2": shift.m_c_sq_natural,
        "delta_omega_zz_sq_rad2_s2": shift.delta_omega_zz_sq,
        "below_threshold": shift.below_threshold,
        "shift_ratio": shift_ratio,
        "luttinger_k": lw.K,
    }
    rows = [
        [
            lam_hat,
            shift.m_c_sq_natural,
            shift.delta_omega_zz_sq,
            int(shift.below_threshold),
            shift_ratio,
        ]
    ]
    return {
        "columns": [
            "lambda0_hat",
            "m_c_sq_natural_per_m2",
            "delta_omega_zz_sq_rad2_s2",
            "below_threshold",
            "shift_ratio",
        ],
        "rows": rows,
        "summary": summary,
        "notes": "fluctuation-induced shift of the zigzag transition",
    }


def run_drive(config: RunConfig) -> dict:
    chain = build_chain(config)
    lw = long_wavelength_params(chain)
    drive = DriveConfig(
        omega_d=_angular(config.drive.omega_d_hz), delta_eta=config.drive.delta_eta
    )
    rows = []
    for x in np.arange(0.0, 10.0 + 1e-12, 0.25):
        try:
            ratio = modulation_ratio(float(x))
        except NumericsError:
            rows.append([float(x), float("nan"), float("nan"), float("nan")])
            continue
        if ratio > 0.0:
            k_dressed = lw.K * math.sqrt(ratio)
            c_dressed = lw.c_t * math.sqrt(ratio)
        else:
            k_dressed = float("nan")
            c_dressed = float("nan")
        rows.append([float(x), float(ratio), float(k_dressed), float(c_dressed)])
    dressed = dressed_params(chain, drive)
    summary = {
        "delta_eta": config.drive.delta_eta,
        "modulation_ratio": modulation_ratio(config.drive.delta_eta),
        "k_dressed": dressed.K,
        "c_t_dressed_m_s": dressed.c_t,
        "mu_dressed_n": dressed.mu_r,
        "lambda0_nat_dressed_per_m2": dressed.lambda0_nat,
        "validity_ratio": drive_validity_ratio(chain, drive),
    }
    return {
        "columns": ["delta_eta", "modulation_ratio", "k_dressed", "c_t_dressed_m_s"],
        "rows": rows,
        "summary": summary,
        "notes": "stroboscopic stiffness dressing versus modulation index",
    }


def run_dynamics(config: RunConfig) -> dict:
    chain = build_chain(config)
    spectrum = transverse_modes(chain)
    anchor = float(np.min(spectrum.frequencies))
    source = build_source(config, anchor)
    couplings = exact_mode_couplings(spectrum, chain, source)
    i, j = _central_pair(chain.trap.n_ions)
    times = np.linspace(0.0, config.dynamics.t_max_s, config.dynamics.samples)
    signals = [spin_echo_closed_form(couplings, i, j, float(t)) for t in times]
    rows = [[float(t), float(s)] for t, s in zip(times, signals)]
    j_true = float(couplings.j_matrix[i, j])
    fit = fit_echo_coupling(times, np.array(signals), j_true)
    summary = {
        "pair": [i, j],
        "j_exact_joule": j_true,
        "fit": fit,
        "validity_margin": validity_margin(spectrum, source, chain.species.mass_kg),
    }
    return {
        "columns": ["t_s", "echo_x"],
        "rows": rows,
        "summary": summary,
        "notes": "spin-echo readout of the central pair coupling",
    }


def run_sense_impulsive(config: RunConfig) -> dict:
    chain = build_chain(config)
    spectrum = transverse_modes(chain)
    i, j = _central_pair(chain.trap.n_ions)
    mass = chain.species.mass_kg
    kernel_0 = feynman_lattice(spectrum, mass, 0.0, i, i)
    strength = 0.3 / math.sqrt(abs(kernel_0))
    times = np.linspace(0.0, config.dynamics.t_max_s, config.dynamics.samples)
    rows = []
    max_err = 0.0
    for t2 in times:
        recon = reconstruct_propagator(spectrum, chain, i, j, 0.0, float(t2), strength)
        direct = feynman_lattice(spectrum, mass, -float(t2), i, j)
        p1, p2 = parity_signals(
            spectrum, chain, [(i, 0.0, strength), (j, float(t2), strength)], 0.0
        )
        max_err = max(max_err, abs(recon - direct))
        rows.append(
            [
                float(t2),
                float(recon.real),
                float(recon.imag),
                float(direct.real),
                float(direct.imag),
                p1,
                p2,
            ]
        )
    summary = {
        "pair": [i, j],
        "source_strength_per_m": strength,
        "max_reconstruction_error": max_err,
    }
    return {
        "columns": [
            "t2_s",
            "reconstructed_re",
            "reconstructed_im",
            "direct_re",
            "direct_im",
            "parity_p1",
            "parity_p2",
        ],
        "rows": rows,
        "summary": summary,
        "notes": "two-time kernel from four-run parity interferometry",
    }


def run_sense_harmonic(config: RunConfig) -> dict:
    n = config.dynamics.oracle_ions
    chain = build_chain(config, n_ions=n)
    spectrum = transverse_modes(chain)
    anchor = float(np.min(spectrum.frequencies))
    source = build_source(config, anchor)
    oracle_config = OracleConfig(
        n_ions=n,
        total_time=config.dynamics.t_max_s,
        fock_cutoff=config.dynamics.fock_cutoff,
        n_samples=config.dynamics.samples,
    )
    result = spin_boson_oracle(oracle_config, chain, spectrum, source)
    couplings = exact_mode_couplings(spectrum, chain, source)
    rows = [
        [float(t)] + [float(v) for v in xs]
        for t, xs in zip(result.times, result.x_series)
    ]
    summary = {
        "oracle_ions": n,
        "fock_cutoff": result.fock_cutoff,
        "converged": result.converged,
        "cert_delta": result.cert_delta,
        "validity_margin": validity_margin(spectrum, source, chain.species.mass_kg),
    }
    if n >= 2:
        j01 = float(couplings.j_matrix[0, 1])
        fit = fit_echo_coupling(result.times, result.x_series[:, 0], j01)
        summary["j_predicted_joule"] = j01
        summary["predicted_period_s"] = math.pi * HBAR / abs(j01)
        summary["fit"] = fit
    return {
        "columns": ["t_s"] + [f"x_{i}" for i in range(n)],
        "rows": rows,
        "summary": summary,
        "notes": "full spin-phonon echo dynamics against the effective model",
    }


RUNNERS = {
    "chain": run_chain,
    "modes": run_modes,
    "dispersion": run_dispersion,
    "couplings": run_couplings,
    "propagator": run_propagator,
    "rg-flow": run_rg_flow,
    "rg-critical": run_rg_critical,
    "drive": run_drive,
    "dynamics": run_dynamics,
    "sense-impulsive": run_sense_impulsive,
    "sense-harmonic": run_sense_harmonic,
}
