"""Tests for the parametric-drive dressing of the shear modulus."""

import math

import pytest

from ionqft.constants import HBAR
from ionqft.drive import (
    DriveConfig,
    dressed_params,
    dressed_shear_modulus,
    drive_validity_ratio,
    modulation_ratio,
)
from ionqft.errors import ConfigError, PhysicsDomainError
from ionqft.modes import LOG2
from ionqft.specfun import ZETA5

from conftest import TWO_PI

RATIO_5_33_REF = 5.851588453675083e-4
K_DRESSED_REF = 2623.7395840704376


@pytest.fixture(scope="module")
def reference_drive():
    return DriveConfig(omega_d=TWO_PI * 7.5e6, delta_eta=5.33)


class TestModulationRatio:
    def test_undriven_chain_is_exact_unity(self) -> None:
        assert modulation_ratio(0.0) == 1.0

    def test_deep_drive_value_frozen(self) -> None:
        assert modulation_ratio(5.33) == pytest.approx(RATIO_5_33_REF, rel=1e-10)

    def test_sign_changes_bracketed(self) -> None:
        # the dressed modulus changes sign three times below delta_eta = 10
        assert modulation_ratio(2.70) > 0.0 > modulation_ratio(2.80)
        assert modulation_ratio(5.30) < 0.0 < modulation_ratio(5.40)
        assert modulation_ratio(9.00) > 0.0 > modulation_ratio(9.05)

    def test_positive_window_between_second_and_third_change(self) -> None:
        for de in (5.4, 6.0, 7.0, 8.0, 8.9):
            assert modulation_ratio(de) > 0.0

    def test_never_exceeds_undriven_modulus(self) -> None:
        for i in range(1, 21):
            assert modulation_ratio(0.5 * i) <= 1.0 + 1e-12

    def test_negative_gradient_rejected(self) -> None:
        with pytest.raises(ConfigError):
            modulation_ratio(-0.1)


class TestDriveConfig:
    def test_validation(self) -> None:
        with pytest.raises(ConfigError):
            DriveConfig(omega_d=0.0, delta_eta=1.0)
        with pytest.raises(ConfigError):
            DriveConfig(omega_d=1.0e6, delta_eta=-1.0)


class TestDressedParams:
    def test_luttinger_parameter_frozen(self, reference_chain, reference_drive) -> None:
        dp = dressed_params(reference_chain, reference_drive)
        assert dp.K == pytest.approx(K_DRESSED_REF, rel=1e-10)

    def test_scaling_identities(self, reference_chain, reference_lw, reference_drive) -> None:
        dp = dressed_params(reference_chain, reference_drive)
        lw = reference_lw
        ratio = modulation_ratio(reference_drive.delta_eta)
        assert dp.mu_r == pytest.approx(lw.mu_r * ratio, rel=1e-13)
        assert dp.c_t == pytest.approx(lw.c_t * math.sqrt(ratio), rel=1e-13)
        assert dp.K == pytest.approx(lw.K * math.sqrt(ratio), rel=1e-13)
        assert dp.xi_0 == pytest.approx(dp.c_t / lw.omega_zz, rel=1e-14)
        # local quantities are untouched by the drive
        assert dp.omega_zz == lw.omega_zz
        assert dp.cutoff == pytest.approx(lw.cutoff, rel=1e-15)

    def test_quantum_parameters_from_dressed_stiffness(
        self, reference_chain, reference_drive
    ) -> None:
        ch = reference_chain
        dp = dressed_params(ch, reference_drive)
        a = ch.bulk_spacing_a
        assert dp.K == pytest.approx(
            ch.species.mass_kg * a * dp.c_t / HBAR, rel=1e-14
        )
        ell_over_a3 = (ch.length_scale_l / a) ** 3
        assert dp.hbar_eff == pytest.approx(math.sqrt(ell_over_a3 * LOG2) / dp.K, rel=1e-14)
        assert dp.lambda0_nat == pytest.approx(
            279.0 * ZETA5 / (2.0 * LOG2 * a**2 * dp.K), rel=1e-14
        )

    def test_shear_modulus_shortcut_agrees(self, reference_chain, reference_drive) -> None:
        dp = dressed_params(reference_chain, reference_drive)
        assert dressed_shear_modulus(reference_chain, reference_drive) == pytest.approx(
            dp.mu_r, rel=1e-14
        )

    def test_band_inversion_rejected(self, reference_chain) -> None:
        drive = DriveConfig(omega_d=TWO_PI * 7.5e6, delta_eta=3.5)
        with pytest.raises(PhysicsDomainError, match="band inversion"):
            dressed_params(reference_chain, drive)

    def test_parametric_resonance_rejected(self, reference_chain) -> None:
        drive = DriveConfig(omega_d=reference_chain.trap.omega_z, delta_eta=1.0)
        with pytest.raises(PhysicsDomainError, match="parametric resonance"):
            dressed_params(reference_chain, drive)
        with pytest.raises(PhysicsDomainError, match="parametric resonance"):
            dressed_shear_modulus(reference_chain, drive)


def test_drive_validity_ratio_formula(reference_chain, reference_drive) -> None:
    ch = reference_chain
    expected = ch.species.coulomb_const / ch.bulk_spacing_a**3 / (
        4.0 * ch.species.mass_kg * ch.trap.omega_z * reference_drive.omega_d
    )
    val = drive_validity_ratio(ch, reference_drive)
    assert val == pytest.approx(expected, rel=1e-14)
    assert val < 0.05
