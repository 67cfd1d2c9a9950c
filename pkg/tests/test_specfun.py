import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from ionqft.errors import ConfigError, PhysicsDomainError
from ionqft.specfun import (
    ZETA3,
    ZETA5,
    bessel_j0,
    bessel_k,
    bessel_k_integral,
    polylog3_circle,
    zeta,
)

# reference values computed with 30-digit arbitrary-precision arithmetic
ZETA3_REF = 1.20205690315959429
ZETA5_REF = 1.03692775514336993
LI3_POINTS = {
    0.05: 1.19643721611608206,
    1.0: 0.448573007280017398,
    math.pi / 2: -0.112692834671211964,
    2.0: -0.467971472084971031,
    math.pi: -0.901542677369695714,
}
K0_POINTS = {
    0.1: 2.42706902470201661,
    1.0: 0.421024438240708333,
    10.0: 1.77800623161676518e-5,
    25.0: 3.46416156221311436e-12,
}
J0_FIRST_ZERO = 2.40482555769577277


def test_zeta_small_integers():
    assert zeta(3) == pytest.approx(ZETA3_REF, rel=1e-15)
    assert zeta(5) == pytest.approx(ZETA5_REF, rel=1e-15)
    assert zeta(2) == pytest.approx(math.pi**2 / 6.0, rel=1e-15)
    assert ZETA3 == pytest.approx(ZETA3_REF, rel=1e-15)
    assert ZETA5 == pytest.approx(ZETA5_REF, rel=1e-15)


def test_zeta_rejects_divergent_argument():
    with pytest.raises(ConfigError):
        zeta(1)


def test_polylog_reference_points():
    assert polylog3_circle(0.0) == pytest.approx(ZETA3_REF, abs=1e-15)
    for theta, want in LI3_POINTS.items():
        assert polylog3_circle(theta) == pytest.approx(want, rel=2e-15)


def test_polylog_zone_edge_is_alternating_series():
    # Re Li3(e^{i pi}) = -eta(3) = -3 zeta(3)/4
    assert polylog3_circle(math.pi) == pytest.approx(-0.75 * ZETA3_REF, rel=1e-15)


def test_polylog_vectorized_and_periodic():
    theta = np.linspace(-3.0 * math.pi, 3.0 * math.pi, 401)
    vals = polylog3_circle(theta)
    assert vals.shape == theta.shape
    shifted = polylog3_circle(theta + 2.0 * math.pi)
    np.testing.assert_allclose(shifted, vals, rtol=0.0, atol=5e-16)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-50.0, max_value=50.0))
def test_polylog_even_and_bounded(theta):
    val = polylog3_circle(theta)
    # even up to rounding in the 2 pi reduction
    assert val == pytest.approx(polylog3_circle(-theta), rel=1e-12, abs=1e-12)
    assert val <= ZETA3 + 1e-15
    assert val >= -ZETA3


def test_bessel_k0_reference_points():
    for u, want in K0_POINTS.items():
        assert bessel_k(0.0, u) == pytest.approx(want, rel=5e-14)


def test_bessel_k0_against_library_grid():
    u = np.geomspace(1e-3, 30.0, 40)
    ours = np.array([bessel_k(0.0, float(v)) for v in u])
    ref = scipy.special.k0(u)
    np.testing.assert_allclose(ours, ref, rtol=5e-13)


def test_bessel_k_half_closed_form():
    want = math.sqrt(math.pi / 2.0) * math.exp(-1.0)
    assert bessel_k(0.5, 1.0) == pytest.approx(want, rel=1e-13)
    assert bessel_k(0.5, 3.7) == pytest.approx(
        math.sqrt(math.pi / (2.0 * 3.7)) * math.exp(-3.7), rel=1e-13
    )


def test_bessel_k_integral_matches_k0():
    for u in (0.05, 0.7, 4.0):
        assert bessel_k_integral(0.0, u) == pytest.approx(
            scipy.special.k0(u), rel=1e-12
        )


def test_bessel_k_domain_errors():
    with pytest.raises(PhysicsDomainError):
        bessel_k(0.0, 0.0)
    with pytest.raises(PhysicsDomainError):
        bessel_k(0.0, -1.0)
    with pytest.raises(ConfigError):
        bessel_k(0.3, 1.0)


def test_bessel_j0_first_zero_and_vectorization():
    assert abs(bessel_j0(J0_FIRST_ZERO)) < 1e-15
    x = np.linspace(0.0, 20.0, 50)
    np.testing.assert_allclose(bessel_j0(x), scipy.special.j0(x), rtol=1e-14)
