import math

import numpy as np
import pytest

from fabry.errors import ValidationError
from fabry.fourier_core import evaluate
from fabry.kernels import (
    NegativityCertificate,
    certify_negativity,
    claim_poly,
    claim_poly_closed,
    denominator_inequality_check,
    fejer,
    fejer_closed,
    g_closed,
    g_kernel,
    g_sandwich,
)


def fejer_as_squared_dirichlet(N, theta):
    # |sum_{j<N} e^{ij theta}|^2 / N, an independent route to the closed form
    z = np.exp(1j * np.outer(theta, np.arange(N)))
    return np.abs(z.sum(axis=1)) ** 2 / N


def test_fejer_small_cases():
    np.testing.assert_array_equal(fejer(1).coeffs, [1.0])
    np.testing.assert_allclose(fejer(2).coeffs, [0.5, 1.0, 0.5])
    assert evaluate(fejer(2), 0.0).real == pytest.approx(2.0)


def test_fejer_closed_form_cross_check():
    assert evaluate(fejer(8), 0.7).real == pytest.approx(float(fejer_closed(8, 0.7)), abs=1e-12)
    theta = np.linspace(-3, 3, 41)
    np.testing.assert_allclose(fejer_closed(13, theta), fejer_as_squared_dirichlet(13, theta), atol=1e-12)
    assert float(fejer_closed(9, 0.0)) == pytest.approx(9.0)
    assert float(fejer_closed(9, 2 * math.pi)) == pytest.approx(9.0)


def test_g_kernel_coefficients():
    np.testing.assert_allclose(g_kernel(1).coeffs, [2.0])
    assert g_kernel(8).coefficient(4).real == pytest.approx(math.sqrt(2) / 2, abs=1e-15)


def test_g_is_shifted_fejer_sum():
    N = 11
    theta = np.linspace(-3, 3, 57)
    shift = math.pi / (2 * N)
    ref = fejer_as_squared_dirichlet(N, theta + shift) + fejer_as_squared_dirichlet(N, theta - shift)
    np.testing.assert_allclose(evaluate(g_kernel(N), theta).real, ref, atol=1e-12)
    np.testing.assert_allclose(g_closed(N, theta), ref, atol=1e-11)


def test_g_sandwich_encloses_g():
    N = 16
    theta = np.linspace(0.3, math.pi, 300)
    lo, hi = g_sandwich(N, theta)
    g = g_closed(N, theta)
    assert np.all(lo <= g * (1 + 1e-12)) and np.all(g <= hi * (1 + 1e-12))


def test_claim_poly_values():
    for N in range(2, 8):
        np.testing.assert_array_equal(claim_poly(N).coeffs, [0.5, 0.0, 0.5])
    P = claim_poly(8)
    assert P.coefficient(0) == 0.0
    c1 = 1.75 * math.cos(math.pi / 16) - 1.0 * math.cos(math.pi / 4)
    assert P.coefficient(1).real == pytest.approx(c1, abs=1e-15)
    # 1.7164 is the G_8 term alone; G_2 removes cos(pi/4)
    assert g_kernel(8).coefficient(1).real == pytest.approx(1.7164, abs=1e-4)
    assert c1 == pytest.approx(1.0093, abs=1e-4)
    theta = np.linspace(-3, 3, 31)
    np.testing.assert_allclose(evaluate(P, theta).real, claim_poly_closed(8, theta), atol=1e-11)


@pytest.mark.parametrize("N", [2, 3, 5, 8, 9, 16, 31, 64, 100, 256])
def test_claim_poly_shape_and_sign(N):
    P = claim_poly(N)
    assert P.is_symmetric_nonnegative()
    assert P.effective_degree <= N - 1
    cert = certify_negativity(N)
    assert cert.certified
    if 4 * math.pi / N < math.pi:
        theta = np.linspace(4 * math.pi / N, math.pi, 5000)
        assert np.max(claim_poly_closed(N, theta)) < 0
        assert np.min(-claim_poly_closed(N, theta)) >= cert.certified_lower_bound


def test_certificate_vacuous_case():
    cert = certify_negativity(4)
    assert cert.vacuous and cert.certified and cert.region is None


def test_certificate_fields_and_round_trip():
    cert = certify_negativity(32)
    assert cert.grid_points == 64 * 32
    assert cert.margin > 0 and cert.certified_lower_bound <= cert.margin
    assert NegativityCertificate.from_dict(cert.to_dict()) == cert


def test_certificate_grid_floor():
    with pytest.raises(ValidationError):
        certify_negativity(16, grid_points=100)


def test_denominator_examples():
    N = 8
    C_end = 2 * min(math.sin(math.pi / 2 - math.pi / 32), math.sin(math.pi / 2 + math.pi / 32))
    assert C_end > 1.0
    chk = denominator_inequality_check(N, 10)
    assert chk.holds and chk.chain_holds and chk.min_slack > 0
    assert denominator_inequality_check(128).min_slack > 0
    with pytest.raises(ValidationError):
        denominator_inequality_check(7)
