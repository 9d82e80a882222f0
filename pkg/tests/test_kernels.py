import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_xi import kernels
from casimir_xi.errors import BesselRangeError, InvalidArgumentError, SingularEvaluationError
from casimir_xi.oracles import k0_integral

ORDERS = [0, 1, 2, 5, 20, 50]
ARGS = [0.01, 0.1, 1.0, 7.5, 30.0, 100.0]


@pytest.mark.parametrize("n", ORDERS)
@pytest.mark.parametrize("z", ARGS)
def test_bessel_against_mpmath(n, z):
    assert kernels.bessel_i(n, z) == pytest.approx(float(mpmath.besseli(n, z)), rel=1e-12)
    assert kernels.bessel_k(n, z) == pytest.approx(float(mpmath.besselk(n, z)), rel=1e-12)


@pytest.mark.parametrize("z", [0.5, 1.0, 3.0, 12.0])
def test_k0_integral_representation(z):
    assert kernels.bessel_k(0, z) == pytest.approx(k0_integral(z), rel=1e-13)


@given(st.integers(0, 50), st.floats(0.05, 200.0))
def test_wronskian(n, z):
    lhs = kernels.bessel_i(n, z) * kernels.bessel_k(n + 1, z) + kernels.bessel_i(n + 1, z) * kernels.bessel_k(n, z)
    if math.isfinite(lhs) and lhs > 0:
        assert lhs * z == pytest.approx(1.0, rel=1e-11)


@given(st.integers(0, 80), st.floats(0.01, 500.0))
def test_scaled_product_identity(n, z):
    prod = kernels.bessel_ik_product(n, z)
    assert prod > 0
    if n:
        assert prod < 1.0 / (2 * n)
    assert prod == pytest.approx(kernels.bessel_i_scaled(n, z) * kernels.bessel_k_scaled(n, z), rel=1e-14)


@given(st.floats(0.01, 50.0))
def test_monotone_in_order(z):
    i_vals = kernels.bessel_i(np.arange(10), z)
    k_vals = kernels.bessel_k(np.arange(10), z)
    assert np.all(np.diff(i_vals) <= 0)
    assert np.all(np.diff(k_vals) >= 0)


def test_overflow_reported():
    with pytest.raises(BesselRangeError):
        kernels.bessel_i(0, 1000.0)
    with pytest.raises(BesselRangeError):
        kernels.bessel_k(200, 0.01)


@pytest.mark.parametrize("n, z", [(-1, 1.0), (1.5, 1.0), (201, 1.0), (0, 0.0), (0, -1.0)])
def test_bessel_domain(n, z):
    with pytest.raises(InvalidArgumentError):
        kernels.bessel_k(n, z)


def test_green_functions():
    assert kernels.green_imag(1, 2.0, 0.5) == pytest.approx(math.exp(-1.0) / 2.0, rel=1e-15)
    assert kernels.green_imag(1, 2.0, 0.0) == 0.5
    assert kernels.green_imag(2, 1.0, 1.0) == pytest.approx(float(mpmath.besselk(0, 1)) / (2 * math.pi), rel=1e-14)
    assert kernels.green_imag(3, 1.0, 2.0) == pytest.approx(math.exp(-2.0) / (8 * math.pi), rel=1e-15)


@pytest.mark.parametrize("d", [2, 3])
def test_green_singular_at_origin(d):
    with pytest.raises(SingularEvaluationError):
        kernels.green_imag(d, 1.0, 0.0)


@pytest.mark.parametrize("kappa", [0.0, -1.0, math.inf])
def test_green_bad_kappa(kappa):
    with pytest.raises(InvalidArgumentError):
        kernels.green_imag(2, kappa, 1.0)


@given(st.floats(0.01, 10.0), st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_green_decreasing(kappa, rho, extra):
    for d in (1, 2, 3):
        assert kernels.green_imag(d, kappa, rho + extra) < kernels.green_imag(d, kappa, rho)
