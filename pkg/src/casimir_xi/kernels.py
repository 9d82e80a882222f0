"""Free Green's functions at imaginary spectral parameter and modified Bessel functions.

With ``lambda = i*kappa`` the resolvent kernel of ``(Delta_0 - lambda^2)^{-1}``
is real and exponentially decaying:

* d=1: ``exp(-kappa*rho) / kappa``
* d=2: ``K_0(kappa*rho) / (2*pi)``
* d=3: ``exp(-kappa*rho) / (4*pi*rho)``

The 1D normalization follows ``-(1/(i lambda)) exp(i lambda |x-y|)`` at
``lambda = i kappa``; any constant factor cancels in Xi anyway.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import BesselRangeError, InvalidArgumentError, SingularEvaluationError

MAX_ORDER = 200


def _check_wavenumber(kappa):
    if not (kappa > 0 and math.isfinite(kappa)):
        raise InvalidArgumentError(f"wavenumber kappa must be positive and finite, got {kappa}")


def _check_bessel_args(n, z):
    n_arr = np.asarray(n)
    z_arr = np.asarray(z, dtype=float)
    if np.any(n_arr < 0) or np.any(n_arr > MAX_ORDER) or np.any(n_arr != np.floor(n_arr)):
        raise InvalidArgumentError(f"Bessel order must be an integer in [0, {MAX_ORDER}]")
    if np.any(~(z_arr > 0)):
        raise InvalidArgumentError("Bessel argument must be positive")
    return n_arr, z_arr


def _finish(value, name):
    if np.any(np.isinf(value)):
        raise BesselRangeError(f"{name} overflows double precision")
    if np.ndim(value) == 0:
        return float(value)
    return value


def bessel_i(n, z):
    """Modified Bessel function of the first kind ``I_n(z)`` for integer ``n >= 0``, ``z > 0``."""
    n_arr, z_arr = _check_bessel_args(n, z)
    with np.errstate(over="ignore"):
        return _finish(special.iv(n_arr, z_arr), "I_n(z)")


def bessel_k(n, z):
    """Modified Bessel function of the second kind ``K_n(z)`` for integer ``n >= 0``, ``z > 0``."""
    n_arr, z_arr = _check_bessel_args(n, z)
    with np.errstate(over="ignore"):
        return _finish(special.kv(n_arr, z_arr), "K_n(z)")


def bessel_ik_product(n, z):
    """``I_n(z) K_n(z)`` evaluated from exponentially scaled factors (no overflow)."""
    n_arr, z_arr = _check_bessel_args(n, z)
    value = special.ive(n_arr, z_arr) * special.kve(n_arr, z_arr)
    return float(value) if np.ndim(value) == 0 else value


def bessel_i_scaled(n, z):
    """``exp(-z) I_n(z)``."""
    n_arr, z_arr = _check_bessel_args(n, z)
    return _finish(special.ive(n_arr, z_arr), "exp(-z) I_n(z)")


def bessel_k_scaled(n, z):
    """``exp(z) K_n(z)``; overflows only for very large orders at small z."""
    n_arr, z_arr = _check_bessel_args(n, z)
    with np.errstate(over="ignore"):
        return _finish(special.kve(n_arr, z_arr), "exp(z) K_n(z)")


def green_imag(d, kappa, rho):
    """Free Green's function of ``(Delta_0 + kappa^2)^{-1}`` in dimension ``d`` at distance ``rho``."""
    _check_wavenumber(kappa)
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0):
        raise InvalidArgumentError("distance must be nonnegative")
    if d == 1:
        value = np.exp(-kappa * rho_arr) / kappa
    elif d in (2, 3):
        if np.any(rho_arr == 0):
            raise SingularEvaluationError(f"the d={d} Green's function is singular at rho=0")
        if d == 2:
            value = special.k0(kappa * rho_arr) / (2 * np.pi)
        else:
            value = np.exp(-kappa * rho_arr) / (4 * np.pi * rho_arr)
    else:
        raise InvalidArgumentError(f"dimension must be 1, 2 or 3, got {d}")
    return float(value) if np.ndim(value) == 0 else value


# Raw elementwise kernels for matrix assembly; inputs are pre-validated there.
k0 = special.k0
