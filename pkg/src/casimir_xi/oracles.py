"""Independent analytic references for Xi and the spectral integrals.

* two points in R: ``Xi(i kappa) = log(1 - exp(-2 kappa a))``
* two disjoint circles: multipole (angular Fourier) representation of the
  single-layer operators, coupled through Graf's addition theorem
* the transverse integral
  ``int_{R^r} (A + xi^2)^{s/2} dxi = pi^{r/2} Gamma(-(s+r)/2)/Gamma(-s/2) A^{(r+s)/2}``
  checked against direct quadrature

``validation_suite`` bundles these with the library's own pipeline into the
pass/fail table used by ``casimir-xi validate``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import kernels
from .errors import CasimirError, InvalidArgumentError, InvalidGeometryError


class TruncationError(CasimirError, ArithmeticError):
    """The multipole series is not converged at the requested order; increase m_max."""


def xi_1d(a: float, kappa: float) -> float:
    """``log(1 - exp(-2 kappa a))`` for two points at distance ``a``."""
    if not a > 0:
        raise InvalidArgumentError(f"separation must be positive, got {a}")
    if not kappa > 0:
        raise InvalidArgumentError(f"kappa must be positive, got {kappa}")
    x = 2.0 * kappa * a
    if x < math.log(2.0):
        return math.log(-math.expm1(-x))
    return math.log1p(-math.exp(-x))


def two_circle_coupling(r1, r2, d, kappa, m_max):
    """Normalized coupling ``U`` between the angular modes -m_max..m_max of two circles.

    With circle 2 centred at ``c1 + d e_x``, a density ``exp(i n tau)`` on
    circle 2 produces ``R2 I_n(kR2) sum_m (-1)^n K_{n-m}(kd) I_m(k r1) exp(i m theta1)``
    near circle 1.  Normalizing by the single-layer eigenvalues
    ``R I_m(kR) K_m(kR)`` in the arc-length-orthonormal bases gives
    ``U[m, n] = (-1)^n K_{n-m}(kd) sqrt(I_m/K_m (kR1)) sqrt(I_n/K_n (kR2))``,
    and the reverse coupling is ``U.T``.
    """
    m = np.arange(-m_max, m_max + 1)
    am = np.abs(m)
    x1, x2, xd = kappa * r1, kappa * r2, kappa * d
    ratio1 = np.sqrt(kernels.bessel_i_scaled(am, x1) / kernels.bessel_k_scaled(am, x1))
    ratio2 = np.sqrt(kernels.bessel_i_scaled(am, x2) / kernels.bessel_k_scaled(am, x2))
    order = np.abs(m[None, :] - m[:, None])
    kd = kernels.bessel_k_scaled(order, xd)
    sign = np.where(m % 2 == 0, 1.0, -1.0)
    # exponential factors exp(x1) exp(x2) exp(-xd) from the scaled functions, combined once
    return kd * sign[None, :] * ratio1[:, None] * ratio2[None, :] * math.exp(x1 + x2 - xd)


def _xi_from_coupling(u):
    sv = np.linalg.svd(u, compute_uv=False)
    return math.fsum(np.log1p(-sv**2))


def xi_two_circles_detail(r1, r2, d, kappa, m_max=30, rtol=1e-10):
    """(Xi, truncation estimate) for two circles with center distance ``d``.

    The truncation estimate is the change in Xi caused by the last retained
    mode pair (order m_max versus m_max - 1).
    """
    if not (r1 > 0 and r2 > 0):
        raise InvalidGeometryError("radii must be positive")
    if not d > r1 + r2:
        raise InvalidGeometryError(f"circles overlap: d={d} <= R1+R2={r1 + r2}")
    if not kappa > 0:
        raise InvalidArgumentError(f"kappa must be positive, got {kappa}")
    if int(m_max) != m_max or m_max < 5:
        raise InvalidArgumentError(f"m_max must be an integer >= 5, got {m_max}")
    if 2 * m_max > kernels.MAX_ORDER:
        raise InvalidArgumentError(f"m_max must be <= {kernels.MAX_ORDER // 2}")
    u = two_circle_coupling(r1, r2, d, kappa, int(m_max))
    value = _xi_from_coupling(u)
    inner = _xi_from_coupling(u[1:-1, 1:-1])
    estimate = abs(value - inner)
    if estimate > rtol * abs(value) and estimate > 1e-300:
        raise TruncationError(
            f"multipole truncation estimate {estimate:.3g} exceeds rtol*|Xi| at m_max={m_max}; "
            "increase m_max")
    return value, estimate


def xi_two_circles(r1, r2, d, kappa, m_max=30, rtol=1e-10) -> float:
    return xi_two_circles_detail(r1, r2, d, kappa, m_max, rtol)[0]


def xi_integral_identity_check(r: int, s: float, lam: float, m: float = 0.0):
    """(quadrature, closed form) for ``int_{R^r} (lam^2 + m^2 + xi^2)^{s/2} dxi``, r in {1, 2}."""
    if r not in (1, 2):
        raise InvalidArgumentError(f"r must be 1 or 2, got {r}")
    if not s < -r:
        raise InvalidArgumentError(f"the integral diverges unless s < -r (s={s}, r={r})")
    big_a = lam * lam + m * m
    if not big_a > 0:
        raise InvalidArgumentError("lam^2 + m^2 must be positive")

    if r == 1:
        def f(x):
            return 2.0 * (big_a + x * x) ** (0.5 * s)
    else:
        def f(x):
            return 2.0 * math.pi * x * (big_a + x * x) ** (0.5 * s)
    # split at sqrt(A) where the integrand changes from flat to algebraic decay
    knee = math.sqrt(big_a)
    head, _ = integrate.quad(f, 0.0, knee, epsabs=0.0, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(f, knee, math.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    lhs = head + tail
    rhs = (math.pi ** (0.5 * r) * math.gamma(-0.5 * (s + r)) / math.gamma(-0.5 * s)
           * big_a ** (0.5 * (r + s)))
    return lhs, rhs


def k0_integral(z: float) -> float:
    """``K_0(z) = int_0^inf exp(-z cosh t) dt`` by adaptive quadrature."""
    upper = math.acosh(max(800.0 / z, 1.0)) + 1.0
    val, _ = integrate.quad(lambda t: math.exp(-z * math.cosh(t)), 0.0, upper,
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return val


# ---------------------------------------------------------------------------
# validation suite


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def check_bessel_wronskian():
    worst = 0.0
    for z in (0.1, 1.0, 10.0, 100.0):
        for n in range(51):
            lhs = (kernels.bessel_i(n, z) * kernels.bessel_k(n + 1, z)
                   + kernels.bessel_i(n + 1, z) * kernels.bessel_k(n, z))
            worst = max(worst, abs(lhs * z - 1.0))
    return CheckResult("bessel_wronskian", worst, 1e-12, "n=0..50, z in {0.1,1,10,100}")


def check_bessel_k0_integral():
    worst = max(_rel(kernels.bessel_k(0, z), k0_integral(z)) for z in (0.5, 1.0, 3.0))
    return CheckResult("bessel_k0_integral", worst, 1e-13, "K_0 vs int exp(-z cosh t) dt")


def check_circle_eigenvalues():
    from .boundary_ops import assemble, build_mesh, circle_eigenvalues
    from .geometry import make_circle, make_set

    worst = 0.0
    for kappa in (0.5, 1.0, 4.0):
        system = assemble(build_mesh(make_set([make_circle((0.0, 0.0), 1.0)]), 64), kappa)
        ev = np.sort(np.linalg.eigvalsh(system.matrix))[::-1]
        exact = circle_eigenvalues(1.0, kappa, 8)
        # mode m >= 1 appears twice
        expected = np.concatenate([[exact[0]], np.repeat(exact[1:], 2)])
        worst = max(worst, float(np.max(np.abs(ev[:len(expected)] - expected))))
    return CheckResult("circle_eigenvalues", worst, 1e-10, "unit circle, 64 nodes, modes 0..8")


def check_xi_1d():
    from .boundary_ops import assemble, build_mesh
    from .geometry import make_points_1d
    from .xi_det import xi_value

    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        mesh = build_mesh(make_points_1d([0.0, a]))
        for kappa in (0.1, 1.0, 3.0):
            worst = max(worst, _rel(xi_value(assemble(mesh, kappa)), xi_1d(a, kappa)))
    return CheckResult("xi_1d_closed_form", worst, 1e-14, "two points, matrix route vs closed form")


def check_two_circles(nodes=128, m_max=30):
    from .geometry import make_circle, make_set
    from .xi_det import XiFunction

    xi = XiFunction(make_set([make_circle((0.0, 0.0), 1.0, "A"), make_circle((4.0, 0.0), 1.0, "B")]), nodes)
    worst = max(_rel(xi(k), xi_two_circles(1.0, 1.0, 4.0, k, m_max)) for k in (0.2, 0.5, 1.0, 2.0, 5.0))
    return CheckResult("two_circle_cross_validation", worst, 1e-6,
                       f"R1=R2=1, d=4, {nodes} nodes vs m_max={m_max}")


def check_integral_identity():
    worst = 0.0
    for r, s in ((1, -4.0), (2, -5.0)):
        for lam in (0.5, 1.0, 2.0):
            for m in (0.0, 1.0):
                lhs, rhs = xi_integral_identity_check(r, s, lam, m)
                worst = max(worst, _rel(lhs, rhs))
    return CheckResult("xi_integral_identity", worst, 1e-8, "(r,s) in {(1,-4),(2,-5)}")


def check_prefactor_r0():
    from .reduction import prefactor

    worst = max(abs(prefactor(0, s) - s / math.pi * math.sin(0.5 * math.pi * s))
                for s in (0.25, 0.5, 1.0, 1.5, 1.75))
    return CheckResult("prefactor_r0_consistency", worst, 1e-13, "C(0,s) vs (s/pi) sin(pi s/2)")


def check_plate_benchmark():
    from .geometry import make_points_1d
    from .reduction import casimir_energy

    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        energy = casimir_energy(make_points_1d([0.0, a]), m=0.0, r=2).value
        worst = max(worst, _rel(energy, -math.pi**2 / (1440.0 * a**3)))
    return CheckResult("plate_benchmark", worst, 1e-8, "E = -pi^2/(1440 a^3), a in {0.5,1,2}")


CHECKS = (
    check_bessel_wronskian,
    check_bessel_k0_integral,
    check_circle_eigenvalues,
    check_xi_1d,
    check_two_circles,
    check_integral_identity,
    check_prefactor_r0,
    check_plate_benchmark,
)


def validation_suite():
    """Run every oracle check; exceptions become failed entries rather than aborting the suite."""
    results = []
    for check in CHECKS:
        try:
            results.append(check())
        except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
            name = check.__name__.removeprefix("check_")
            results.append(CheckResult(name, math.inf, 0.0, f"error: {exc}"))
    return results
