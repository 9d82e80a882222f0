"""Spectral integrals of Xi: relative traces, von Neumann traces and Casimir energies.

For obstacles ``Omega x R^r`` the von Neumann trace of the relative operator
built from ``(Delta + m^2)^{s/2}`` is

    C(r, s) * int_m^inf lam (lam^2 - m^2)^{(r+s)/2 - 1} Xi(i lam) dlam,
    C(r, s) = -2^{1-r} pi^{-r/2} / (Gamma(-s/2) Gamma((r+s)/2)).

``r = 0`` gives the ordinary relative trace, where ``C(0, s)`` equals
``(s/pi) sin(pi s/2)``.  The Casimir energy is half the trace at ``s = 1``.

The integral is evaluated after substituting ``lam = sqrt(m^2 + u^2)``:

    int_0^inf u^{r+s-1} Xi(i sqrt(m^2 + u^2)) du,

which is bounded at u = 0 when r + s >= 1 and decays like
``exp(-2 d_min u)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import quadrature
from .errors import ConvergenceError, InvalidArgumentError, UnsupportedParameterError
from .geometry import ObstacleSet, min_separation
from .xi_det import XiFunction


@dataclass(frozen=True)
class QuadratureControls:
    rel_tol: float = 1e-10
    abs_tol: float = 0.0
    max_panels: int = 200
    safety_digits: float = 14.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidArgumentError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise InvalidArgumentError("abs_tol must be nonnegative")
        if self.max_panels < 1:
            raise InvalidArgumentError("max_panels must be positive")
        if not self.safety_digits > 0:
            raise InvalidArgumentError("safety_digits must be positive")


def gamma_pole(s: float) -> bool:
    """True when Gamma(-s/2) has a pole, i.e. s is a nonnegative even integer."""
    half = 0.5 * s
    return half >= 0 and half == math.floor(half)


@dataclass(frozen=True)
class ReductionSpec:
    m: float = 0.0
    r: int = 0
    s: float = 1.0
    controls: QuadratureControls = field(default_factory=QuadratureControls)

    def __post_init__(self):
        if not (self.m >= 0 and math.isfinite(self.m)):
            raise InvalidArgumentError(f"mass must be nonnegative, got {self.m}")
        if int(self.r) != self.r or self.r < 0:
            raise InvalidArgumentError(f"r must be a nonnegative integer, got {self.r}")
        object.__setattr__(self, "r", int(self.r))
        if not (self.s > 0 and math.isfinite(self.s)):
            raise InvalidArgumentError(f"s must be positive, got {self.s}")
        if self.r + self.s < 1:
            raise UnsupportedParameterError(
                f"r + s = {self.r + self.s} < 1 makes the substituted integrand unbounded at u=0")

    @property
    def vanishes(self):
        return gamma_pole(self.s)

    def to_dict(self):
        out = asdict(self)
        out["controls"] = asdict(self.controls)
        return out


@dataclass(frozen=True)
class ReductionResult:
    value: float
    abs_error: float
    evaluations: int
    lambda_max: float
    spec: ReductionSpec | None = None
    flags: tuple = ()
    failed: bool = False

    def scaled(self, factor):
        return ReductionResult(factor * self.value, abs(factor) * self.abs_error, self.evaluations,
                               self.lambda_max, self.spec, self.flags, self.failed)

    def to_record(self):
        return {
            "value": self.value,
            "abs_error": self.abs_error,
            "evaluations": self.evaluations,
            "lambda_max": self.lambda_max,
            "spec": None if self.spec is None else self.spec.to_dict(),
            "flags": list(self.flags),
            "failed": self.failed,
        }


def prefactor(r: int, s: float) -> float:
    """Constant C(r, s) in front of the spectral integral; 0.0 at the poles of Gamma(-s/2)."""
    if gamma_pole(s):
        return 0.0
    return -(2.0 ** (1 - r)) * math.pi ** (-0.5 * r) / (math.gamma(-0.5 * s) * math.gamma(0.5 * (r + s)))


def truncation_point(d_min: float, r: int, s: float, safety_digits: float = 14.0) -> float:
    """Upper limit u_max with ``x^k exp(-x) <= 10^-p`` for ``x = 2 d_min u`` and ``k = r+s-1``."""
    if not d_min > 0:
        raise InvalidArgumentError(f"d_min must be positive, got {d_min}")
    k = r + s - 1
    x0 = safety_digits * math.log(10.0)
    x = x0
    for _ in range(3):
        x = x0 + k * math.log(max(x, 1.0))
    return x / (2.0 * d_min)


def spectral_integral(xi, m: float, r: int, s: float, d_min: float,
                      controls: QuadratureControls | None = None, workers: int = 1) -> ReductionResult:
    """``int_m^inf lam (lam^2 - m^2)^{(r+s)/2-1} Xi(i lam) dlam`` for a callable ``xi(kappa)``."""
    spec = ReductionSpec(m, r, s, controls or QuadratureControls())
    controls = spec.controls
    u_max = truncation_point(d_min, r, s, controls.safety_digits)
    lambda_max = math.hypot(m, u_max)
    power = r + s - 1
    cache = {}

    def evaluate(kappas):
        todo = [k for k in dict.fromkeys(kappas) if k not in cache]
        if workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                vals = list(pool.map(xi, todo))
        else:
            vals = [xi(k) for k in todo]
        cache.update(zip(todo, (float(v) for v in vals)))
        return np.array([cache[k] for k in kappas])

    def integrand(u):
        kappas = [float(k) for k in np.hypot(m, u)]
        return u**power * evaluate(kappas)

    res = quadrature.integrate(integrand, 0.0, u_max, rel_tol=controls.rel_tol,
                               abs_tol=controls.abs_tol, max_panels=controls.max_panels)
    result = ReductionResult(res.value, res.abs_error, len(cache), lambda_max, spec,
                             failed=not res.converged)
    if not res.converged:
        raise ConvergenceError(
            f"spectral integral not converged within {controls.max_panels} panels "
            f"(estimate {res.value:.17g} +- {res.abs_error:.3g})",
            value=res.value, abs_error=res.abs_error, evaluations=len(cache), result=result)
    return result


def von_neumann_trace(obstacle_set: ObstacleSet, spec: ReductionSpec, nodes_per_curve: int = 64,
                      workers: int = 1) -> ReductionResult:
    """Trace per unit volume of the relative operator for ``Omega x R^r``; r = 0 is tr(D_s)."""
    const = prefactor(spec.r, spec.s)
    d_min = min_separation(obstacle_set) if len(obstacle_set) > 1 else math.inf
    if spec.vanishes:
        lam = math.hypot(spec.m, truncation_point(d_min, spec.r, spec.s, spec.controls.safety_digits)) \
            if math.isfinite(d_min) else math.inf
        return ReductionResult(0.0, 0.0, 0, lam, spec, flags=("gamma_pole",))
    if len(obstacle_set) == 1:
        return ReductionResult(0.0, 0.0, 0, math.inf, spec, flags=("single_obstacle",))
    xi = XiFunction(obstacle_set, nodes_per_curve)
    try:
        integral = spectral_integral(xi, spec.m, spec.r, spec.s, d_min, spec.controls, workers)
    except ConvergenceError as exc:
        best = exc.result.scaled(const)
        raise ConvergenceError(str(exc), best.value, best.abs_error, best.evaluations, best) from exc
    return integral.scaled(const)


def casimir_energy(obstacle_set: ObstacleSet, m: float = 0.0, r: int = 0, nodes_per_curve: int = 64,
                   controls: QuadratureControls | None = None, workers: int = 1) -> ReductionResult:
    """Casimir energy (per unit volume of R^r when r >= 1): half the s=1 trace."""
    spec = ReductionSpec(m, r, 1.0, controls or QuadratureControls())
    try:
        trace = von_neumann_trace(obstacle_set, spec, nodes_per_curve, workers)
    except ConvergenceError as exc:
        best = exc.result.scaled(0.5)
        raise ConvergenceError(str(exc), best.value, best.abs_error, best.evaluations, best) from exc
    return trace.scaled(0.5)
