"""Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval."""
from __future__ import annotations

import heapq
import math

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError, NumericalBreakdownError

# Kronrod abscissae (positive half, descending) and weights; odd indices are the 7-point Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:15:2] = _WG[2::-1]


def panel_nodes(a, b):
    return 0.5 * (a + b) + 0.5 * (b - a) * NODES


def gauss_kronrod(values, a, b):
    """(Kronrod estimate, |Kronrod - Gauss|) for integrand values at ``panel_nodes(a, b)``."""
    half = 0.5 * (b - a)
    k15 = half * float(np.dot(KRONROD_WEIGHTS, values))
    g7 = half * float(np.dot(GAUSS_WEIGHTS, values))
    return k15, abs(k15 - g7)


class AdaptiveResult:
    __slots__ = ("value", "abs_error", "panels", "converged")

    def __init__(self, value, abs_error, panels, converged):
        self.value = value
        self.abs_error = abs_error
        self.panels = panels
        self.converged = converged


def integrate(f_batch, a, b, rel_tol=1e-10, abs_tol=0.0, max_panels=200):
    """Integrate ``f`` over ``[a, b]``; ``f_batch`` maps an array of nodes to values.

    The panel with the largest error estimate is bisected until the summed
    estimate is below ``max(abs_tol, rel_tol*|I|)``.  The integrand is never
    evaluated at the endpoints.  Panel contributions are summed with
    ``math.fsum`` in left-endpoint order, so the result does not depend on the
    evaluation schedule.
    """
    if not (b > a):
        raise InvalidArgumentError(f"need a < b, got [{a}, {b}]")
    if max_panels < 1:
        raise InvalidArgumentError("max_panels must be positive")

    def panel(lo, hi):
        vals = np.asarray(f_batch(panel_nodes(lo, hi)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NumericalBreakdownError(f"non-finite integrand on panel [{lo}, {hi}]")
        est, err = gauss_kronrod(vals, lo, hi)
        return (-err, lo, hi, est)

    heap = [panel(a, b)]
    while True:
        value = math.fsum(p[3] for p in sorted(heap, key=lambda p: p[1]))
        error = math.fsum(-p[0] for p in heap)
        if error <= max(abs_tol, rel_tol * abs(value)):
            return AdaptiveResult(value, error, len(heap), True)
        if len(heap) >= max_panels:
            return AdaptiveResult(value, error, len(heap), False)
        _, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            return AdaptiveResult(value, error, len(heap) + 1, False)
        heapq.heappush(heap, panel(lo, mid))
        heapq.heappush(heap, panel(mid, hi))


def integrate_or_raise(f_batch, a, b, **kwargs):
    res = integrate(f_batch, a, b, **kwargs)
    if not res.converged:
        raise ConvergenceError(
            f"adaptive quadrature stopped at {res.panels} panels with error estimate "
            f"{res.abs_error:.3g} (value {res.value:.17g})",
            value=res.value, abs_error=res.abs_error)
    return res
