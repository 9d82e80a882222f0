"""The interaction function Xi(i kappa) = log det(S S_diag^{-1}).

Each diagonal block ``S_jj = L_j L_j^T`` is Cholesky-factorized, which both
checks positive definiteness and whitens the system:
``det(S S_diag^{-1}) = det(I + W)`` with ``W_ij = L_i^{-1} S_ij L_j^{-T}`` and
zero diagonal blocks.  ``det(I + W)`` is then eliminated block by block.  The
Schur corrections stay separate from the identity and each block contributes
``sum(log1p(eig(correction)))``, so tiny interactions keep full relative
precision.  Subtracting two log-determinants of size O(n) would lose it.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from .boundary_ops import LayerSystem, assemble, build_mesh
from .errors import (CasimirError, FactorizationError, InvalidArgumentError,
                     NumericalBreakdownError)
from .geometry import ObstacleSet


def _cholesky_blocks(system: LayerSystem):
    factors = []
    for j, blk in enumerate(system.blocks):
        try:
            factors.append(linalg.cholesky(blk, lower=True, check_finite=True))
        except linalg.LinAlgError as exc:
            raise FactorizationError(
                f"diagonal block {j} ({system.obstacle_set.labels[j]!r}) is not positive "
                f"definite at kappa={system.kappa:g}; refine the mesh or separate the obstacles"
            ) from exc
    return factors


def whitened_coupling(system: LayerSystem, factors=None) -> np.ndarray:
    """``W = L^{-1} (S - S_diag) L^{-T}`` with ``L`` the block Cholesky factor of S_diag."""
    factors = factors if factors is not None else _cholesky_blocks(system)
    size = system.offsets[-1]
    w = np.zeros((size, size))
    nb = system.n_blocks
    for i in range(nb):
        si = system.block_slice(i)
        for j in range(i + 1, nb):
            sj = system.block_slice(j)
            tmp = linalg.solve_triangular(factors[i], system.off_block(i, j), lower=True)
            tmp = linalg.solve_triangular(factors[j], tmp.T, lower=True).T
            w[si, sj] = tmp
            w[sj, si] = tmp.T
    return w


def _log1p_det(correction, label):
    mu = linalg.eigvalsh(0.5 * (correction + correction.T))
    if np.any(1.0 + mu <= 0.0):
        raise NumericalBreakdownError(
            f"non-positive pivot in S while eliminating block {label} "
            f"(smallest eigenvalue {1.0 + mu.min():.3g}); S must be positive definite")
    return math.fsum(np.log1p(mu))


def xi_value(system: LayerSystem, method: str = "whitened") -> float:
    """Xi(i kappa) for an assembled system.

    ``method="whitened"`` (default) uses block elimination of the whitened
    system; ``method="difference"`` returns ``log det S - log det S_diag``
    from Cholesky pivots, which is exact in exact arithmetic but loses
    relative accuracy when |Xi| is tiny.
    """
    if system.n_blocks == 1:
        _cholesky_blocks(system)
        return 0.0
    if method == "difference":
        full, diag = logdet_pair(system)
        return full - diag
    if method != "whitened":
        raise InvalidArgumentError(f"unknown method {method!r}")

    factors = _cholesky_blocks(system)
    f = whitened_coupling(system, factors)
    labels = system.obstacle_set.labels
    terms = []
    nb = system.n_blocks
    for j in range(nb):
        sj = system.block_slice(j)
        corr = f[sj, sj]
        terms.append(_log1p_det(corr, labels[j]))
        if j == nb - 1:
            break
        rest = slice(system.offsets[j + 1], system.offsets[-1])
        pivot = np.eye(corr.shape[0]) + 0.5 * (corr + corr.T)
        try:
            cf = linalg.cho_factor(pivot, lower=True)
        except linalg.LinAlgError as exc:
            raise NumericalBreakdownError(f"pivot block {labels[j]} lost definiteness") from exc
        x = linalg.cho_solve(cf, f[sj, rest])
        f[rest, rest] -= f[rest, sj] @ x
    return math.fsum(terms)


def logdet_pair(system: LayerSystem):
    """``(log det S, log det S_diag)`` from Cholesky factorizations (sum of log pivots)."""
    factors = _cholesky_blocks(system)
    diag = math.fsum(2.0 * np.sum(np.log(np.diag(lf))) for lf in factors)
    try:
        full = linalg.cholesky(system.matrix, lower=True)
    except linalg.LinAlgError as exc:
        raise NumericalBreakdownError(
            f"negative pivot in S at kappa={system.kappa:g}; S must be positive definite") from exc
    return 2.0 * math.fsum(np.log(np.diag(full))), diag


def xi_schur(system: LayerSystem) -> float:
    """Two-obstacle route ``log det(I - S11^{-1} S12 S22^{-1} S21)`` via LU solves."""
    if system.n_blocks != 2:
        raise InvalidArgumentError("the Schur route needs exactly two obstacles")
    s11, s22 = system.blocks
    s12, s21 = system.off_block(0, 1), system.off_block(1, 0)
    m = linalg.solve(s11, s12) @ linalg.solve(s22, s21)
    sign, logdet = np.linalg.slogdet(np.eye(m.shape[0]) - m)
    if sign <= 0:
        raise NumericalBreakdownError("I - S11^-1 S12 S22^-1 S21 has non-positive determinant")
    return float(logdet)


def condition_estimate(system: LayerSystem) -> float:
    """1-norm condition number estimate of S (LAPACK ``pocon``)."""
    a = system.matrix
    anorm = float(np.max(np.sum(np.abs(a), axis=0)))
    c, info = lapack.dpotrf(a, lower=1)
    if info != 0:
        raise NumericalBreakdownError(f"negative pivot in S at kappa={system.kappa:g}")
    rcond, info = lapack.dpocon(c, anorm, uplo="L")
    return math.inf if rcond == 0 else 1.0 / rcond


@dataclass(frozen=True)
class XiSample:
    kappa: float
    xi: float
    cond_estimate: float


@dataclass(frozen=True)
class XiSamples:
    samples: tuple
    obstacle_set: ObstacleSet
    nodes_per_curve: int

    @property
    def kappas(self):
        return np.array([s.kappa for s in self.samples])

    @property
    def values(self):
        return np.array([s.xi for s in self.samples])

    def to_csv(self, path_or_file):
        lines = ["kappa,xi,cond_estimate"]
        lines += [f"{s.kappa:.17g},{s.xi:.17g},{s.cond_estimate:.17g}" for s in self.samples]
        text = "\n".join(lines) + "\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w") as fh:
                fh.write(text)


class XiFunction:
    """Callable ``kappa -> Xi(i kappa)`` for a fixed configuration and mesh, memoized per kappa."""

    def __init__(self, obstacle_set: ObstacleSet, nodes_per_curve: int = 64, on_system=None):
        self.mesh = build_mesh(obstacle_set, nodes_per_curve)
        self.obstacle_set = obstacle_set
        self.nodes_per_curve = nodes_per_curve
        self.on_system = on_system
        self.cache = {}

    def system(self, kappa):
        return assemble(self.mesh, kappa)

    def __call__(self, kappa):
        kappa = float(kappa)
        if kappa not in self.cache:
            if len(self.obstacle_set) == 1:
                self.cache[kappa] = 0.0
            else:
                system = self.system(kappa)
                if self.on_system is not None:
                    self.on_system(system)
                self.cache[kappa] = xi_value(system)
        return self.cache[kappa]


def _sample(mesh, kappa, on_system):
    try:
        system = assemble(mesh, kappa)
        if on_system is not None:
            on_system(system)
        return XiSample(float(kappa), xi_value(system), condition_estimate(system))
    except CasimirError as exc:
        raise type(exc)(f"at kappa={kappa!r}: {exc}") from exc


def xi_grid(obstacle_set: ObstacleSet, kappas, nodes_per_curve: int = 64, threads: int = 1,
            on_system=None) -> XiSamples:
    """Xi on a sorted grid of positive kappa values; output order equals input order."""
    kappas = [float(k) for k in kappas]
    if not kappas:
        raise InvalidArgumentError("kappa grid is empty")
    if any(not (k > 0 and math.isfinite(k)) for k in kappas):
        raise InvalidArgumentError("kappa grid must be strictly positive")
    if any(b < a for a, b in zip(kappas, kappas[1:])):
        raise InvalidArgumentError("kappa grid must be sorted")
    mesh = build_mesh(obstacle_set, nodes_per_curve)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(lambda k: _sample(mesh, k, on_system), kappas))
    else:
        samples = [_sample(mesh, k, on_system) for k in kappas]
    return XiSamples(tuple(samples), obstacle_set, mesh.nodes_per_curve)
