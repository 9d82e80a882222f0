"""Discretized single-layer operators on the obstacle boundaries.

For point obstacles (d=1) the single-layer operator is just the matrix of
Green's function values between the points.

For curves (d=2) each boundary carries 2n equispaced parameter nodes.  The
operator is symmetrized with the arc-length weights, ``A = W^{1/2} N W^{-1/2}``
where N is the Nystrom matrix, so ``det`` is unchanged.  Self-interaction
blocks use Kress' product rule for the logarithmic singularity,

    K(t, tau) = K1(t, tau) * log(4 sin^2((t - tau)/2)) + K2(t, tau),
    K1 = -I_0(kappa*rho) |x'(tau)| / (4 pi),

and interaction blocks use the trapezoidal rule.

Two modifications keep this usable once kappa*R is more than a few units.

* ``K1`` grows like ``I_0(kappa*rho)`` while K decays like ``K_0``, so the
  split pair cancels catastrophically far from the diagonal.  K1 is
  multiplied by the taper ``chi(z) = erfc((z - TAPER_CENTER)/TAPER_WIDTH)/2``
  with ``z = kappa*rho``.  The taper equals 1 to double precision near the
  diagonal, so K2 keeps only a negligible logarithmic remainder, and it is
  analytic, so the rules keep their spectral convergence.
* The split pair aliases into the highest discrete Fourier modes, which
  destroys positive definiteness.  The rules are therefore applied on an
  oversampled grid and the result is restricted (Galerkin) to the
  trigonometric polynomials of the requested degree, which the oversampled
  rule integrates accurately.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import kernels
from .errors import AssemblyError, InvalidArgumentError
from .geometry import Curve2D, ObstacleSet

MIN_NODES = 8
TAPER_CENTER = 7.5
TAPER_WIDTH = 1.25
# fine-grid samples per taper width along the curve
TAPER_SAMPLES = 4.0


@dataclass(frozen=True)
class BoundaryMesh:
    obstacle_set: ObstacleSet
    nodes_per_curve: int
    params: tuple
    points: tuple
    speeds: tuple

    @property
    def dimension(self):
        return self.obstacle_set.dimension

    @property
    def counts(self):
        return tuple(len(p) for p in self.params)

    @property
    def size(self):
        return sum(self.counts)


def build_mesh(obstacle_set: ObstacleSet, nodes_per_curve: int = 64) -> BoundaryMesh:
    """Uniform parameter grid on every boundary component.

    ``nodes_per_curve`` must be even and at least 8 for curves; it is ignored
    for point obstacles, which get a single node each.
    """
    if obstacle_set.dimension == 1:
        params, points, speeds = [], [], []
        for ob in obstacle_set.obstacles:
            params.append(np.zeros(1))
            points.append(np.array([ob.shape.position]))
            speeds.append(np.ones(1))
        return BoundaryMesh(obstacle_set, 1, tuple(params), tuple(points), tuple(speeds))

    if int(nodes_per_curve) != nodes_per_curve or nodes_per_curve % 2 or nodes_per_curve < MIN_NODES:
        raise InvalidArgumentError(
            f"nodes_per_curve must be an even integer >= {MIN_NODES}, got {nodes_per_curve}")
    n_nodes = int(nodes_per_curve)
    t = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    params, points, speeds = [], [], []
    for ob in obstacle_set.obstacles:
        params.append(t.copy())
        points.append(ob.shape.points(t))
        speeds.append(ob.shape.speed(t))
    return BoundaryMesh(obstacle_set, n_nodes, tuple(params), tuple(points), tuple(speeds))


@dataclass(frozen=True)
class LayerSystem:
    """Symmetric discretization of S (``matrix``) and of its block-diagonal part."""

    matrix: np.ndarray
    blocks: tuple
    offsets: tuple
    kappa: float
    mesh: BoundaryMesh
    fine_nodes: int = 0

    @property
    def obstacle_set(self):
        return self.mesh.obstacle_set

    @property
    def n_blocks(self):
        return len(self.blocks)

    def block_slice(self, j):
        return slice(self.offsets[j], self.offsets[j + 1])

    def off_block(self, i, j):
        return self.matrix[self.block_slice(i), self.block_slice(j)]

    @property
    def diagonal_matrix(self):
        out = np.zeros_like(self.matrix)
        for j, blk in enumerate(self.blocks):
            sl = self.block_slice(j)
            out[sl, sl] = blk
        return out


@functools.lru_cache(maxsize=32)
def kress_weights(n_nodes):
    """Matrix ``R[i, j]`` with ``sum_j R[i, j] f(t_j) ~ int log(4 sin^2((t_i - tau)/2)) f(tau) dtau``."""
    n = n_nodes // 2
    t = np.pi * np.arange(n_nodes) / n
    m = np.arange(1, n)
    r = -(2 * np.pi / n) * (np.cos(np.outer(t, m)) @ (1.0 / m)) - (np.pi / n**2) * np.cos(n * t)
    idx = (np.arange(n_nodes)[:, None] - np.arange(n_nodes)[None, :]) % n_nodes
    out = r[idx]
    out.setflags(write=False)
    return out


def _trig_basis(n_grid, n_modes):
    """Orthonormal real Fourier vectors on ``n_grid`` points for modes of an ``n_modes``-point grid."""
    t = 2.0 * np.pi * np.arange(n_grid) / n_grid
    half = n_modes // 2
    cols = [np.full(n_grid, 1.0 / math.sqrt(n_grid))]
    for m in range(1, half):
        cols.append(math.sqrt(2.0 / n_grid) * np.cos(m * t))
        cols.append(math.sqrt(2.0 / n_grid) * np.sin(m * t))
    top = np.cos(half * t)
    cols.append(top / np.linalg.norm(top))
    return np.stack(cols, axis=1)


@functools.lru_cache(maxsize=32)
def prolongation(n_coarse, n_fine):
    """Isometry mapping coarse-grid node values to trigonometric interpolants on the fine grid."""
    if n_fine == n_coarse:
        out = np.eye(n_coarse)
    else:
        out = _trig_basis(n_fine, n_coarse) @ _trig_basis(n_coarse, n_coarse).T
    out.setflags(write=False)
    return out


def oversampled_count(n_nodes, kappa, diameter, max_speed=None):
    """Fine-grid size resolving the split kernels on a curve of given diameter and maximal speed."""
    x = 0.5 * kappa * diameter
    extra = math.ceil(x + 6.0 * math.sqrt(x) + 16.0)
    n_fine = max(2 * n_nodes, n_nodes + 2 * extra)
    if max_speed is not None:
        n_fine = max(n_fine, math.ceil(2.0 * np.pi * TAPER_SAMPLES * kappa * max_speed / TAPER_WIDTH))
    # rounded up so that nearby kappas share cached fine-grid geometry
    return 16 * math.ceil(n_fine / 16)


@functools.lru_cache(maxsize=64)
def _curve_extent(curve: Curve2D):
    """(diameter, maximal speed) from a dense sample."""
    t = 2.0 * np.pi * np.arange(256) / 256
    pts = curve.points(t)
    diameter = float(np.max(np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)))
    return diameter, float(np.max(curve.speed(t)))


def log_coefficient(z):
    """Tapered logarithmic coefficient ``chi(z) I_0(z)`` of ``K_0(z)``, computed without overflow."""
    with np.errstate(divide="ignore"):
        log_chi = special.log_ndtr(-math.sqrt(2.0) * (z - TAPER_CENTER) / TAPER_WIDTH)
        return np.exp(np.log(special.i0e(z)) + z + log_chi)


def _distances(pts_a, pts_b):
    diff = pts_a[:, None, :] - pts_b[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


@functools.lru_cache(maxsize=64)
def _fine_curve(curve: Curve2D, n_fine):
    """kappa-independent data of one curve on the fine grid."""
    t = 2.0 * np.pi * np.arange(n_fine) / n_fine
    pts = curve.points(t)
    speed = curve.speed(t)
    rho = _distances(pts, pts)
    log_sin = np.log(4.0 * np.sin(0.5 * (t[:, None] - t[None, :])) ** 2 + np.eye(n_fine))
    for arr in (pts, speed, rho, log_sin):
        arr.setflags(write=False)
    return pts, speed, rho, log_sin


@functools.lru_cache(maxsize=64)
def _fine_pair(curve_a: Curve2D, curve_b: Curve2D, n_fine):
    rho = _distances(_fine_curve(curve_a, n_fine)[0], _fine_curve(curve_b, n_fine)[0])
    rho.setflags(write=False)
    return rho


def _check_finite(block, a, b):
    bad = np.argwhere(~np.isfinite(block))
    if len(bad):
        i, j = bad[0]
        raise AssemblyError(
            f"non-finite kernel value in block ({a}, {b}) at fine-grid entry ({i}, {j})")


def _self_block(curve, n_fine, kappa, scale):
    n = n_fine // 2
    _, speed, rho, log_sin = _fine_curve(curve, n_fine)
    k1 = -log_coefficient(kappa * rho) / (4.0 * np.pi)
    with np.errstate(divide="ignore"):
        full = kernels.k0(kappa * rho) / (2.0 * np.pi)
    k2 = full - k1 * log_sin
    np.fill_diagonal(k2, (-np.euler_gamma - np.log(0.5 * kappa * speed)) / (2.0 * np.pi))
    block = kress_weights(n_fine) * k1 + (np.pi / n) * k2
    root = np.sqrt(speed)
    return scale * (root[:, None] * block * root[None, :])


def _pair_block(curve_a, curve_b, n_fine, kappa, scale):
    n = n_fine // 2
    rho = _fine_pair(curve_a, curve_b, n_fine)
    speed_a = _fine_curve(curve_a, n_fine)[1]
    speed_b = _fine_curve(curve_b, n_fine)[1]
    block = (np.pi / n) * kernels.k0(kappa * rho) / (2.0 * np.pi)
    return scale * (np.sqrt(speed_a)[:, None] * block * np.sqrt(speed_b)[None, :])


def assemble(mesh: BoundaryMesh, kappa: float, kernel_scale: float = 1.0) -> LayerSystem:
    """Assemble the symmetric single-layer matrix at spectral parameter ``lambda = i*kappa``.

    ``kernel_scale`` multiplies every Green's function evaluation; Xi does not
    depend on it.
    """
    if not (kappa > 0 and math.isfinite(kappa)):
        raise InvalidArgumentError(f"kappa must be positive and finite, got {kappa}")
    counts = mesh.counts
    offsets = tuple(int(v) for v in np.concatenate([[0], np.cumsum(counts)]))
    size = offsets[-1]

    if mesh.dimension == 1:
        x = np.concatenate(mesh.points)
        with np.errstate(over="ignore", invalid="ignore"):
            matrix = kernel_scale * kernels.green_imag(1, kappa, np.abs(x[:, None] - x[None, :]))
        _check_finite(matrix, 0, 0)
        blocks = tuple(matrix[offsets[j]:offsets[j + 1], offsets[j]:offsets[j + 1]].copy()
                       for j in range(len(counts)))
        return LayerSystem(matrix, blocks, offsets, float(kappa), mesh, 1)

    curves = [ob.shape for ob in mesh.obstacle_set.obstacles]
    n_nodes = mesh.nodes_per_curve
    n_fine = max(oversampled_count(n_nodes, kappa, *_curve_extent(c)) for c in curves)
    p = prolongation(n_nodes, n_fine)

    matrix = np.empty((size, size))
    blocks = []
    for a in range(len(curves)):
        fine = _self_block(curves[a], n_fine, kappa, kernel_scale)
        _check_finite(fine, a, a)
        blk = p.T @ fine @ p
        blk = 0.5 * (blk + blk.T)
        blocks.append(blk)
        sa = slice(offsets[a], offsets[a + 1])
        matrix[sa, sa] = blk
        for b in range(a + 1, len(curves)):
            fine = _pair_block(curves[a], curves[b], n_fine, kappa, kernel_scale)
            _check_finite(fine, a, b)
            blk_ab = p.T @ fine @ p
            sb = slice(offsets[b], offsets[b + 1])
            matrix[sa, sb] = blk_ab
            matrix[sb, sa] = blk_ab.T
    return LayerSystem(matrix, tuple(blocks), offsets, float(kappa), mesh, n_fine)


def circle_eigenvalues(radius: float, kappa: float, m_max: int) -> np.ndarray:
    """Eigenvalues ``R I_m(kappa R) K_m(kappa R)``, m = 0..m_max, of S on a circle (m >= 1 doubly degenerate)."""
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")
    if not kappa > 0:
        raise InvalidArgumentError(f"kappa must be positive, got {kappa}")
    if m_max < 0 or int(m_max) != m_max:
        raise InvalidArgumentError(f"m_max must be a nonnegative integer, got {m_max}")
    m = np.arange(int(m_max) + 1)
    return radius * kernels.bessel_ik_product(m, kappa * radius)


def dump_matrix(system: LayerSystem, path) -> None:
    """Write ``system.matrix`` as plain text: header ``rows cols kappa`` then column-major values."""
    rows, cols = system.matrix.shape
    with open(path, "w") as fh:
        fh.write(f"{rows} {cols} {system.kappa!r}\n")
        for v in system.matrix.ravel(order="F"):
            fh.write(f"{v:.17g}\n")
