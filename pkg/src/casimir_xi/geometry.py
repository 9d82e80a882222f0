"""Configurations of disjoint obstacles in one or two dimensions.

One-dimensional obstacles are single points (a pair of points times R^2 is a
pair of parallel plates).  Two-dimensional obstacles are closed curves given
by trigonometric polynomials, so coordinates and derivatives are exact at any
parameter value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidGeometryError

#: samples per curve used for separation, overlap and self-intersection checks
SEPARATION_SAMPLES = 512
#: Newton iterations used to refine the closest sampled pair of points
SEPARATION_NEWTON_STEPS = 20
#: obstacles closer than this fraction of the configuration diameter are rejected
OVERLAP_RTOL = 1e-9


def _as_coeffs(values, name):
    arr = tuple(float(v) for v in values)
    if not arr:
        raise InvalidGeometryError(f"{name} must contain at least one coefficient")
    if not all(math.isfinite(v) for v in arr):
        raise InvalidGeometryError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class Point1D:
    position: float

    def __post_init__(self):
        if not math.isfinite(self.position):
            raise InvalidGeometryError("point position must be finite")


@dataclass(frozen=True)
class Curve2D:
    """Closed curve ``x(t) = center + scale * (X(t), Y(t))`` for t in [0, 2pi).

    ``X(t) = sum_k x_cos[k] cos(kt) + x_sin[k] sin(kt)`` and likewise for Y.
    Index k is the harmonic; ``x_sin[0]``/``y_sin[0]`` are ignored.
    """

    x_cos: tuple
    x_sin: tuple
    y_cos: tuple
    y_sin: tuple
    center: tuple = (0.0, 0.0)
    scale: float = 1.0

    def __post_init__(self):
        for name in ("x_cos", "x_sin", "y_cos", "y_sin"):
            object.__setattr__(self, name, _as_coeffs(getattr(self, name), name))
        center = tuple(float(c) for c in self.center)
        if len(center) != 2 or not all(math.isfinite(c) for c in center):
            raise InvalidGeometryError("curve center must be a finite pair")
        object.__setattr__(self, "center", center)
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise InvalidGeometryError(f"curve scale must be positive, got {self.scale}")
        object.__setattr__(self, "scale", float(self.scale))

        t = sample_parameters(SEPARATION_SAMPLES)
        speed = self.speed(t)
        if np.min(speed) <= 1e-12 * max(np.max(speed), 1e-300):
            raise InvalidGeometryError("curve parameterization has vanishing speed")
        if _polygon_self_intersects(self.points(t)):
            raise InvalidGeometryError("curve is self-intersecting")

    @property
    def degree(self):
        return max(len(self.x_cos), len(self.x_sin), len(self.y_cos), len(self.y_sin)) - 1

    def _series(self, t, deriv):
        t = np.asarray(t, dtype=float)
        out = []
        for cos_c, sin_c in ((self.x_cos, self.x_sin), (self.y_cos, self.y_sin)):
            val = np.zeros_like(t)
            for k, a in enumerate(cos_c):
                val = val + a * _dcos(k, t, deriv)
            for k, b in enumerate(sin_c):
                if k:
                    val = val + b * _dsin(k, t, deriv)
            out.append(self.scale * val)
        return np.stack(out, axis=-1)

    def points(self, t):
        return self._series(t, 0) + np.asarray(self.center)

    def derivative(self, t, order=1):
        return self._series(t, order)

    def speed(self, t):
        """Arc-length element |x'(t)|."""
        d = self.derivative(t)
        return np.hypot(d[..., 0], d[..., 1])

    def transformed(self, rotation=None, shift=(0.0, 0.0), factor=1.0):
        """Apply ``x -> factor * (rotation @ x) + shift`` to the whole curve."""
        q = np.eye(2) if rotation is None else np.asarray(rotation, dtype=float)
        n = self.degree + 1

        def pad(c):
            return np.pad(np.asarray(c), (0, n - len(c)))

        cos_c = q @ np.vstack([pad(self.x_cos), pad(self.y_cos)])
        sin_c = q @ np.vstack([pad(self.x_sin), pad(self.y_sin)])
        center = factor * (q @ np.asarray(self.center)) + np.asarray(shift, dtype=float)
        return Curve2D(tuple(cos_c[0]), tuple(sin_c[0]), tuple(cos_c[1]), tuple(sin_c[1]),
                       tuple(center), self.scale * factor)


def _dcos(k, t, deriv):
    if k == 0:
        return np.ones_like(t) if deriv == 0 else np.zeros_like(t)
    # d^p/dt^p cos(kt) = k^p cos(kt + p*pi/2)
    return k**deriv * np.cos(k * t + deriv * np.pi / 2)


def _dsin(k, t, deriv):
    return k**deriv * np.sin(k * t + deriv * np.pi / 2)


def sample_parameters(n):
    return 2.0 * np.pi * np.arange(n) / n


@dataclass(frozen=True)
class Obstacle:
    label: str
    shape: Point1D | Curve2D

    @property
    def dimension(self):
        return 1 if isinstance(self.shape, Point1D) else 2


def make_circle(center, radius, label="circle"):
    """Circle ``center + radius*(cos t, sin t)``; speed equals ``radius`` exactly."""
    if not (radius > 0 and math.isfinite(radius)):
        raise InvalidGeometryError(f"circle radius must be positive, got {radius}")
    curve = Curve2D((0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0), tuple(center), float(radius))
    return Obstacle(label, curve)


def make_fourier_curve(x_cos, x_sin, y_cos, y_sin, center=(0.0, 0.0), scale=1.0, label="curve"):
    return Obstacle(label, Curve2D(x_cos, x_sin, y_cos, y_sin, center, scale))


def _polygon_self_intersects(pts):
    a = pts
    b = np.roll(pts, -1, axis=0)
    n = len(a)
    # proper crossings of non-adjacent segments
    d1 = _orient(a[:, None], b[:, None], a[None, :])
    d2 = _orient(a[:, None], b[:, None], b[None, :])
    d3 = _orient(a[None, :], b[None, :], a[:, None])
    d4 = _orient(a[None, :], b[None, :], b[:, None])
    cross = (d1 * d2 < 0) & (d3 * d4 < 0)
    idx = np.arange(n)
    gap = np.abs(idx[:, None] - idx[None, :])
    adjacent = (gap <= 1) | (gap == n - 1)
    return bool(np.any(cross & ~adjacent))


def _orient(p, q, r):
    return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])


def _inside(polygon, pts):
    """Even-odd ray casting; True for points strictly inside the polygon."""
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    x0, y0 = polygon[:, 0][None, :], polygon[:, 1][None, :]
    x1, y1 = np.roll(polygon[:, 0], -1)[None, :], np.roll(polygon[:, 1], -1)[None, :]
    straddle = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    hits = straddle & (x < xc)
    return np.count_nonzero(hits, axis=1) % 2 == 1


def _curve_distance(c1, c2):
    """Minimum distance between two curves: dense sampling then Newton refinement."""
    t = sample_parameters(SEPARATION_SAMPLES)
    p1, p2 = c1.points(t), c2.points(t)
    dist = np.linalg.norm(p1[:, None, :] - p2[None, :, :], axis=-1)
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    best = float(dist[i, j])
    s, u = t[i], t[j]
    for _ in range(SEPARATION_NEWTON_STEPS):
        x, y = c1.points(s), c2.points(u)
        dx, dy = c1.derivative(s), c2.derivative(u)
        ddx, ddy = c1.derivative(s, 2), c2.derivative(u, 2)
        r = x - y
        g = np.array([r @ dx, -(r @ dy)])
        h = np.array([[dx @ dx + r @ ddx, -(dx @ dy)],
                      [-(dx @ dy), dy @ dy - r @ ddy]])
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            break
        s_new, u_new = s - step[0], u - step[1]
        d_new = float(np.linalg.norm(c1.points(s_new) - c2.points(u_new)))
        if not d_new < best:
            break
        s, u, best = s_new, u_new, d_new
    return best, p1, p2


@dataclass(frozen=True)
class ObstacleSet:
    """Ordered collection of pairwise disjoint obstacles of a common dimension."""

    dimension: int
    obstacles: tuple
    _dmin: float = field(default=math.nan, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise InvalidGeometryError(f"dimension must be 1 or 2, got {self.dimension}")
        obstacles = tuple(self.obstacles)
        if not obstacles:
            raise InvalidGeometryError("an obstacle set needs at least one obstacle")
        for ob in obstacles:
            if ob.dimension != self.dimension:
                raise InvalidGeometryError(f"obstacle {ob.label!r} is not {self.dimension}-dimensional")
        object.__setattr__(self, "obstacles", obstacles)
        if len(obstacles) >= 2:
            object.__setattr__(self, "_dmin", self._check_disjoint())

    def __len__(self):
        return len(self.obstacles)

    @property
    def labels(self):
        return [ob.label for ob in self.obstacles]

    def diameter(self):
        if self.dimension == 1:
            pos = [ob.shape.position for ob in self.obstacles]
            return max(pos) - min(pos)
        t = sample_parameters(SEPARATION_SAMPLES // 4)
        pts = np.concatenate([ob.shape.points(t) for ob in self.obstacles])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    def _check_disjoint(self):
        tol = OVERLAP_RTOL * max(self.diameter(), 1e-300)
        best = math.inf
        obs = self.obstacles
        for a in range(len(obs)):
            for b in range(a + 1, len(obs)):
                if self.dimension == 1:
                    dist = abs(obs[a].shape.position - obs[b].shape.position)
                else:
                    dist, pa, pb = _curve_distance(obs[a].shape, obs[b].shape)
                    if np.any(_inside(pa, pb)) or np.any(_inside(pb, pa)):
                        raise InvalidGeometryError(
                            f"obstacles {obs[a].label!r} and {obs[b].label!r} overlap")
                if dist <= tol:
                    raise InvalidGeometryError(
                        f"obstacles {obs[a].label!r} and {obs[b].label!r} touch or overlap "
                        f"(distance {dist:.3g})")
                best = min(best, dist)
        return best


def make_points_1d(positions: Sequence[float], labels=None) -> ObstacleSet:
    positions = [float(p) for p in positions]
    if len(positions) < 2:
        raise InvalidGeometryError("need at least two points")
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise InvalidGeometryError(f"point positions must be strictly increasing: {positions}")
    labels = labels or [f"P{i}" for i in range(len(positions))]
    return ObstacleSet(1, tuple(Obstacle(lab, Point1D(p)) for lab, p in zip(labels, positions)))


def make_set(obstacles) -> ObstacleSet:
    obstacles = tuple(obstacles)
    if not obstacles:
        raise InvalidGeometryError("an obstacle set needs at least one obstacle")
    return ObstacleSet(obstacles[0].dimension, obstacles)


def min_separation(obstacle_set: ObstacleSet) -> float:
    """Smallest boundary-to-boundary distance over all obstacle pairs.

    Curves are sampled at ``SEPARATION_SAMPLES`` points each and the closest
    sampled pair is polished with ``SEPARATION_NEWTON_STEPS`` Newton steps on
    the squared distance.
    """
    if len(obstacle_set) < 2:
        raise InvalidArgumentError("min_separation needs at least two obstacles")
    return obstacle_set._dmin


def _map_set(obstacle_set, point_map, curve_map):
    out = []
    for ob in obstacle_set.obstacles:
        if isinstance(ob.shape, Point1D):
            out.append(Obstacle(ob.label, Point1D(point_map(ob.shape.position))))
        else:
            out.append(Obstacle(ob.label, curve_map(ob.shape)))
    return ObstacleSet(obstacle_set.dimension, tuple(out))


def scale_set(obstacle_set: ObstacleSet, factor: float) -> ObstacleSet:
    if not (factor > 0 and math.isfinite(factor)):
        raise InvalidArgumentError(f"scale factor must be positive, got {factor}")
    if factor == 1.0:
        return obstacle_set
    return _map_set(obstacle_set, lambda p: factor * p, lambda c: c.transformed(factor=factor))


def translate_set(obstacle_set: ObstacleSet, shift) -> ObstacleSet:
    if obstacle_set.dimension == 1:
        s = float(np.ravel(shift)[0])
        return _map_set(obstacle_set, lambda p: p + s, None)
    return _map_set(obstacle_set, None, lambda c: c.transformed(shift=shift))


def rotate_set(obstacle_set: ObstacleSet, angle: float) -> ObstacleSet:
    """Rotate a planar configuration about the origin; mirror a 1D one if angle is pi."""
    if obstacle_set.dimension == 1:
        if math.isclose(math.cos(angle), -1.0):
            mirrored = [Obstacle(ob.label, Point1D(-ob.shape.position))
                        for ob in reversed(obstacle_set.obstacles)]
            return ObstacleSet(1, tuple(mirrored))
        return obstacle_set
    c, s = math.cos(angle), math.sin(angle)
    q = np.array([[c, -s], [s, c]])
    return _map_set(obstacle_set, None, lambda cv: cv.transformed(rotation=q))
