"""YAML run configuration: geometry, physics, numerics and output blocks.

See ``configs/example.yaml`` for an annotated example of every key.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import InvalidArgumentError, InvalidGeometryError
from .geometry import (Obstacle, ObstacleSet, Point1D, make_circle, make_fourier_curve,
                       make_set)
from .reduction import QuadratureControls, ReductionSpec


class ConfigError(InvalidArgumentError):
    pass


DEFAULT_OUTPUT = {
    "dir": "out",
    "xi_csv": "xi.csv",
    "energy_json": "energy.json",
    "trace_json": "trace.json",
    "sweep_csv": "sweep.csv",
    "validate_csv": "validate.csv",
}


@dataclass
class RunConfig:
    obstacle_set: ObstacleSet
    spec: ReductionSpec
    nodes_per_curve: int = 64
    kappa_grid: list | None = None
    output: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUT))
    raw: dict = field(default_factory=dict)


def _require(block, key, where):
    if not isinstance(block, dict) or key not in block:
        raise ConfigError(f"missing key '{key}' in {where}")
    return block[key]


def _number(value, where):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where} must be a number, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{where} must be finite")
    return out


def _obstacle(entry, index, dimension):
    where = f"geometry.obstacles[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{where} must be a mapping")
    kind = _require(entry, "type", where)
    label = str(entry.get("label", f"O{index}"))
    if kind == "point":
        if dimension != 1:
            raise ConfigError(f"{where}: points need dimension 1")
        return Obstacle(label, Point1D(_number(_require(entry, "position", where), where + ".position")))
    if dimension != 2:
        raise ConfigError(f"{where}: {kind} needs dimension 2")
    center = _require(entry, "center", where)
    if not isinstance(center, (list, tuple)) or len(center) != 2:
        raise ConfigError(f"{where}.center must be a pair")
    center = tuple(_number(c, where + ".center") for c in center)
    if kind == "circle":
        return make_circle(center, _number(_require(entry, "radius", where), where + ".radius"), label)
    if kind == "fourier_curve":
        coeffs = {}
        for key in ("x_cos", "x_sin", "y_cos", "y_sin"):
            vals = entry.get(key, [0.0])
            if not isinstance(vals, (list, tuple)):
                raise ConfigError(f"{where}.{key} must be a list")
            coeffs[key] = [_number(v, f"{where}.{key}") for v in vals]
        scale = _number(entry.get("scale", 1.0), where + ".scale")
        return make_fourier_curve(center=center, scale=scale, label=label, **coeffs)
    raise ConfigError(f"{where}: unknown obstacle type {kind!r} (point, circle, fourier_curve)")


def build_geometry(block) -> ObstacleSet:
    dimension = int(_number(_require(block, "dimension", "geometry"), "geometry.dimension"))
    if dimension not in (1, 2):
        raise ConfigError("geometry.dimension must be 1 or 2")
    entries = _require(block, "obstacles", "geometry")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("geometry.obstacles must be a non-empty list")
    obstacles = [_obstacle(e, i, dimension) for i, e in enumerate(entries)]
    if dimension == 1:
        positions = [ob.shape.position for ob in obstacles]
        if any(b <= a for a, b in zip(positions, positions[1:])):
            raise InvalidGeometryError(f"point positions must be strictly increasing: {positions}")
    return make_set(obstacles)


def kappa_grid(block):
    if block is None:
        return None
    if isinstance(block, list):
        return [_number(v, "numerics.kappa_grid") for v in block]
    if "values" in block:
        return [_number(v, "numerics.kappa_grid.values") for v in block["values"]]
    start = _number(_require(block, "start", "numerics.kappa_grid"), "kappa_grid.start")
    stop = _number(_require(block, "stop", "numerics.kappa_grid"), "kappa_grid.stop")
    num = int(_number(_require(block, "num", "numerics.kappa_grid"), "kappa_grid.num"))
    spacing = block.get("spacing", "linear")
    if num < 1:
        raise ConfigError("kappa_grid.num must be positive")
    if spacing == "linear":
        return [float(v) for v in np.linspace(start, stop, num)]
    if spacing == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError("log-spaced kappa grid needs positive bounds")
        return [float(v) for v in np.geomspace(start, stop, num)]
    raise ConfigError(f"kappa_grid.spacing must be 'linear' or 'log', got {spacing!r}")


def parse_config(data: dict, tolerance: float | None = None) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping with geometry/physics/numerics/output blocks")
    unknown = set(data) - {"geometry", "physics", "numerics", "output"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    obstacle_set = build_geometry(_require(data, "geometry", "config"))
    physics = data.get("physics") or {}
    numerics = data.get("numerics") or {}
    rel_tol = tolerance if tolerance is not None else numerics.get("tolerance", 1e-10)
    controls = QuadratureControls(
        rel_tol=_number(rel_tol, "numerics.tolerance"),
        max_panels=int(_number(numerics.get("max_panels", 200), "numerics.max_panels")),
        safety_digits=_number(numerics.get("safety_digits", 14), "numerics.safety_digits"),
    )
    r = _number(physics.get("r", 0), "physics.r")
    if r != int(r):
        raise ConfigError("physics.r must be an integer")
    spec = ReductionSpec(
        m=_number(physics.get("m", 0.0), "physics.m"),
        r=int(r),
        s=_number(physics.get("s", 1.0), "physics.s"),
        controls=controls,
    )
    nodes = numerics.get("nodes_per_curve", 64)
    if int(_number(nodes, "numerics.nodes_per_curve")) != nodes:
        raise ConfigError("numerics.nodes_per_curve must be an integer")
    output = dict(DEFAULT_OUTPUT)
    output.update(data.get("output") or {})
    return RunConfig(obstacle_set, spec, int(nodes), kappa_grid(numerics.get("kappa_grid")),
                     output, copy.deepcopy(data))


def load_config(path, tolerance: float | None = None) -> RunConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    return parse_config(data, tolerance)
