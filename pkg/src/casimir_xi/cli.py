"""Command line front-end: ``casimir-xi {xi,energy,trace,sweep,validate}``.

Exit codes: 0 success, 1 numerical/convergence failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import oracles
from .boundary_ops import dump_matrix
from .config import RunConfig, load_config
from .errors import CasimirError, ConvergenceError, InvalidArgumentError, InvalidGeometryError
from .geometry import Curve2D, Obstacle, ObstacleSet, Point1D, min_separation
from .reduction import casimir_energy, von_neumann_trace
from .xi_det import xi_grid

log = logging.getLogger("casimir_xi")

EXIT_OK, EXIT_NUMERICAL, EXIT_INPUT = 0, 1, 2
SWEEP_PARAMETERS = ("separation", "mass", "s", "r", "nodes")
SEPARATION_ITERATIONS = 40


class UsageError(InvalidArgumentError):
    pass


def _fmt(x):
    return f"{x:.17g}"


def _out_dir(config: RunConfig | None, args) -> Path:
    if args.out is not None:
        path = Path(args.out)
    elif config is not None:
        path = Path(config.output["dir"])
    else:
        path = Path(".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path, record):
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# configuration edits used by sweeps


def with_separation(obstacle_set: ObstacleSet, gap: float) -> ObstacleSet:
    """Move the second of two obstacles along the line of centres so the boundary gap equals ``gap``."""
    if len(obstacle_set) != 2:
        raise UsageError("a separation sweep needs exactly two obstacles")
    if not gap > 0:
        raise InvalidGeometryError(f"separation must be positive, got {gap}")
    first, second = obstacle_set.obstacles
    if obstacle_set.dimension == 1:
        moved = Obstacle(second.label, Point1D(first.shape.position + gap))
        return ObstacleSet(1, (first, moved))
    direction = np.subtract(second.shape.center, first.shape.center)
    norm = float(np.hypot(*direction))
    if norm == 0:
        raise UsageError("obstacle centres coincide; separation direction undefined")
    direction = direction / norm

    def placed(t):
        shape: Curve2D = second.shape.transformed(shift=tuple(t * direction))
        return ObstacleSet(2, (first, Obstacle(second.label, shape)))

    # secant iteration on the gap as a function of the shift; exact in one step for circles
    t_prev, gap_prev = 0.0, min_separation(obstacle_set)
    t = gap - gap_prev
    for _ in range(SEPARATION_ITERATIONS):
        try:
            current = placed(t)
        except InvalidGeometryError:
            t = 0.5 * (t + t_prev)
            continue
        gap_now = min_separation(current)
        if abs(gap_now - gap) <= 1e-12 * gap:
            return current
        slope = (gap_now - gap_prev) / (t - t_prev) if t != t_prev else 1.0
        t_prev, gap_prev = t, gap_now
        t = t + (gap - gap_now) / (slope if slope > 0 else 1.0)
    raise InvalidGeometryError(f"could not place the obstacles at separation {gap}")


def sweep_rows(config: RunConfig, parameter: str, values, quantity: str | None = None, workers: int = 1):
    """Evaluate the energy (or trace) for each value of ``parameter``; rows keep input order."""
    if parameter not in SWEEP_PARAMETERS:
        raise UsageError(f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}")
    if quantity is None:
        quantity = "trace" if parameter == "s" else "energy"
    if quantity not in ("energy", "trace"):
        raise UsageError(f"quantity must be 'energy' or 'trace', got {quantity!r}")
    if quantity == "energy" and parameter == "s":
        raise UsageError("the energy is fixed at s=1; sweep s with --quantity trace")
    rows = []
    for value in values:
        obstacle_set, spec, nodes = config.obstacle_set, config.spec, config.nodes_per_curve
        if parameter == "separation":
            obstacle_set = with_separation(obstacle_set, float(value))
        elif parameter == "mass":
            spec = replace(spec, m=float(value))
        elif parameter == "s":
            spec = replace(spec, s=float(value))
        elif parameter == "r":
            if float(value) != int(float(value)):
                raise UsageError(f"r must be an integer, got {value}")
            spec = replace(spec, r=int(float(value)))
        elif parameter == "nodes":
            if float(value) != int(float(value)):
                raise UsageError(f"nodes must be an integer, got {value}")
            nodes = int(float(value))
        try:
            if quantity == "energy":
                res = casimir_energy(obstacle_set, spec.m, spec.r, nodes, spec.controls, workers)
            else:
                res = von_neumann_trace(obstacle_set, spec, nodes, workers)
        except ConvergenceError as exc:
            res = exc.result
        rows.append((float(value), res))
    return rows, quantity


# ---------------------------------------------------------------------------
# subcommands


def cmd_xi(config: RunConfig, args) -> int:
    if not config.kappa_grid:
        raise UsageError("the xi command needs numerics.kappa_grid in the config")
    out = _out_dir(config, args)
    on_system = None
    if args.dump_matrices:
        mat_dir = out / "matrices"
        mat_dir.mkdir(exist_ok=True)
        index = {k: i for i, k in enumerate(config.kappa_grid)}

        def on_system(system):
            dump_matrix(system, mat_dir / f"kappa_{index[system.kappa]:04d}.txt")

    samples = xi_grid(config.obstacle_set, config.kappa_grid, config.nodes_per_curve,
                      threads=args.threads, on_system=on_system)
    path = out / config.output["xi_csv"]
    samples.to_csv(path)
    log.info("wrote %s", path)
    return EXIT_OK


def _result_command(config: RunConfig, args, compute, filename) -> int:
    out = _out_dir(config, args)
    path = out / filename
    try:
        result = compute()
    except ConvergenceError as exc:
        _write_json(path, exc.result.to_record())
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write_json(path, result.to_record())
    print(_fmt(result.value))
    return EXIT_OK


def cmd_energy(config: RunConfig, args) -> int:
    spec = config.spec
    return _result_command(
        config, args,
        lambda: casimir_energy(config.obstacle_set, spec.m, spec.r, config.nodes_per_curve,
                               spec.controls, args.threads),
        config.output["energy_json"])


def cmd_trace(config: RunConfig, args) -> int:
    return _result_command(
        config, args,
        lambda: von_neumann_trace(config.obstacle_set, config.spec, config.nodes_per_curve, args.threads),
        config.output["trace_json"])


def cmd_sweep(config: RunConfig, args) -> int:
    rows, quantity = sweep_rows(config, args.param, args.values, args.quantity, args.threads)
    path = _out_dir(config, args) / config.output["sweep_csv"]
    with open(path, "w") as fh:
        fh.write(f"{args.param},{quantity},abs_error,evaluations,lambda_max,failed\n")
        for value, res in rows:
            fh.write(",".join([_fmt(value), _fmt(res.value), _fmt(res.abs_error), str(res.evaluations),
                               _fmt(res.lambda_max), str(int(res.failed))]) + "\n")
    return EXIT_NUMERICAL if any(res.failed for _, res in rows) else EXIT_OK


def format_report(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'residual':>10}  {'tolerance':>9}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.name:<{width}}  {r.residual:>10.3e}  {r.tolerance:>9.1e}  {status}"
        if not r.passed and r.detail:
            line += f"  ({r.detail})"
        lines.append(line)
    return "\n".join(lines)


def cmd_validate(args) -> int:
    results = oracles.validation_suite()
    print(format_report(results))
    if args.out is not None:
        path = _out_dir(None, args) / "validate.csv"
        with open(path, "w") as fh:
            fh.write("check,residual,tolerance,passed\n")
            for r in results:
                fh.write(f"{r.name},{_fmt(r.residual)},{_fmt(r.tolerance)},{int(r.passed)}\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    common.add_argument("--threads", type=int, default=1, help="parallel Xi evaluations")
    common.add_argument("--tolerance", type=float, help="relative quadrature tolerance")
    common.add_argument("--dump-matrices", action="store_true",
                        help="write assembled matrices (xi only), column-major plain text")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="casimir-xi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("xi", parents=[common], help="Xi(i kappa) on the configured kappa grid")
    sub.add_parser("energy", parents=[common], help="Casimir energy (per unit volume if r >= 1)")
    sub.add_parser("trace", parents=[common], help="relative / von Neumann trace for (m, r, s)")
    sweep = sub.add_parser("sweep", parents=[common], help="energy or trace over a parameter list")
    sweep.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    sweep.add_argument("--values", required=True, type=float, nargs="+")
    sweep.add_argument("--quantity", choices=("energy", "trace"))
    sub.add_parser("validate", parents=[common], help="run the oracle suite")
    return parser


COMMANDS = {"xi": cmd_xi, "energy": cmd_energy, "trace": cmd_trace, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        if args.tolerance is not None and not (args.tolerance > 0 and math.isfinite(args.tolerance)):
            raise UsageError("--tolerance must be positive")
        if args.command == "validate":
            return cmd_validate(args)
        if args.config is None:
            raise UsageError(f"the {args.command} command needs --config")
        config = load_config(args.config, args.tolerance)
        return COMMANDS[args.command](config, args)
    except InvalidGeometryError as exc:
        print(f"invalid geometry: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidArgumentError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CasimirError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
