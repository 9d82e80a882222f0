import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_xi import oracles
from casimir_xi.boundary_ops import LayerSystem, assemble, build_mesh
from casimir_xi.errors import FactorizationError, InvalidArgumentError, NumericalBreakdownError
from casimir_xi.geometry import (make_circle, make_points_1d, make_set, min_separation, rotate_set,
                                 scale_set, translate_set)
from casimir_xi.xi_det import (XiFunction, condition_estimate, logdet_pair, xi_grid, xi_schur,
                               xi_value)

from conftest import XI_TWO_CIRCLES_K1, corpus

NODES = 32


def xi_at(cfg, kappa, nodes=NODES, **kw):
    return xi_value(assemble(build_mesh(cfg, nodes), kappa, **kw))


def test_points_closed_form():
    assert xi_at(make_points_1d([0.0, 1.0]), 1.0) == pytest.approx(-0.14541345786885906, rel=1e-15)
    assert xi_at(make_points_1d([0.0, 1.0]), 1.0) == pytest.approx(math.log(1 - math.exp(-2)), rel=1e-14)


@given(st.floats(0.05, 5.0), st.floats(0.01, 20.0))
def test_points_match_oracle(a, kappa):
    assert xi_at(make_points_1d([0.0, a]), kappa) == pytest.approx(oracles.xi_1d(a, kappa), rel=1e-13)


def test_single_obstacle_is_zero():
    cfg = make_set([make_circle((0.0, 0.0), 1.0)])
    assert xi_at(cfg, 1.0) == 0.0
    assert XiFunction(cfg, 16)(2.0) == 0.0


def test_two_circles_frozen_reference(two_circles):
    assert xi_at(two_circles, 1.0, 128) == pytest.approx(XI_TWO_CIRCLES_K1, rel=1e-6)
    assert xi_at(two_circles, 1.0, 64) == pytest.approx(XI_TWO_CIRCLES_K1, rel=1e-12)


@pytest.mark.parametrize("name", list(corpus()))
@pytest.mark.parametrize("c", [0.5, 2.0, 4 * math.pi])
def test_kernel_scale_invariance(name, c):
    cfg = corpus()[name]
    for kappa in (0.5, 2.0):
        assert abs(xi_at(cfg, kappa, kernel_scale=c) - xi_at(cfg, kappa)) <= 1e-11


@pytest.mark.parametrize("name", list(corpus()))
def test_rigid_motion_invariance(name):
    cfg = corpus()[name]
    moved = rotate_set(translate_set(cfg, (1.3, -0.7) if cfg.dimension == 2 else 2.5), 2.1 if cfg.dimension == 2
                       else math.pi)
    for kappa in (0.3, 1.0, 3.0):
        assert abs(xi_at(moved, kappa) - xi_at(cfg, kappa)) <= 1e-10


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 2 * math.pi))
def test_rigid_motion_property(ellipse_and_circle, dx, dy, angle):
    moved = rotate_set(translate_set(ellipse_and_circle, (dx, dy)), angle)
    assert abs(xi_at(moved, 1.0, 16) - xi_at(ellipse_and_circle, 1.0, 16)) <= 1e-10


@pytest.mark.parametrize("name", ["plates", "two_circles", "unequal_circles", "kite_circle"])
@pytest.mark.parametrize("kappa", [0.1, 1.0, 4.0])
def test_schur_route(name, kappa):
    system = assemble(build_mesh(corpus()[name], NODES), kappa)
    direct = xi_value(system)
    assert abs(direct - xi_schur(system)) <= 1e-10 * max(1.0, abs(direct))


def test_schur_needs_two():
    with pytest.raises(InvalidArgumentError):
        xi_schur(assemble(build_mesh(make_points_1d([0.0, 1.0, 2.0])), 1.0))


@pytest.mark.parametrize("sigma", [0.5, 2.0])
@pytest.mark.parametrize("kappa", [0.3, 1.0, 2.5])
def test_massless_scaling(sigma, kappa, two_circles, ellipse_and_circle):
    for cfg in (two_circles, ellipse_and_circle):
        assert abs(xi_at(scale_set(cfg, sigma), kappa) - xi_at(cfg, sigma * kappa)) <= 1e-9


@pytest.mark.parametrize("name", list(corpus()))
def test_sign(name):
    for kappa in (0.05, 0.5, 5.0, 20.0):
        assert xi_at(corpus()[name], kappa) <= 1e-12


def test_whitened_keeps_relative_precision(two_circles):
    # at kappa=5 Xi ~ -4e-10; the plain difference of log-determinants is noise at that level
    value = xi_at(two_circles, 5.0, 64)
    assert value == pytest.approx(oracles.xi_two_circles(1, 1, 4, 5.0), rel=1e-8)
    system = assemble(build_mesh(two_circles, 64), 1.0)
    assert xi_value(system, "difference") == pytest.approx(xi_value(system), rel=1e-9)
    with pytest.raises(InvalidArgumentError):
        xi_value(system, "lu")


@pytest.mark.parametrize("name", ["plates", "two_circles", "unequal_circles", "kite_circle"])
def test_exponential_decay(name):
    cfg = corpus()[name]
    d = min_separation(cfg)
    k0 = 1.0 / d
    kappas = np.linspace(k0, 4 * k0, 7)
    vals = np.array([xi_at(cfg, k) for k in kappas])
    slope = np.polyfit(kappas, np.log(np.abs(vals)), 1)[0]
    assert slope <= -2 * d * 0.9


def test_decay_ratio(two_circles):
    ratio = abs(xi_at(two_circles, 4.0)) / abs(xi_at(two_circles, 2.0))
    assert ratio <= math.exp(-2 * 2 * (4 - 2)) * 10


def test_logdet_pair(two_circles):
    system = assemble(build_mesh(two_circles, 16), 1.0)
    full, diag = logdet_pair(system)
    assert full == pytest.approx(np.linalg.slogdet(system.matrix)[1], rel=1e-12)
    assert diag == pytest.approx(np.linalg.slogdet(system.diagonal_matrix)[1], rel=1e-12)


def test_condition_estimate(two_circles):
    system = assemble(build_mesh(two_circles, 16), 1.0)
    exact = np.linalg.cond(system.matrix, 1)
    assert exact / 3 <= condition_estimate(system) <= exact * 1.0001


def _fake_system(matrix, blocks):
    mesh = build_mesh(make_points_1d([0.0, 1.0]))
    return LayerSystem(np.asarray(matrix, float), tuple(np.asarray(b, float) for b in blocks), (0, 1, 2), 1.0,
                       mesh)


def test_non_positive_diagonal_block():
    with pytest.raises(FactorizationError, match="not positive definite"):
        xi_value(_fake_system([[-1.0, 0.1], [0.1, 1.0]], [[[-1.0]], [[1.0]]]))


def test_indefinite_full_matrix():
    system = _fake_system([[1.0, 2.0], [2.0, 1.0]], [[[1.0]], [[1.0]]])
    with pytest.raises(NumericalBreakdownError):
        xi_value(system)
    with pytest.raises(NumericalBreakdownError):
        logdet_pair(system)


def test_grid_points():
    samples = xi_grid(make_points_1d([0.0, 1.0]), [0.5, 1.0, 2.0])
    np.testing.assert_allclose(samples.values, [math.log(1 - math.exp(-1)), math.log(1 - math.exp(-2)),
                                                math.log(1 - math.exp(-4))], rtol=1e-14)
    np.testing.assert_array_equal(samples.kappas, [0.5, 1.0, 2.0])


def test_grid_singleton_and_threads(two_circles):
    single = xi_grid(two_circles, [1.0], 16)
    assert single.values[0] == xi_at(two_circles, 1.0, 16)
    serial, parallel = io.StringIO(), io.StringIO()
    kappas = [0.2, 0.5, 1.0, 2.0, 5.0]
    xi_grid(two_circles, kappas, 16).to_csv(serial)
    xi_grid(two_circles, kappas, 16, threads=4).to_csv(parallel)
    assert serial.getvalue() == parallel.getvalue()
    assert serial.getvalue().splitlines()[0] == "kappa,xi,cond_estimate"


@pytest.mark.parametrize("grid", [[], [1.0, 0.5], [0.0, 1.0], [-1.0], [math.nan]])
def test_grid_rejects_bad_kappas(grid, plates):
    with pytest.raises(InvalidArgumentError):
        xi_grid(plates, grid)


def test_grid_errors_name_kappa(monkeypatch, two_circles):
    import casimir_xi.xi_det as xd

    def broken(system):
        raise FactorizationError("synthetic")

    monkeypatch.setattr(xd, "xi_value", broken)
    with pytest.raises(FactorizationError, match="kappa=2.0"):
        xi_grid(two_circles, [2.0], 16)


def test_xi_function_memoizes(two_circles):
    seen = []
    xi = XiFunction(two_circles, 16, on_system=lambda s: seen.append(s.kappa))
    xi(1.0), xi(1.0), xi(2.0)
    assert seen == [1.0, 2.0]


def test_near_touching_circles_large_kappa():
    cfg = make_set([make_circle((0.0, 0.0), 1.0, "A"), make_circle((2.1, 0.0), 1.0, "B")])
    value = xi_at(cfg, 10.0, 256)
    assert value == pytest.approx(oracles.xi_two_circles(1, 1, 2.1, 10.0, m_max=100, rtol=1e-8), rel=1e-7)
