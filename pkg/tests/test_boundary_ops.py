import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casimir_xi import kernels
from casimir_xi.boundary_ops import (assemble, build_mesh, circle_eigenvalues, dump_matrix,
                                     kress_weights, oversampled_count, prolongation)
from casimir_xi.errors import InvalidArgumentError
from casimir_xi.geometry import make_circle, make_fourier_curve, make_points_1d, make_set, min_separation

from conftest import corpus


def test_mesh_unit_circle_16():
    mesh = build_mesh(make_set([make_circle((0.0, 0.0), 1.0)]), 16)
    np.testing.assert_allclose(mesh.params[0], np.arange(16) * np.pi / 8)
    np.testing.assert_allclose(mesh.speeds[0], 1.0, rtol=1e-15)
    assert mesh.size == 16


def test_mesh_points():
    mesh = build_mesh(make_points_1d([0.0, 2.0]))
    assert mesh.counts == (1, 1)


@pytest.mark.parametrize("nodes", [7, 6, 0, 15.5])
def test_mesh_bad_node_count(nodes, two_circles):
    with pytest.raises(InvalidArgumentError):
        build_mesh(two_circles, nodes)


@pytest.mark.parametrize("kappa", [0.0, -1.0, math.inf, math.nan])
def test_assemble_bad_kappa(kappa, plates):
    with pytest.raises(InvalidArgumentError):
        assemble(build_mesh(plates), kappa)


@pytest.mark.parametrize("a, kappa", [(1.0, 1.0), (0.5, 3.0), (2.0, 0.1)])
def test_points_matrix(a, kappa):
    system = assemble(build_mesh(make_points_1d([0.0, a])), kappa)
    expected = np.array([[1.0, math.exp(-kappa * a)], [math.exp(-kappa * a), 1.0]]) / kappa
    np.testing.assert_allclose(system.matrix, expected, rtol=1e-15)


def test_kress_weights_integrate_cosines():
    # int_0^2pi log(4 sin^2(s/2)) cos(m s) ds = -2pi/|m| (m != 0), 0 for m = 0
    n_nodes = 32
    w = kress_weights(n_nodes)[0]
    t = 2 * np.pi * np.arange(n_nodes) / n_nodes
    assert w @ np.ones(n_nodes) == pytest.approx(0.0, abs=1e-13)
    for m in range(1, n_nodes // 2):
        assert w @ np.cos(m * t) == pytest.approx(-2 * np.pi / m, rel=1e-13)


def test_prolongation_is_isometry():
    p = prolongation(16, 48)
    np.testing.assert_allclose(p.T @ p, np.eye(16), atol=1e-14)
    # a coarse trigonometric polynomial is interpolated exactly
    tc, tf = 2 * np.pi * np.arange(16) / 16, 2 * np.pi * np.arange(48) / 48
    f = lambda t: 1 + np.cos(3 * t) - 0.5 * np.sin(7 * t)  # noqa: E731
    np.testing.assert_allclose(p @ f(tc), f(tf) * math.sqrt(16 / 48), atol=1e-13)


def test_oversampling_grows_with_kappa():
    counts = [oversampled_count(32, k, 2.0) for k in (0.5, 5.0, 50.0)]
    assert counts == sorted(counts) and all(c % 16 == 0 and c >= 64 for c in counts)


@pytest.mark.parametrize("name", list(corpus()))
@pytest.mark.parametrize("kappa", [0.3, 2.0, 8.0])
def test_symmetry_positivity_and_blocks(name, kappa):
    system = assemble(build_mesh(corpus()[name], 32), kappa)
    s = system.matrix
    assert np.max(np.abs(s - s.T)) <= 1e-13 * np.max(np.abs(s))
    for j, blk in enumerate(system.blocks):
        sl = system.block_slice(j)
        assert np.array_equal(s[sl, sl], blk)
        assert np.min(np.linalg.eigvalsh(blk)) > 0


@pytest.mark.parametrize("radius, kappa", [(1.0, 1.0), (1.0, 5.0), (0.5, 0.2), (2.0, 3.0)])
def test_circle_spectrum(radius, kappa):
    system = assemble(build_mesh(make_set([make_circle((0.3, -0.2), radius)]), 64), kappa)
    ev = np.sort(np.linalg.eigvalsh(system.matrix))[::-1]
    exact = circle_eigenvalues(radius, kappa, 31)
    # modes 1..31 are doubly degenerate; the unpaired top mode 32 is left out
    expected = np.concatenate([[exact[0]], np.repeat(exact[1:], 2)])
    np.testing.assert_allclose(ev[:63], expected, rtol=1e-10, atol=1e-13)


def test_circle_eigenvalue_oracle():
    assert circle_eigenvalues(1.0, 1.0, 0)[0] == pytest.approx(
        kernels.bessel_i(0, 1.0) * kernels.bessel_k(0, 1.0), rel=1e-15)
    ev = circle_eigenvalues(1.0, 1.0, 60)
    assert np.all(np.diff(ev) < 0)
    assert ev[-1] * 2 * 60 == pytest.approx(1.0, rel=1e-3)
    np.testing.assert_allclose(circle_eigenvalues(2.0, 0.5, 10), 2 * circle_eigenvalues(1.0, 1.0, 10))


def test_spectral_convergence_of_diagonal_block(two_circles):
    errors = []
    for nodes in (8, 16, 32, 64):
        blk = assemble(build_mesh(two_circles, nodes), 1.0).blocks[0]
        ev = np.sort(np.linalg.eigvalsh(blk))
        exact = circle_eigenvalues(1.0, 1.0, nodes // 2)
        errors.append(max(abs(ev[-1] - exact[0]), abs(ev[0] - exact[-1])))
    for coarse, fine in zip(errors, errors[1:]):
        assert fine <= 1e-12 or fine <= coarse / 10


@given(st.floats(0.05, 10.0))
def test_off_diagonal_bound(kappa):
    cfg = make_set([make_circle((0.0, 0.0), 1.0), make_fourier_curve([0.0, 0.9], [0.0], [0.0], [0.0, 0.6],
                                                                    center=(3.2, 0.5))])
    nodes = 32
    system = assemble(build_mesh(cfg, nodes), kappa)
    speed = max(np.max(s) for s in system.mesh.speeds)
    bound = kernels.bessel_k(0, kappa * min_separation(cfg)) / (2 * np.pi) * speed * (2 * np.pi / nodes)
    # the trigonometric restriction may overshoot pointwise by a small interpolation factor
    assert np.max(np.abs(system.off_block(0, 1))) <= 2.0 * bound


def test_kernel_scale_multiplies_matrix(two_circles):
    mesh = build_mesh(two_circles, 16)
    np.testing.assert_allclose(assemble(mesh, 1.5, kernel_scale=3.0).matrix, 3.0 * assemble(mesh, 1.5).matrix,
                               rtol=1e-14)


def test_dump_matrix_format(tmp_path, two_circles):
    system = assemble(build_mesh(two_circles, 8), 1.0)
    path = tmp_path / "m.txt"
    dump_matrix(system, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "16 16 1.0"
    values = np.array([float(v) for v in lines[1:]])
    np.testing.assert_array_equal(values.reshape(16, 16, order="F"), system.matrix)


def test_log_coefficient_taper():
    from casimir_xi.boundary_ops import log_coefficient

    from scipy.special import erfc

    from casimir_xi.boundary_ops import TAPER_CENTER, TAPER_WIDTH

    # the taper is 1 to double precision at the diagonal and departs from 1 by erfc-sized amounts
    assert log_coefficient(np.array([1e-6]))[0] == pytest.approx(1.0, rel=1e-15)
    z = np.array([0.5, 2.0, 5.0])
    deficit = 1.0 - log_coefficient(z) / np.array([kernels.bessel_i(0, v) for v in z])
    np.testing.assert_allclose(deficit, 0.5 * erfc((TAPER_CENTER - z) / TAPER_WIDTH), rtol=1e-6, atol=1e-15)
    far = log_coefficient(np.array([50.0, 700.0, 5000.0]))
    assert np.all(np.isfinite(far)) and far[0] < 1e-100


@pytest.mark.parametrize("kappa", [10.0, 20.0, 60.0])
def test_circle_spectrum_large_kappa(kappa):
    system = assemble(build_mesh(make_set([make_circle((0.0, 0.0), 1.0)]), 32), kappa)
    ev = np.sort(np.linalg.eigvalsh(system.matrix))[::-1]
    exact = circle_eigenvalues(1.0, kappa, 15)
    np.testing.assert_allclose(ev[:31], np.concatenate([[exact[0]], np.repeat(exact[1:], 2)]), rtol=1e-11)
