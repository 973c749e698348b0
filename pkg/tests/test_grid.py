import math

import numpy as np
import pytest

from cglwaves.errors import BadParameter, FieldGridMismatch, GridTooCoarse, WrongDomain
from cglwaves.grid import (
    Domain,
    ProblemParams,
    RadialField,
    assemble_laplacian,
    build_grid,
    dirichlet_lambda1,
    inner_product,
    sphere_surface_measure,
    weighted_inner_product_sigma,
)

BALL = Domain.UNIT_BALL
WHOLE = Domain.WHOLE_SPACE

DIRICHLET_LAMBDA1 = {
    1: math.pi ** 2 / 4,
    2: 5.783185962946785,  # square of the first Bessel J0 zero
    3: math.pi ** 2,
}


def test_params_invariants():
    with pytest.raises(BadParameter):
        ProblemParams(WHOLE, 3, 4.0, 1.0)  # (N-2)*alpha = 4, not subcritical
    with pytest.raises(BadParameter):
        ProblemParams(WHOLE, 1, 2.0, -0.5)
    with pytest.raises(BadParameter):
        ProblemParams(WHOLE, 1, 2.0, 1.0, theta=1.6)
    # on the ball, rho only needs to stay above -lambda_1
    ProblemParams(BALL, 3, 2.0, -5.0)
    with pytest.raises(BadParameter):
        ProblemParams(BALL, 3, 2.0, -9.9)


def test_build_grid_ball():
    grid = build_grid(ProblemParams(BALL, 3, 2.0, 1.0), 100)
    assert grid.h == pytest.approx(0.01)
    assert grid.r[0] == pytest.approx(0.005)
    assert grid.r[-1] == pytest.approx(0.995)
    assert np.all(np.diff(grid.r) > 0)


def test_build_grid_whole():
    grid = build_grid(ProblemParams(WHOLE, 1, 2.0, 1.0), 1500, 15.0)
    assert grid.h == pytest.approx(0.01)
    assert grid.r[-1] == pytest.approx(14.995)


def test_build_grid_default_rmax_scales_with_rho():
    grid = build_grid(ProblemParams(WHOLE, 1, 2.0, 0.04), 100)
    assert grid.rmax == pytest.approx(75.0)
    grid = build_grid(ProblemParams(WHOLE, 1, 2.0, 9.0), 100)
    assert grid.rmax == pytest.approx(15.0)


def test_build_grid_errors():
    params = ProblemParams(BALL, 3, 2.0, 1.0)
    with pytest.raises(GridTooCoarse):
        build_grid(params, 4)
    with pytest.raises(BadParameter):
        build_grid(ProblemParams(WHOLE, 1, 2.0, 1.0), 100, -3.0)


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("npoints", [50, 100, 200])
def test_quadrature_total_is_ball_volume(dim, npoints):
    grid = build_grid(ProblemParams(BALL, dim, 2.0, 1.0), npoints)
    vol = sphere_surface_measure(dim) / dim
    assert grid.w.sum() == pytest.approx(vol, rel=1e-12)
    assert np.all(grid.w > 0)


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("npoints", [50, 100, 200])
def test_stencil_exact_on_quadratic(dim, npoints):
    grid = build_grid(ProblemParams(BALL, dim, 2.0, 1.0), npoints)
    lap = assemble_laplacian(grid)
    out = lap.apply(1.0 - grid.r ** 2)
    # exact away from the Dirichlet ghost row
    assert np.abs(out[:-1] - 2.0 * dim).max() <= 1e-9 * dim


@pytest.mark.parametrize(
    "domain,dim,npoints,rmax",
    [(BALL, 1, 200, None), (BALL, 3, 333, None), (WHOLE, 2, 500, 15.0)],
)
def test_laplacian_self_adjoint_positive(domain, dim, npoints, rmax):
    grid = build_grid(ProblemParams(domain, dim, 2.0, 1.0), npoints, rmax)
    lap = assemble_laplacian(grid)
    # the matrix is exactly self-adjoint in the weighted inner product
    sym_gap = grid.w[:-1] * lap.sup[:-1] - grid.w[1:] * lap.sub[1:]
    assert np.abs(sym_gap).max() <= 1e-15 * np.abs(grid.w[:-1] * lap.sup[:-1]).max()
    gen = np.random.default_rng(11)
    for _ in range(5):
        u = gen.standard_normal(npoints)
        v = gen.standard_normal(npoints)
        left = np.sum(grid.w * lap.apply(u) * v)
        right = np.sum(grid.w * u * lap.apply(v))
        assert abs(left - right) <= 1e-12 * np.linalg.norm(u) * np.linalg.norm(v)
        assert np.sum(grid.w * u * lap.apply(u)) > 0


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_dirichlet_lambda1_oracle_and_order(dim):
    exact = DIRICHLET_LAMBDA1[dim]
    errs = []
    for npoints in (100, 200, 400):
        grid = build_grid(ProblemParams(BALL, dim, 2.0, 1.0), npoints)
        errs.append(abs(dirichlet_lambda1(grid) - exact))
    assert errs[0] <= 10.0 * (1.0 / 100) ** 2
    for c, f in zip(errs, errs[1:]):
        assert 3.5 <= c / f <= 4.5


def test_dirichlet_lambda1_wrong_domain():
    grid = build_grid(ProblemParams(WHOLE, 1, 2.0, 1.0), 100, 10.0)
    with pytest.raises(WrongDomain):
        dirichlet_lambda1(grid)


def test_inner_product_constant_is_volume():
    grid = build_grid(ProblemParams(BALL, 3, 2.0, 1.0), 300)
    one = RadialField(grid, np.ones(300, dtype=complex))
    assert inner_product(one, one) == pytest.approx(4 * math.pi / 3, abs=1e-10)


def test_inner_product_phase_orthogonality():
    grid = build_grid(ProblemParams(WHOLE, 2, 2.0, 1.0), 128, 10.0)
    gen = np.random.default_rng(5)
    v = RadialField(grid, gen.standard_normal(128) + 1j * gen.standard_normal(128))
    iv = RadialField(grid, 1j * v.values)
    assert inner_product(v, iv) == 0.0


def test_inner_product_sech_mass():
    # int of 2 sech^2 over the line is 4; midpoint quadrature of the exact
    # profile on [0, 15] reproduces it to well below 1e-6
    grid = build_grid(ProblemParams(WHOLE, 1, 2.0, 1.0), 3000, 15.0)
    u = RadialField(grid, np.sqrt(2.0) / np.cosh(grid.r))
    assert abs(inner_product(u, u) - 4.0) <= 1e-6


def test_inner_product_grid_mismatch():
    g1 = build_grid(ProblemParams(BALL, 3, 2.0, 1.0), 100)
    g2 = build_grid(ProblemParams(BALL, 3, 2.0, 1.0), 101)
    with pytest.raises(FieldGridMismatch):
        inner_product(RadialField(g1, np.ones(100)), RadialField(g2, np.ones(101)))


def test_sigma_weighted_inner_product_zero_weight():
    grid = build_grid(ProblemParams(BALL, 2, 2.0, 1.0), 64)
    zero = RadialField(grid, np.zeros(64))
    gen = np.random.default_rng(2)
    u = RadialField(grid, gen.standard_normal(64))
    assert weighted_inner_product_sigma(u, u, zero, 2.0) == 0.0


def test_field_length_checked():
    grid = build_grid(ProblemParams(BALL, 2, 2.0, 1.0), 64)
    with pytest.raises(FieldGridMismatch):
        RadialField(grid, np.ones(65))
