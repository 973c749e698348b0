import math

import numpy as np
import pytest

from cglwaves.errors import BadParameter, NegativeSolution, NonConvergence, WrongDomain
from cglwaves.grid import Domain, ProblemParams, RadialField, build_grid, inner_product
from cglwaves.ground import energy, rescale_rho, solve_constrained_min, solve_ground_state

from conftest import get_ground

BALL = Domain.UNIT_BALL
WHOLE = Domain.WHOLE_SPACE


def soliton(alpha, rho, r):
    """Closed-form positive even solution on the line (checked symbolically)."""
    return ((alpha + 2) * rho / 2.0) ** (1.0 / alpha) / np.cosh(
        alpha * math.sqrt(rho) * r / 2.0
    ) ** (2.0 / alpha)


class TestNewtonRoute:
    def test_sech_oracle_converged(self):
        # second-order interior error: ~1.2e-5 at h=0.01, ~8.6e-7 at h=0.0025
        errs = []
        for npoints in (1500, 3000, 6000):
            gs = get_ground(WHOLE, 1, 2.0, 1.0, npoints, 15.0)
            errs.append(np.abs(gs.values - soliton(2.0, 1.0, gs.grid.r)).max())
        assert errs[2] <= 1e-6
        assert 3.0 <= errs[0] / errs[1] <= 4.5  # wall tail flattens the last ratio

    def test_sech_peak_value(self):
        gs = get_ground(WHOLE, 1, 2.0, 1.0, 3000, 15.0)
        assert gs.values[0] == pytest.approx(math.sqrt(2.0), abs=1e-5)
        assert np.all(np.diff(gs.values) < 0)
        assert gs.residual_norm <= 1e-10
        assert gs.energy > 0

    @pytest.mark.parametrize(
        "alpha,npoints,rmax", [(1.0, 7200, 18.0), (2.0, 6000, 15.0), (3.0, 9600, 16.0)]
    )
    def test_closed_form_all_alpha(self, alpha, npoints, rmax):
        gs = get_ground(WHOLE, 1, alpha, 1.0, npoints, rmax)
        assert np.abs(gs.values - soliton(alpha, 1.0, gs.grid.r)).max() <= 1e-6

    def test_rho_scaling_peak_and_width(self):
        # rho = 4 doubles the curvature scale, so the h^2 peak error is ~4x
        # the rho = 1 one at equal resolution
        gs4 = get_ground(WHOLE, 1, 2.0, 4.0, 3000, 15.0)
        assert gs4.values[0] == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-4)
        gs1 = get_ground(WHOLE, 1, 2.0, 1.0, 3000, 15.0)

        def half_width(gs):
            target = gs.values[0] / 2.0
            idx = int(np.argmax(gs.values < target))
            return gs.grid.r[idx]

        assert half_width(gs1) / half_width(gs4) == pytest.approx(2.0, rel=1e-2)

    def test_negative_rho_rejected(self):
        with pytest.raises(BadParameter):
            ProblemParams(WHOLE, 1, 2.0, -0.5)

    def test_sign_changing_init_detected(self):
        params = ProblemParams(BALL, 1, 2.0, 1.0)
        grid = build_grid(params, 300)
        init = RadialField(grid, 8.0 * np.cos(3 * np.pi * grid.r / 2))
        with pytest.raises(NegativeSolution):
            solve_ground_state(params, grid, init=init)

    def test_zero_capture_rejected(self):
        params = ProblemParams(BALL, 1, 2.0, 1.0)
        grid = build_grid(params, 300)
        init = RadialField(grid, 1e-8 * np.exp(-grid.r ** 2))
        with pytest.raises(NonConvergence):
            solve_ground_state(params, grid, init=init)

    def test_alpha_below_one_warns(self):
        params = ProblemParams(WHOLE, 1, 0.5, 1.0)
        grid = build_grid(params, 400, 15.0)
        with pytest.warns(UserWarning):
            solve_ground_state(params, grid)


class TestDecayAndBoundary:
    def test_exponential_decay(self):
        gs = get_ground(WHOLE, 1, 2.0, 1.0, 2000, 15.0)
        grid = gs.grid
        logu = np.log(gs.values)
        sel = grid.r >= 2.0
        assert np.all(np.diff(logu)[sel[:-1]] < 0)
        assert np.all(np.diff(logu, 2)[sel[1:-1]] <= 1e-10)
        assert gs.values[-1] <= 1e-8 * gs.values[0]

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_ball_hopf_derivative(self, dim):
        gs = get_ground(BALL, dim, 2.0, 1.0, 400)
        h = gs.grid.h
        # quadratic fit through the wall value zero and the last two cells
        wall_slope = (gs.values[-2] - 9.0 * gs.values[-1]) / (3.0 * h)
        assert wall_slope < 0


class TestEnergy:
    def test_zero_field(self):
        params = ProblemParams(BALL, 2, 2.0, 1.0)
        grid = build_grid(params, 200)
        assert energy(RadialField(grid, np.zeros(200, dtype=complex)), params) == 0.0

    def test_positive_at_ground_state(self):
        gs = get_ground(BALL, 3, 2.0, 1.0, 500)
        assert gs.energy > 0
        assert energy(gs.U, gs.params) == pytest.approx(gs.energy)

    def test_stationarity_directional_derivative(self):
        gs = get_ground(WHOLE, 1, 2.0, 1.0, 2000, 15.0)
        grid, params = gs.grid, gs.params
        gen = np.random.default_rng(4)
        eps = 1e-5
        for _ in range(3):
            v = gen.standard_normal(grid.npoints)
            vf = RadialField(grid, v)
            up = RadialField(grid, gs.values + eps * v)
            dn = RadialField(grid, gs.values - eps * v)
            deriv = (energy(up, params) - energy(dn, params)) / (2 * eps)
            vnorm = math.sqrt(inner_product(vf, vf))
            assert abs(deriv) <= 1e-6 * vnorm

    def test_gradient_matches_residual(self):
        # the discrete energy is an exact potential for the discrete system
        gs = get_ground(BALL, 2, 2.0, 0.0, 300)
        grid, params = gs.grid, gs.params
        gen = np.random.default_rng(9)
        u = gs.values * (1.0 + 0.1 * gen.standard_normal(grid.npoints))
        v = gen.standard_normal(grid.npoints)
        eps = 1e-6
        fd = (
            energy(RadialField(grid, u + eps * v), params)
            - energy(RadialField(grid, u - eps * v), params)
        ) / (2 * eps)
        from cglwaves.grid import assemble_laplacian

        lap = assemble_laplacian(grid)
        grad = params.rho * u + lap.apply(u) - np.abs(u) ** params.alpha * u
        assert fd == pytest.approx(float(np.sum(grid.w * grad * v)), rel=1e-5, abs=1e-7)


class TestConstrainedMinRoute:
    def test_constraint_and_agreement(self):
        params = ProblemParams(WHOLE, 1, 2.0, 1.0)
        grid = build_grid(params, 2000, 15.0)
        utilde, mult, gs_min = solve_constrained_min(params, grid)
        assert abs(np.sum(grid.w * utilde.values ** 4) - 1.0) <= 1e-10
        assert np.all(np.diff(utilde.values) < 0)
        assert mult > 0
        gs_newton = get_ground(WHOLE, 1, 2.0, 1.0, 2000, 15.0)
        rel = np.abs(gs_min.values - gs_newton.values).max() / gs_newton.values.max()
        assert rel <= 1e-6

    @pytest.mark.parametrize(
        "domain,dim,alpha",
        [
            (WHOLE, 1, 2.0),
            (WHOLE, 2, 2.0),
            (WHOLE, 3, 2.0),
            (WHOLE, 3, 1.0),
            (BALL, 1, 2.0),
            (BALL, 2, 2.0),
            (BALL, 3, 2.0),
            (BALL, 3, 1.0),
        ],
    )
    def test_route_equivalence(self, domain, dim, alpha):
        params = ProblemParams(domain, dim, alpha, 1.0)
        npoints = 600 if domain is BALL else 1000
        grid = build_grid(params, npoints)
        _, _, gs_min = solve_constrained_min(params, grid)
        gs_newton = get_ground(domain, dim, alpha, 1.0, npoints)
        rel = np.abs(gs_min.values - gs_newton.values).max() / gs_newton.values.max()
        assert rel <= 1e-6


class TestRescale:
    def test_identity(self):
        gs = get_ground(WHOLE, 1, 2.0, 1.0, 2000, 15.0)
        same = rescale_rho(gs, 1.0)
        assert np.abs(same.values - gs.values).max() <= 1e-10

    def test_peak_scaling(self):
        gs = get_ground(WHOLE, 1, 2.0, 1.0, 2000, 15.0)
        gs4 = rescale_rho(gs, 4.0)
        assert gs4.values[0] == pytest.approx(2.0 * gs.values[0], rel=1e-12)
        assert gs4.grid.rmax == pytest.approx(7.5)
        assert gs4.residual_norm <= 1e-6

    def test_matches_direct_solve(self):
        gs = get_ground(WHOLE, 1, 2.0, 1.0, 2000, 15.0)
        for rho in (0.25, 4.0):
            scaled = rescale_rho(gs, rho)
            direct = solve_ground_state(scaled.params, scaled.grid)
            rel = np.abs(scaled.values - direct.values).max() / direct.values.max()
            assert rel <= 1e-6

    def test_errors(self):
        gs = get_ground(WHOLE, 1, 2.0, 1.0, 2000, 15.0)
        with pytest.raises(BadParameter):
            rescale_rho(gs, 0.0)
        ball = get_ground(BALL, 2, 2.0, 1.0, 300)
        with pytest.raises(WrongDomain):
            rescale_rho(ball, 2.0)
        gs4 = rescale_rho(gs, 4.0)
        with pytest.raises(BadParameter):
            rescale_rho(gs4, 2.0)  # only the rho = 1 state rescales
