"""Continuation of standing waves in the nonlinearity phase gamma.

The root system is

    F(gamma, omega, u) = rho u - Lap u - e^{i(gamma-theta)} |u|^alpha u
                         + i omega e^{-i theta} u,

which is e^{-i theta} times the standing-wave equation, so its norm equals
the physical residual. At gamma = theta the branch starts from the known
root (omega, u) = (0, U e^{i beta}). Phase invariance u -> e^{i beta} u
makes the u-derivative singular along the direction i*u, so the Newton
corrector solves a bordered system: the scalar omega joins the unknowns
and one constraint row kills the phase direction. A secant predictor and
an adaptive step in gamma trace the branch.

Sign convention: the stored omega follows the standing-wave ansatz
phi = e^{i omega t} u. (An equivalent formulation with the opposite sign
of the omega term generates the same branch mirrored in omega.)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import bmat, csc_matrix, diags
from scipy.sparse.linalg import splu

from .errors import (
    BadParameter,
    NonConvergence,
    SingularBorderedSystem,
    StepUnderflow,
    TargetOutsideRange,
)
from .grid import ProblemParams, RadialField, RadialGrid, assemble_laplacian
from .ground import GroundState, solve_ground_state

__all__ = [
    "ContinuationPoint",
    "ContinuationPath",
    "evaluate_F",
    "Jacobian",
    "jacobian",
    "mu_projection",
    "newton_correct",
    "continue_path",
    "domega_dgamma",
]

STEP_MIN = 1e-5
STEP_MAX = 0.05


@dataclass
class ContinuationPoint:
    gamma: float
    omega: float
    u: RadialField
    residual: float


@dataclass
class ContinuationPath:
    theta: float
    beta: float
    points: list[ContinuationPoint]
    ground_state: GroundState

    @property
    def gammas(self) -> NDArray:
        return np.array([p.gamma for p in self.points])

    @property
    def omegas(self) -> NDArray:
        return np.array([p.omega for p in self.points])


def _check_gamma(gamma: float) -> None:
    if not -math.pi / 2 < gamma < math.pi / 2:
        raise BadParameter(f"gamma must lie in (-pi/2, pi/2), got {gamma}")


def _wnorm(grid: RadialGrid, u: NDArray) -> float:
    return float(np.sqrt(np.sum(grid.w * np.abs(u) ** 2)))


def _nonlinear(u: NDArray, alpha: float) -> NDArray:
    return np.abs(u) ** alpha * u


def evaluate_F(gamma: float, omega: float, u: RadialField, params: ProblemParams) -> RadialField:
    """Root function of the standing-wave system (unit-modulus rescaled)."""
    _check_gamma(gamma)
    grid = u.grid
    lap = assemble_laplacian(grid)
    vals = np.asarray(u.values, dtype=complex)
    phase = cmath.exp(1j * (gamma - params.theta))
    rot = 1j * omega * cmath.exp(-1j * params.theta)
    out = (
        params.rho * vals
        + lap.apply(np.real(vals))
        + 1j * lap.apply(np.imag(vals))
        - phase * _nonlinear(vals, params.alpha)
        + rot * vals
    )
    return RadialField(grid, out)


class Jacobian:
    """Derivative of the root function at (gamma, omega, u).

    ``apply`` acts on complex fields (real-linear in the input), ``domega``
    is the derivative in omega, and ``real_block`` assembles the sparse
    2M x 2M matrix on stacked (real, imag) parts.
    """

    def __init__(self, gamma: float, omega: float, u: RadialField, params: ProblemParams):
        _check_gamma(gamma)
        self.grid = u.grid
        self.params = params
        self.gamma = gamma
        self.omega = omega
        self.u = np.asarray(u.values, dtype=complex)
        self._lap = assemble_laplacian(self.grid)
        alpha = params.alpha
        absu = np.abs(self.u)
        self._absu_alpha = absu ** alpha
        # alpha |u|^{alpha-2} u with the convention 0 at nodes where u = 0
        mask = absu > 0
        fac = np.zeros_like(absu)
        fac[mask] = alpha * absu[mask] ** (alpha - 2.0)
        self._du_fac = fac * self.u
        self._phase = cmath.exp(1j * (gamma - params.theta))
        self._rot = 1j * omega * cmath.exp(-1j * params.theta)

    def apply(self, v: NDArray) -> NDArray:
        v = np.asarray(v, dtype=complex)
        lin = (
            self.params.rho * v
            + self._lap.apply(np.real(v))
            + 1j * self._lap.apply(np.imag(v))
            + self._rot * v
        )
        nl = self._absu_alpha * v + self._du_fac * np.real(np.conj(self.u) * v)
        return lin - self._phase * nl

    @property
    def domega(self) -> NDArray:
        """Column dF/domega = i e^{-i theta} u."""
        return 1j * cmath.exp(-1j * self.params.theta) * self.u

    @property
    def dgamma(self) -> NDArray:
        """Column dF/dgamma = -i e^{i(gamma-theta)} |u|^alpha u."""
        return -1j * self._phase * _nonlinear(self.u, self.params.alpha)

    def real_block(self) -> csc_matrix:
        n = self.grid.npoints
        sub, diag, sup = self._lap.as_tridiag_bands()
        lap_mat = diags(
            [sub[1:], self.params.rho + diag, sup[:-1]], offsets=[-1, 0, 1]
        )
        p, q = np.real(self.u), np.imag(self.u)
        ce, se = self._phase.real, self._phase.imag
        cr, sr = self._rot.real, self._rot.imag
        fr, fi = np.real(self._du_fac), np.imag(self._du_fac)
        a = self._absu_alpha
        # nonlinear 2x2 node blocks of |u|^alpha v + alpha|u|^{alpha-2} u Re(conj(u) v)
        n_aa = a + fr * p
        n_ab = fr * q
        n_ba = fi * p
        n_bb = a + fi * q
        # multiply by the complex scalar phase: [[ce, -se], [se, ce]] per node
        blk_aa = diags(ce * n_aa - se * n_ba)
        blk_ab = diags(ce * n_ab - se * n_bb)
        blk_ba = diags(se * n_aa + ce * n_ba)
        blk_bb = diags(se * n_ab + ce * n_bb)
        ident = diags(np.ones(n))
        top_left = lap_mat + cr * ident - blk_aa
        top_right = -sr * ident - blk_ab
        bot_left = sr * ident - blk_ba
        bot_right = lap_mat + cr * ident - blk_bb
        return bmat([[top_left, top_right], [bot_left, bot_right]], format="csc")


def jacobian(gamma: float, omega: float, u: RadialField, params: ProblemParams) -> Jacobian:
    return Jacobian(gamma, omega, u, params)


def mu_projection(
    f: RadialField, gs: GroundState, theta: float
) -> tuple[float, RadialField]:
    """Project a right-hand side off the phase direction iU.

    Returns (mu, f + i e^{-i theta} U mu) with mu chosen so the corrected
    field is orthogonal to iU in the real inner product.
    """
    if abs(math.cos(theta)) < 1e-12:
        raise BadParameter("cos(theta) is numerically zero")
    grid = gs.grid
    if f.grid != grid:
        raise BadParameter("field and ground state live on different grids")
    uvals = gs.values
    unorm2 = float(np.sum(grid.w * uvals ** 2))
    mu = -float(np.sum(grid.w * np.imag(f.values) * uvals)) / (math.cos(theta) * unorm2)
    corrected = f.values + 1j * cmath.exp(-1j * theta) * uvals * mu
    return mu, RadialField(grid, corrected)


def _solve_bordered(
    jac: Jacobian, rhs: NDArray, rhs_omega: float, phase_ref: NDArray
) -> tuple[NDArray, float]:
    """Solve [dF/du, dF/domega; c^T, 0] (du, domega) = (rhs, rhs_omega).

    The constraint row c(v) = (v, i phase_ref) removes the phase null
    direction, keeping the system nonsingular at the branch points.
    """
    grid = jac.grid
    n = grid.npoints
    w = grid.w
    block = jac.real_block()
    dom = jac.domega
    col = np.concatenate([np.real(dom), np.imag(dom)])
    # c(v) = Re sum w v conj(i u_ref) = sum w (imag(v) re(u_ref) - real(v) im(u_ref))
    row = np.concatenate([-w * np.imag(phase_ref), w * np.real(phase_ref)])
    bordered = bmat(
        [[block, col[:, None]], [csc_matrix(row[None, :]), None]], format="csc"
    )
    full_rhs = np.concatenate([np.real(rhs), np.imag(rhs), [rhs_omega]])
    try:
        solver = splu(bordered)
        sol = solver.solve(full_rhs)
    except RuntimeError as exc:
        raise SingularBorderedSystem(f"bordered solve failed: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularBorderedSystem("bordered solve produced non-finite values")
    dv = sol[:n] + 1j * sol[n : 2 * n]
    return dv, float(sol[2 * n])


def newton_correct(
    guess: ContinuationPoint,
    params: ProblemParams,
    phase_ref: RadialField,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> ContinuationPoint:
    """Correct a predicted point back onto the branch at fixed gamma.

    Newton on the bordered system; the constraint keeps the correction
    orthogonal to the phase direction of ``phase_ref`` (normally the
    previously accepted point).
    """
    grid = guess.u.grid
    ref = np.asarray(phase_ref.values, dtype=complex)
    if _wnorm(grid, ref) == 0.0:
        raise BadParameter("phase reference must be nonzero")
    gamma = guess.gamma
    _check_gamma(gamma)
    u = np.asarray(guess.u.values, dtype=complex).copy()
    omega = guess.omega
    u_norm = _wnorm(grid, u)
    if not np.isfinite(u_norm) or u_norm == 0.0:
        raise BadParameter("guess field must be nonzero and finite")

    fvals = evaluate_F(gamma, omega, RadialField(grid, u), params).values
    res = _wnorm(grid, fvals) / u_norm
    best = res
    for _ in range(max_iter):
        if res <= tol:
            return ContinuationPoint(gamma, omega, RadialField(grid, u), res)
        jac = Jacobian(gamma, omega, RadialField(grid, u), params)
        dv, domega = _solve_bordered(jac, -fvals, 0.0, ref)
        u = u + dv
        omega = omega + domega
        u_norm = _wnorm(grid, u)
        if u_norm == 0.0 or not np.isfinite(u_norm):
            raise NonConvergence("Newton iterate degenerated")
        fvals = evaluate_F(gamma, omega, RadialField(grid, u), params).values
        res = _wnorm(grid, fvals) / u_norm
        if not np.isfinite(res) or res > 1e3 * max(best, 1.0):
            raise NonConvergence("Newton residual diverged")
        best = min(best, res)
    if res <= tol * 10:
        # rounding floor of the residual evaluation on fine grids
        return ContinuationPoint(gamma, omega, RadialField(grid, u), res)
    raise NonConvergence(f"bordered Newton did not reach {tol} (residual {res:.3e})")


def continue_path(
    theta: float,
    beta: float,
    gamma_target: float,
    step0: float,
    params: ProblemParams,
    grid: RadialGrid,
    ground: GroundState | None = None,
    tol: float = 1e-10,
) -> ContinuationPath:
    """Trace the branch from gamma = theta to gamma_target.

    Natural-parameter continuation: secant predictor (trivial on the first
    step), bordered Newton corrector, adaptive step halved on failure and
    doubled after three easy successes, clamped to [1e-5, 0.05]. A step
    underflow reports the partial path via StepUnderflow.
    """
    if not -math.pi / 2 < gamma_target < math.pi / 2:
        raise TargetOutsideRange(f"gamma target {gamma_target} outside (-pi/2, pi/2)")
    params = replace(params, theta=theta)
    if ground is None:
        ground = solve_ground_state(params, grid)
    elif ground.grid != grid:
        raise BadParameter("ground state lives on a different grid")

    u0 = ground.values * cmath.exp(1j * beta)
    start = ContinuationPoint(theta, 0.0, RadialField(grid, u0), math.inf)
    start = newton_correct(start, params, start.u, tol=tol)
    points = [start]
    if gamma_target == theta:
        return ContinuationPath(theta, beta, points, ground)

    direction = 1.0 if gamma_target > theta else -1.0
    step = min(max(abs(step0), STEP_MIN), STEP_MAX)
    easy_successes = 0
    while True:
        current = points[-1]
        if current.gamma == gamma_target:
            break
        step = min(step, abs(gamma_target - current.gamma))
        gamma_next = current.gamma + direction * step
        if len(points) >= 2:
            prev = points[-2]
            frac = (gamma_next - current.gamma) / (current.gamma - prev.gamma)
            u_pred = current.u.values + frac * (current.u.values - prev.u.values)
            omega_pred = current.omega + frac * (current.omega - prev.omega)
        else:
            u_pred = current.u.values.copy()
            omega_pred = current.omega
        guess = ContinuationPoint(gamma_next, omega_pred, RadialField(grid, u_pred), math.inf)
        try:
            corrected = newton_correct(guess, params, current.u, tol=tol)
        except (NonConvergence, SingularBorderedSystem):
            step *= 0.5
            easy_successes = 0
            if step < STEP_MIN:
                raise StepUnderflow(
                    f"continuation step underflow at gamma = {current.gamma:.6f}",
                    partial_path=ContinuationPath(theta, beta, points, ground),
                )
            continue
        points.append(corrected)
        easy_successes += 1
        if easy_successes >= 3:
            step = min(2.0 * step, STEP_MAX)
            easy_successes = 0
    return ContinuationPath(theta, beta, points, ground)


def domega_dgamma(
    point: ContinuationPoint, params: ProblemParams, phase_ref: RadialField
) -> float:
    """Branch slope d omega / d gamma from the bordered linear solve."""
    grid = point.u.grid
    if _wnorm(grid, np.asarray(point.u.values)) == 0.0:
        raise BadParameter("slope is undefined on the zero field")
    jac = Jacobian(point.gamma, point.omega, point.u, params)
    _, domega = _solve_bordered(jac, -jac.dgamma, 0.0, np.asarray(phase_ref.values, dtype=complex))
    return domega
