"""Linearization of the standing-wave map at the ground state.

The real-linear derivative splits into two self-adjoint radial operators,
one acting on real parts (with potential -(alpha+1) U^alpha) and one on
imaginary parts (with potential -U^alpha). Their spectra, the compact
weighted-resolvent operator K v = (alpha+1)(rho - Lap)^{-1} U^alpha v, and
the differential identities satisfied by the scaling fields are the
testable footprint of the theory: the top K-eigenvalue equals alpha + 1
with eigenvector U, the second is at most 1, the kernel of the full
linearization is spanned by iU, and the identity checks converge at the
order of the discretization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cholesky_banded, eigh, eigh_tridiagonal, solve_banded
from scipy.sparse.linalg import LinearOperator, eigsh

from ._kernels import backend
from .errors import BadParameter, WrongDomain, WrongNormalization
from .grid import Domain, RadialField, RadialGrid, assemble_laplacian
from .ground import GroundState

__all__ = [
    "Spectrum",
    "SymmetricRadialOperator",
    "assemble_l_plus",
    "assemble_l_minus",
    "apply_l",
    "apply_k",
    "spectrum_k",
    "eigs_l_plus",
    "eigs_l_minus",
    "kernel_diagnostics",
    "KernelReport",
    "eta_identity_residual",
    "pohozaev_identity_residual",
    "radial_derivative",
]


@dataclass
class Spectrum:
    """Ordered eigenpairs of one of the tagged operators.

    Eigenvalues are descending for K and ascending for the L operators.
    Eigenvectors are columns, orthonormal in the tagged inner product
    (sigma-weighted for K, quadrature-weighted for L+-).
    """

    operator: str
    eigenvalues: NDArray
    eigenvectors: NDArray
    grid: RadialGrid
    normalization: str

    def field(self, j: int) -> RadialField:
        return RadialField(self.grid, self.eigenvectors[:, j].copy())


class SymmetricRadialOperator:
    """Tridiagonal operator rho - Lap + diag(potential), w-self-adjoint."""

    def __init__(self, grid: RadialGrid, rho: float, potential: NDArray):
        self.grid = grid
        self.rho = rho
        self.potential = potential
        lap = assemble_laplacian(grid)
        self._lap = lap
        self.sub = lap.sub
        self.diag = rho + lap.diag + potential
        self.sup = lap.sup
        self.sym_diag = rho + lap.sym_diag + potential
        self.sym_off = lap.sym_off

    def apply(self, u: NDArray) -> NDArray:
        out = self.diag * u
        out[:-1] += self.sup[:-1] * u[1:]
        out[1:] += self.sub[1:] * u[:-1]
        return out

    def apply_raw_interior(self, u: NDArray) -> NDArray:
        """Boundary-free rows 1..M-2; arguments need not vanish at the wall."""
        return (
            self.sub[1:-1] * u[:-2]
            + self.diag[1:-1] * u[1:-1]
            + self.sup[1:-1] * u[2:]
        )

    def bottom_eigs(self, k: int) -> tuple[NDArray, NDArray]:
        """Lowest k eigenpairs, eigenvectors w-orthonormal."""
        vals, vecs = eigh_tridiagonal(
            self.sym_diag, self.sym_off, select="i", select_range=(0, k - 1)
        )
        return vals, vecs / np.sqrt(self.grid.w)[:, None]

    def all_eigenvalues(self) -> NDArray:
        return eigh_tridiagonal(self.sym_diag, self.sym_off, eigvals_only=True)

    def eig_by_index(self, indices: list[int]) -> tuple[NDArray, NDArray]:
        lo, hi = min(indices), max(indices)
        vals, vecs = eigh_tridiagonal(
            self.sym_diag, self.sym_off, select="i", select_range=(lo, hi)
        )
        keep = [i - lo for i in indices]
        return vals[keep], (vecs / np.sqrt(self.grid.w)[:, None])[:, keep]


def assemble_l_plus(gs: GroundState) -> SymmetricRadialOperator:
    """Operator acting on the real part: rho - Lap - (alpha+1) U^alpha."""
    alpha = gs.params.alpha
    return SymmetricRadialOperator(
        gs.grid, gs.params.rho, -(alpha + 1.0) * gs.values ** alpha
    )


def assemble_l_minus(gs: GroundState) -> SymmetricRadialOperator:
    """Operator acting on the imaginary part: rho - Lap - U^alpha."""
    return SymmetricRadialOperator(gs.grid, gs.params.rho, -gs.values ** gs.params.alpha)


def apply_l(v: RadialField, gs: GroundState) -> RadialField:
    """Full real-linear derivative: L+ on the real part, i L- on the imaginary."""
    if v.grid != gs.grid:
        raise BadParameter("field and ground state live on different grids")
    lp = assemble_l_plus(gs)
    lm = assemble_l_minus(gs)
    vals = lp.apply(np.real(v.values)) + 1j * lm.apply(np.imag(v.values))
    return RadialField(gs.grid, vals)


def _resolvent_bands(gs: GroundState):
    lap = assemble_laplacian(gs.grid)
    return lap.sub, gs.params.rho + lap.diag, lap.sup


def apply_k(v: NDArray, gs: GroundState) -> NDArray:
    """Apply K = (alpha+1)(rho - Lap)^{-1} U^alpha to sampled values."""
    sub, diag, sup = _resolvent_bands(gs)
    fact = backend.tridiag_factor(sub, diag, sup)
    sigma = gs.values ** gs.params.alpha
    return (gs.params.alpha + 1.0) * backend.tridiag_solve(fact, sigma * v)


def spectrum_k(gs: GroundState, k: int, method: str = "iterative") -> Spectrum:
    """Top-k eigenpairs of the compact weighted-resolvent operator K.

    Solved through the equivalent symmetric-definite pencil
    (alpha+1) diag(w U^alpha) phi = lambda (w-weighted form of rho - Lap) phi.
    The iterative path runs Lanczos (with full reorthogonalization) on the
    Cholesky-congruent symmetric form; the dense path is the oracle used by
    the tests on small grids.
    """
    if k < 1:
        raise BadParameter("need k >= 1 eigenpairs")
    grid = gs.grid
    n = grid.npoints
    if k > n - 2:
        raise BadParameter(f"k = {k} too large for a grid of {n} points")
    alpha, rho = gs.params.alpha, gs.params.rho
    lap = assemble_laplacian(grid)
    w = grid.w
    sigma_w = w * gs.values ** alpha
    # w-symmetric form of rho - Lap: diag and off bands
    pw_diag = w * (rho + lap.diag)
    pw_off = w[:-1] * lap.sup[:-1]

    if method == "dense":
        a = np.diag((alpha + 1.0) * sigma_w)
        b = np.diag(pw_diag)
        b += np.diag(pw_off, 1) + np.diag(pw_off, -1)
        vals, vecs = eigh(a, b)
        vals, vecs = vals[::-1][:k], vecs[:, ::-1][:, :k]
    elif method == "iterative":
        ab = np.zeros((2, n))
        ab[0, 1:] = pw_off
        ab[1] = pw_diag
        chol = cholesky_banded(ab)  # upper form: P_w = R^T R
        # R^T is lower bidiagonal; its subdiagonal band is padded at the end
        chol_t = np.vstack([chol[1], np.append(chol[0, 1:], 0.0)])

        def opmat(x):
            y = solve_banded((0, 1), chol, x)
            y *= (alpha + 1.0) * sigma_w
            return solve_banded((1, 0), chol_t, y)

        lin = LinearOperator((n, n), matvec=opmat, dtype=float)
        vals, zvecs = eigsh(lin, k=k, which="LA")
        order = np.argsort(vals)[::-1]
        vals, zvecs = vals[order], zvecs[:, order]
        vecs = np.empty_like(zvecs)
        for j in range(k):
            vecs[:, j] = solve_banded((0, 1), chol, zvecs[:, j])
    else:
        raise BadParameter(f"unknown method {method!r}")

    # sigma-normalize and fix signs so the peak value is positive
    for j in range(k):
        s = np.sum(sigma_w * vecs[:, j] ** 2)
        if s > 0:
            vecs[:, j] /= np.sqrt(s)
        imax = np.argmax(np.abs(vecs[:, j]))
        if vecs[imax, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return Spectrum("K", vals, vecs, grid, "sigma")


def eigs_l_plus(gs: GroundState, k: int) -> Spectrum:
    """Bottom-k eigenpairs of the real-part operator, w-orthonormal."""
    if k < 1:
        raise BadParameter("need k >= 1 eigenpairs")
    if k > gs.grid.npoints:
        raise BadParameter(f"k = {k} exceeds grid size {gs.grid.npoints}")
    vals, vecs = assemble_l_plus(gs).bottom_eigs(k)
    return Spectrum("Lplus", vals, vecs, gs.grid, "weights")


def eigs_l_minus(gs: GroundState, k: int) -> Spectrum:
    """Bottom-k eigenpairs of the imaginary-part operator, w-orthonormal."""
    if k < 1:
        raise BadParameter("need k >= 1 eigenpairs")
    if k > gs.grid.npoints:
        raise BadParameter(f"k = {k} exceeds grid size {gs.grid.npoints}")
    vals, vecs = assemble_l_minus(gs).bottom_eigs(k)
    return Spectrum("Lminus", vals, vecs, gs.grid, "weights")


@dataclass
class KernelReport:
    """Numerical footprint of the kernel of the full linearization."""

    sigma_min_lplus: float
    lminus_smallest: tuple[float, RadialField]
    kernel_alignment: float
    kernel_dim_estimate: int
    second_singular_value: float
    singular_values: NDArray


def kernel_diagnostics(gs: GroundState, threshold: float = 1e-6) -> KernelReport:
    """Smallest singular values of the linearization in real-block form.

    The block form is diagonal (real part goes through one operator,
    imaginary part through the other), so the singular values are the
    absolute eigenvalues of the two blocks pooled together. The near-null
    direction is compared against the phase mode iU in the sigma-weighted
    inner product.
    """
    lp = assemble_l_plus(gs)
    lm = assemble_l_minus(gs)
    plus_vals = lp.all_eigenvalues()
    minus_vals = lm.all_eigenvalues()
    pooled = np.sort(np.abs(np.concatenate([plus_vals, minus_vals])))

    # eigenvector of the imaginary-part block nearest zero
    idx = int(np.argmin(np.abs(minus_vals)))
    lam0, vec0 = lm.eig_by_index([idx])
    phi = vec0[:, 0]

    sigma = gs.values ** gs.params.alpha
    w = gs.grid.w
    num = abs(float(np.sum(w * sigma * phi * gs.values)))
    den = np.sqrt(float(np.sum(w * sigma * phi ** 2)) * float(np.sum(w * sigma * gs.values ** 2)))
    alignment = num / den if den > 0 else 0.0

    return KernelReport(
        sigma_min_lplus=float(np.min(np.abs(plus_vals))),
        lminus_smallest=(float(lam0[0]), RadialField(gs.grid, phi)),
        kernel_alignment=alignment,
        kernel_dim_estimate=int(np.sum(pooled < threshold)),
        second_singular_value=float(pooled[1]),
        singular_values=pooled[:4],
    )


def radial_derivative(u: NDArray, h: float) -> NDArray:
    """Second-order first derivative: central interior, one-sided ends.

    The end stencils are one-sided at fourth order; the identity residuals
    apply a second-difference to this output, and second-order end stencils
    would leave an O(1) spike at the neighboring node on the ball (where
    the third derivative does not vanish at the wall), destroying the
    measured convergence order of the checks.
    """
    du = np.empty_like(u)
    du[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    du[0] = np.dot([-25.0, 48.0, -36.0, 16.0, -3.0], u[:5]) / (12.0 * h)
    du[-1] = np.dot([25.0, -48.0, 36.0, -16.0, 3.0], u[-5:][::-1]) / (12.0 * h)
    return du


def _interior_rel_residual(grid: RadialGrid, lhs: NDArray, rhs: NDArray, scale: NDArray) -> float:
    """Relative w-weighted l2 residual of lhs = rhs over interior nodes.

    The wall-adjacent row is dropped: the Dirichlet ghost row of the
    discrete system has an O(1) local truncation whenever the solution's
    second derivative does not vanish at the wall, which leaves a one-cell
    kink in the computed ground state; second-differencing that kink
    pollutes exactly one raw-stencil row and would mask the second-order
    convergence of the identity itself.
    """
    wi = grid.w[1:-1][:-1]
    num = np.sqrt(np.sum(wi * (lhs[:-1] - rhs[:-1]) ** 2))
    den = np.sqrt(np.sum(wi * rhs[:-1] ** 2))
    if den == 0.0:
        den = np.sqrt(np.sum(wi * scale[:-1] ** 2))
    return float(num / den)


def eta_identity_residual(gs: GroundState) -> float:
    """Residual of the scaling-field identity satisfied by the ground state.

    Whole space (requires rho = 1): eta = U + (alpha/2) r U' obeys
    (L+) eta = -alpha U. Unit ball (any admissible rho): eta = 2U + alpha r U'
    obeys (L+) eta = -2 rho alpha U. The operator is applied through the raw
    interior stencil because eta does not vanish at the wall; the residual
    is the relative l2 error over interior nodes.
    """
    params = gs.params
    alpha = params.alpha
    grid = gs.grid
    du = radial_derivative(gs.values, grid.h)
    if params.domain is Domain.WHOLE_SPACE:
        if params.rho != 1.0:
            raise WrongNormalization("whole-space identity requires rho = 1")
        eta = gs.values + 0.5 * alpha * grid.r * du
        rhs = -alpha * gs.values
    else:
        eta = 2.0 * gs.values + alpha * grid.r * du
        rhs = -2.0 * params.rho * alpha * gs.values
    lp = assemble_l_plus(gs)
    return _interior_rel_residual(
        grid, lp.apply_raw_interior(eta), rhs[1:-1], alpha * gs.values[1:-1]
    )


def pohozaev_identity_residual(gs: GroundState) -> float:
    """Residual of the dilation-field identity (L+)(r U') = 2 U^{alpha+1}.

    Holds on the unit ball at rho = 0; same raw-stencil and normalization
    conventions as the eta check.
    """
    params = gs.params
    if params.domain is not Domain.UNIT_BALL:
        raise WrongDomain("the dilation identity check runs on the unit ball")
    if params.rho != 0.0:
        raise WrongNormalization("the dilation identity requires rho = 0")
    grid = gs.grid
    psi = grid.r * radial_derivative(gs.values, grid.h)
    rhs = 2.0 * gs.values ** (params.alpha + 1.0)
    lp = assemble_l_plus(gs)
    return _interior_rel_residual(
        grid, lp.apply_raw_interior(psi), rhs[1:-1], gs.values[1:-1]
    )
