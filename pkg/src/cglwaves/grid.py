"""Radial grids, the discrete radial Laplacian, and weighted inner products.

Radially symmetric functions on the unit ball or on (a truncated copy of)
R^N are sampled on a uniform cell-centered mesh

    r_i = (i - 1/2) h,   i = 1..M,   h = rmax / M,

which keeps the coordinate singularity at r = 0 off the grid. The negative
Laplacian restricted to radial functions,

    -(u'' + (N-1)/r u'),

is discretized in conservative (flux) form: the flux r^{N-1} u' is
differenced across cell faces and divided by the exact shell volume of the
cell. With the matching shell-volume quadrature weights the discrete
operator is exactly self-adjoint, positive definite, reproduces the value
2N when applied to 1 - r^2 exactly away from the outer boundary, and
converges at second order.

Boundary conditions: zero flux through r = 0 (regularity) and a homogeneous
Dirichlet value at r = rmax imposed through a ghost cell (u_{M+1} = -u_M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from .errors import (
    BadParameter,
    FieldGridMismatch,
    GridTooCoarse,
    WrongDomain,
)

__all__ = [
    "Domain",
    "ProblemParams",
    "RadialGrid",
    "RadialField",
    "build_grid",
    "assemble_laplacian",
    "RadialLaplacian",
    "inner_product",
    "norm",
    "weighted_inner_product_sigma",
    "dirichlet_lambda1",
    "sphere_surface_measure",
]


class Domain(Enum):
    """Spatial domain of the problem."""

    WHOLE_SPACE = "whole"
    UNIT_BALL = "ball"


def sphere_surface_measure(dim: int) -> float:
    """Surface measure of the unit (dim-1)-sphere: 2 for dim=1, 2*pi, 4*pi, ..."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class ProblemParams:
    """Physical parameter bundle for the standing-wave problem.

    Attributes:
        domain: whole space or unit ball.
        dim: spatial dimension N >= 1.
        alpha: nonlinearity power, subcritical: (N - 2) * alpha < 4.
        rho: linear coefficient; > 0 on the whole space, > -lambda_1 of the
            Dirichlet Laplacian on the unit ball.
        theta: phase of the linear term, in (-pi/2, pi/2).
    """

    domain: Domain
    dim: int
    alpha: float
    rho: float
    theta: float = 0.0

    def __post_init__(self):
        if self.dim < 1 or int(self.dim) != self.dim:
            raise BadParameter(f"dim must be a positive integer, got {self.dim}")
        if self.alpha <= 0:
            raise BadParameter(f"alpha must be positive, got {self.alpha}")
        if (self.dim - 2) * self.alpha >= 4:
            raise BadParameter(
                f"subcriticality requires (N-2)*alpha < 4, got "
                f"({self.dim}-2)*{self.alpha} = {(self.dim - 2) * self.alpha}"
            )
        if not -math.pi / 2 < self.theta < math.pi / 2:
            raise BadParameter(f"theta must lie in (-pi/2, pi/2), got {self.theta}")
        if self.domain is Domain.WHOLE_SPACE:
            if self.rho <= 0:
                raise BadParameter(
                    f"whole-space problem requires rho > 0, got {self.rho}"
                )
        else:
            lam1 = _ball_lambda1(self.dim)
            if self.rho <= -lam1:
                raise BadParameter(
                    f"ball problem requires rho > -lambda_1 = {-lam1:.6f}, "
                    f"got {self.rho}"
                )


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Cell-centered radial mesh with shell-volume quadrature weights."""

    domain: Domain
    dim: int
    npoints: int
    rmax: float
    h: float
    r: NDArray = field(repr=False)
    w: NDArray = field(repr=False)
    faces: NDArray = field(repr=False)

    def key(self) -> tuple:
        return (self.domain, self.dim, self.npoints, self.rmax)

    def __eq__(self, other) -> bool:
        return isinstance(other, RadialGrid) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


@dataclass
class RadialField:
    """Sampled radial function (real or complex) tied to its grid."""

    grid: RadialGrid
    values: NDArray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.npoints,):
            raise FieldGridMismatch(
                f"field has {self.values.shape} values for a grid of "
                f"{self.grid.npoints} points"
            )

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.values.copy())


def _require_same_grid(*fields: RadialField) -> RadialGrid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise FieldGridMismatch("fields live on different grids")
    return grid


def _make_grid(domain: Domain, dim: int, npoints: int, rmax: float) -> RadialGrid:
    h = rmax / npoints
    r = (np.arange(1, npoints + 1) - 0.5) * h
    faces = np.arange(npoints + 1) * h
    shell = (faces[1:] ** dim - faces[:-1] ** dim) / dim
    w = sphere_surface_measure(dim) * shell
    return RadialGrid(
        domain=domain, dim=dim, npoints=npoints, rmax=rmax, h=h, r=r, w=w, faces=faces
    )


def build_grid(params: ProblemParams, npoints: int, rmax: float | None = None) -> RadialGrid:
    """Build the cell-centered mesh for the given problem.

    For the unit ball rmax is forced to 1. For the whole space the default
    truncation radius is max(15/sqrt(rho), 15), which puts the Dirichlet
    wall far beyond the exponential tail of the ground state.
    """
    if npoints < 8:
        raise GridTooCoarse(f"need at least 8 grid points, got {npoints}")
    if params.domain is Domain.UNIT_BALL:
        rmax = 1.0
    elif rmax is None:
        rmax = max(15.0 / math.sqrt(params.rho), 15.0)
    if rmax <= 0:
        raise BadParameter(f"rmax must be positive, got {rmax}")
    return _make_grid(params.domain, params.dim, npoints, float(rmax))


class RadialLaplacian:
    """Banded form of the discrete -Laplacian on a radial grid.

    Rows are (Au)_i = sub_i u_{i-1} + diag_i u_i + sup_i u_{i+1} with the
    boundary conditions folded into rows 0 and M-1. The operator is
    self-adjoint and positive definite with respect to the grid's
    quadrature weights. Rows 1..M-2 carry no boundary terms and double as
    the raw differential stencil for the identity checks.
    """

    def __init__(self, grid: RadialGrid):
        self.grid = grid
        n, h = grid.npoints, grid.h
        rf = grid.faces
        shell = (rf[1:] ** grid.dim - rf[:-1] ** grid.dim) / grid.dim
        lo = rf[:-1] ** (grid.dim - 1) / (h * shell)  # coupling to u_{i-1}
        hi = rf[1:] ** (grid.dim - 1) / (h * shell)  # coupling to u_{i+1}
        lo[0] = 0.0  # zero flux through r = 0 (matters only for N = 1)
        self.sub = -lo
        self.sup = -hi
        self.diag = lo + hi
        self.diag[-1] += hi[-1]  # Dirichlet ghost u_{M+1} = -u_M
        self.sup[-1] = 0.0
        # symmetric similarity transform S = D A D^{-1}, D = diag(sqrt(w))
        self.sym_diag = self.diag.copy()
        self.sym_off = -rf[1:-1] ** (grid.dim - 1) / (h * np.sqrt(shell[:-1] * shell[1:]))

    def apply(self, u: NDArray) -> NDArray:
        out = self.diag * u
        out[:-1] += self.sup[:-1] * u[1:]
        out[1:] += self.sub[1:] * u[:-1]
        return out

    def apply_raw_interior(self, u: NDArray) -> NDArray:
        """Apply the boundary-free stencil on rows 1..M-2 (0-indexed).

        Valid for arguments that need not satisfy the Dirichlet condition,
        e.g. the differential-identity checks.
        """
        return self.sub[1:-1] * u[:-2] + self.diag[1:-1] * u[1:-1] + self.sup[1:-1] * u[2:]

    def as_tridiag_bands(self) -> tuple[NDArray, NDArray, NDArray]:
        """(sub, diag, sup) bands of the matrix."""
        return self.sub, self.diag, self.sup


def assemble_laplacian(grid: RadialGrid) -> RadialLaplacian:
    """Assemble the discrete -Laplacian for radial functions on ``grid``."""
    return RadialLaplacian(grid)


def inner_product(u: RadialField, v: RadialField) -> float:
    """Real inner product sum w_i Re(u_i conj(v_i)) of two (complex) fields.

    The real part is taken before weighting so that exact cancellations
    (e.g. against i times the same field) survive in floating point.
    """
    _require_same_grid(u, v)
    re = np.real(u.values) * np.real(v.values) + np.imag(u.values) * np.imag(v.values)
    return float(np.sum(u.grid.w * re))


def norm(u: RadialField) -> float:
    return math.sqrt(max(inner_product(u, u), 0.0))


def weighted_inner_product_sigma(
    u: RadialField, v: RadialField, U: RadialField, alpha: float
) -> float:
    """Inner product sum w_i U_i^alpha u_i v_i weighted by the ground state."""
    _require_same_grid(u, v, U)
    sigma = np.asarray(U.values, dtype=float) ** alpha
    re = np.real(u.values) * np.real(v.values) + np.imag(u.values) * np.imag(v.values)
    return float(np.sum(u.grid.w * sigma * re))


def dirichlet_lambda1(grid: RadialGrid, rel_tol: float = 1e-10, max_iter: int = 10000) -> float:
    """Smallest eigenvalue of the discrete -Laplacian on the unit ball.

    Inverse power iteration on the symmetrized tridiagonal form, run to a
    relative eigenvalue tolerance.
    """
    if grid.domain is not Domain.UNIT_BALL:
        raise WrongDomain("dirichlet_lambda1 is defined on the unit ball only")
    from ._kernels import backend

    lap = assemble_laplacian(grid)
    fact = backend.tridiag_factor(
        np.concatenate(([0.0], lap.sym_off)),
        lap.sym_diag.astype(float),
        np.concatenate((lap.sym_off, [0.0])),
    )
    rng = np.random.default_rng(12345)
    x = rng.standard_normal(grid.npoints)
    x /= np.linalg.norm(x)
    lam = math.inf
    for _ in range(max_iter):
        y = backend.tridiag_solve(fact, x)
        # with x normalized, y ~ x / lambda_min, so lambda ~ 1 / (x . y)
        lam_new = 1.0 / float(np.dot(x, y))
        x = y / np.linalg.norm(y)
        if abs(lam_new - lam) <= rel_tol * abs(lam_new):
            return lam_new
        lam = lam_new
    return lam


@lru_cache(maxsize=None)
def _ball_lambda1(dim: int) -> float:
    """First Dirichlet eigenvalue of the unit ball, cached per dimension."""
    return dirichlet_lambda1(_make_grid(Domain.UNIT_BALL, dim, 800, 1.0))
