"""Anti-plane elasticity in the rectangle: the auxiliary Laplace problem.

    Laplace(u) = 0 in the domain, u_x = 0 on the lateral sides,
    mu*u_y = g on the top, u prescribed on the slip boundary S.

Nodes on S are Dirichlet data and are eliminated, corners included. The
Neumann sides use ghost-node reflection; every equation is scaled by its
trapezoid weight (1/2 on the lateral sides and on the top) so the assembled
operator is symmetric positive definite. It is factored once per grid.
"""
import logging
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.integrate import trapezoid
from scipy.sparse.linalg import splu

from ..errors import GridError, SolverError
from ..models.grid import Field2D, GridSpec, Profile1D

log = logging.getLogger("slipfield.elliptic")

RESIDUAL_TOL = 1e-10
DTN_BLOCK = 64


def _neumann_stiffness(n: int, h: float) -> sparse.csr_matrix:
    """Weighted negative second difference with reflection at both ends."""
    main = np.full(n, 2.0)
    main[0] = main[-1] = 1.0
    off = -np.ones(n - 1)
    return sparse.diags([off, main, off], [-1, 0, 1], format="csr") / h ** 2


def _dirichlet_neumann_stiffness(n: int, h: float) -> sparse.csr_matrix:
    """Rows j = 1..n: Dirichlet neighbour below row 1, reflection above row n."""
    main = np.full(n, 2.0)
    main[-1] = 1.0
    off = -np.ones(n - 1)
    return sparse.diags([off, main, off], [-1, 0, 1], format="csr") / h ** 2


@dataclass(frozen=True, eq=False)
class DiscreteLaplacian:
    """Weighted 5-point operator on the unknown rows j = 1..Ny.

    ``matrix`` acts on the unknowns ordered row-major by y then x.
    ``dirichlet_map`` sends slip values u(x_i, 0) to right-hand sides and
    ``traction_map`` sends nodal g/mu on the top to right-hand sides.
    """

    grid: GridSpec
    matrix: sparse.csc_matrix
    dirichlet_map: sparse.csr_matrix
    traction_map: sparse.csr_matrix
    factor: object

    @classmethod
    def assemble(cls, grid: GridSpec) -> "DiscreteLaplacian":
        nx, ny = grid.Nx + 1, grid.Ny
        wx = grid.trapezoid_weights
        wy = np.ones(ny)
        wy[-1] = 0.5

        matrix = (
            sparse.kron(sparse.diags(wy), _neumann_stiffness(nx, grid.dx))
            + sparse.kron(_dirichlet_neumann_stiffness(ny, grid.dy), sparse.diags(wx))
        ).tocsc()

        cols = np.arange(nx)
        dirichlet_map = sparse.csr_matrix(
            (wx / grid.dy ** 2, (cols, cols)), shape=(nx * ny, nx)
        )
        traction_map = sparse.csr_matrix(
            (wx / grid.dy, ((ny - 1) * nx + cols, cols)), shape=(nx * ny, nx)
        )
        started = time.perf_counter()
        factor = splu(matrix)
        log.debug(
            "Factored %d-unknown Laplacian for grid %s in %.3fs",
            nx * ny, grid, time.perf_counter() - started,
        )
        return cls(grid, matrix, dirichlet_map, traction_map, factor)

    def rhs(self, dirichlet_S, traction_over_mu) -> np.ndarray:
        nodes = self.grid.Nx + 1
        dirichlet = np.broadcast_to(np.asarray(dirichlet_S, dtype=float), (nodes,))
        traction = np.broadcast_to(np.asarray(traction_over_mu, dtype=float), (nodes,))
        return self.dirichlet_map @ dirichlet + self.traction_map @ traction

    def solve_interior(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for the unknown rows; ``rhs`` may hold several columns."""
        solution = self.factor.solve(np.asarray(rhs, dtype=float))
        residual = self.matrix @ solution - rhs
        scale = np.linalg.norm(rhs, axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        rel = float(np.max(np.linalg.norm(residual, axis=0) / scale))
        if not np.isfinite(rel) or rel > RESIDUAL_TOL:
            raise SolverError(f"Laplace solve on grid {self.grid} did not converge", residual=rel)
        return solution

    def assemble_field(self, dirichlet_S, interior: np.ndarray) -> Field2D:
        nodes = self.grid.Nx + 1
        values = np.empty((self.grid.Ny + 1, nodes))
        values[0] = np.broadcast_to(np.asarray(dirichlet_S, dtype=float), (nodes,))
        values[1:] = interior.reshape(self.grid.Ny, nodes)
        return Field2D(self.grid, values)

    def solve(self, dirichlet_S, g, mu: float) -> Field2D:
        if not mu > 0:
            raise ValueError(f"mu must be positive, got {mu}")
        rhs = self.rhs(dirichlet_S, np.asarray(g, dtype=float) / mu)
        return self.assemble_field(dirichlet_S, self.solve_interior(rhs))

    def quadratic_energy(self, interior: np.ndarray, rhs: np.ndarray) -> float:
        """0.5 u^T M u - rhs^T u, minimised by the discrete solution."""
        return float(0.5 * interior @ (self.matrix @ interior) - rhs @ interior)


@lru_cache(maxsize=4)
def discrete_laplacian(grid: GridSpec) -> DiscreteLaplacian:
    return DiscreteLaplacian.assemble(grid)


def _values(data) -> np.ndarray:
    return data.values if isinstance(data, (Profile1D, Field2D)) else np.asarray(data, dtype=float)


def solve_laplace(grid: GridSpec, dirichlet_S, g, mu: float) -> Field2D:
    """Harmonic field with slip data on S and traction g on the top.

    ``g`` is normally a scalar (uniform load); a nodal array gives a
    spatially varying traction.
    """
    return discrete_laplacian(grid).solve(_values(dirichlet_S), _values(g), mu)


def normal_derivative_S(field: Field2D) -> Profile1D:
    """Second-order one-sided u_y on S: (-3u0 + 4u1 - u2) / (2 dy)."""
    u = field.values
    if u.shape[0] < 3:
        raise GridError("normal derivative on S needs at least two cells in y")
    return Profile1D(field.grid, (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * field.grid.dy))


@dataclass(frozen=True, eq=False)
class DtnMap:
    """Dirichlet-to-Neumann map on S.

    u_y on S = matrix @ u_S + (g/mu) * traction_response, for uniform g.
    ``matrix`` is self-adjoint in the trapezoid inner product along S.
    """

    grid: GridSpec
    matrix: np.ndarray
    traction_response: Profile1D

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    def flux(self, u_S: np.ndarray, g: float, mu: float) -> np.ndarray:
        return self.matrix @ u_S + (g / mu) * self.traction_response.values

    def weighted(self) -> np.ndarray:
        """W @ matrix with W the trapezoid weights; symmetric negative semidefinite."""
        return self.grid.trapezoid_weights[:, None] * self.matrix


def _one_sided(rows_1: np.ndarray, rows_2: np.ndarray, rows_0, dy: float) -> np.ndarray:
    return (-3.0 * rows_0 + 4.0 * rows_1 - rows_2) / (2.0 * dy)


@lru_cache(maxsize=4)
def build_dtn(grid: GridSpec) -> DtnMap:
    """Exact Dirichlet-to-Neumann matrix of the discrete problem.

    Column k is the response to unit slip data at node k; columns are solved
    in blocks against the shared factorization.
    """
    started = time.perf_counter()
    lap = discrete_laplacian(grid)
    nodes = grid.Nx + 1
    identity = np.eye(nodes)

    matrix = np.empty((nodes, nodes))
    for start in range(0, nodes, DTN_BLOCK):
        stop = min(start + DTN_BLOCK, nodes)
        block = lap.solve_interior(lap.dirichlet_map[:, start:stop].toarray())
        matrix[:, start:stop] = _one_sided(
            block[:nodes], block[nodes:2 * nodes], identity[:, start:stop], grid.dy
        )

    unit_load = lap.solve_interior(lap.traction_map @ np.ones(nodes))
    response = _one_sided(unit_load[:nodes], unit_load[nodes:2 * nodes], 0.0, grid.dy)

    log.info(
        "Built %dx%d DtN map for grid %s in %.2fs",
        nodes, nodes, grid, time.perf_counter() - started,
    )
    return DtnMap(grid, matrix, Profile1D(grid, response))


def elastic_energy(field: Field2D, g_values, mu: float) -> float:
    """mu * integral |grad u|^2 - 2 * integral_top g u.

    Gradient per cell: averages of its two x-edge and two y-edge differences.
    Top integral: trapezoid rule.
    """
    grid = field.grid
    u = field.values
    ux = 0.5 * (np.diff(u[:-1], axis=1) + np.diff(u[1:], axis=1)) / grid.dx
    uy = 0.5 * (np.diff(u[:, :-1], axis=0) + np.diff(u[:, 1:], axis=0)) / grid.dy
    bulk = float(np.sum(ux ** 2 + uy ** 2) * grid.dx * grid.dy)

    g = np.broadcast_to(_values(g_values), (grid.Nx + 1,))
    work = float(trapezoid(g * u[-1], dx=grid.dx))
    return mu * bulk - 2.0 * work
