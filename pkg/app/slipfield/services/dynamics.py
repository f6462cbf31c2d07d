"""Slip-boundary evolution: alpha u_t = eps u_xx - W'(u) + gamma u_y.

u_y on S comes from the precomputed DtN map, so the 2D problem is only
solved again when energies or full fields are requested. The phase field is
phi = 2u/b; the wells of W sit at u = 0 and u = b/2.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.integrate import trapezoid

from ..models.grid import GridSpec, Profile1D
from ..models.params import LoadSpec, ModelParams, eval_load
from ..models.state import EnergyReport
from .elliptic import DtnMap, build_dtn, elastic_energy, solve_laplace

log = logging.getLogger("slipfield.dynamics")


@dataclass(frozen=True)
class Potential:
    """W(s) = (4 beta / b^2) s^2 (b/2 - s)^2."""

    beta: float
    b: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "Potential":
        return cls(beta=params.beta, b=params.b)

    @property
    def coefficient(self) -> float:
        return 4.0 * self.beta / self.b ** 2


def potential_W(s, p: Potential):
    q = p.b / 2.0 - s
    return p.coefficient * s ** 2 * q ** 2


def potential_dW(s, p: Potential):
    q = p.b / 2.0 - s
    return p.coefficient * (2.0 * s * q ** 2 - 2.0 * s ** 2 * q)


def potential_d2W(s, p: Potential):
    q = p.b / 2.0 - s
    return p.coefficient * (2.0 * q ** 2 - 8.0 * s * q + 2.0 * s ** 2)


def double_well_F(phi):
    return phi ** 2 * (1.0 - phi) ** 2


def double_well_dF(phi):
    return 2.0 * phi * (1.0 - phi) * (1.0 - 2.0 * phi)


def phase_field(u_S: Profile1D, params: ModelParams) -> np.ndarray:
    return 2.0 * u_S.values / params.b


def second_difference(grid: GridSpec) -> sparse.csr_matrix:
    """u_xx with reflected ghost nodes at x = -L and x = L."""
    n = grid.Nx + 1
    lower = np.ones(n - 1)
    upper = np.ones(n - 1)
    upper[0] = 2.0
    lower[-1] = 2.0
    main = np.full(n, -2.0)
    return sparse.diags([lower, main, upper], [-1, 0, 1], format="csr") / grid.dx ** 2


class SlipDynamics:
    """Right-hand side and exact Jacobian of the semi-discrete slip equation."""

    def __init__(
        self,
        dtn: DtnMap,
        params: ModelParams,
        load: LoadSpec,
        *,
        coupling: bool = True,
    ):
        self.grid = dtn.grid
        self.dtn = dtn
        self.params = params
        self.load = load
        self.coupling = coupling
        self.potential = Potential.from_params(params)
        self.uxx = second_difference(self.grid)
        self._linear = params.eps * self.uxx.toarray()
        if coupling:
            self._linear += params.gamma * dtn.matrix

    def force(self, t: float, u: np.ndarray) -> np.ndarray:
        p = self.params
        out = p.eps * (self.uxx @ u) - potential_dW(u, self.potential)
        if self.coupling:
            out += p.gamma * self.dtn.flux(u, eval_load(self.load, t), p.mu)
        return out

    def rhs(self, t: float, u: np.ndarray) -> np.ndarray:
        return self.force(t, u) / self.params.alpha

    def jacobian(self, t: float, u: np.ndarray) -> np.ndarray:
        jac = self._linear.copy()
        jac[np.diag_indices_from(jac)] -= potential_d2W(u, self.potential)
        return jac / self.params.alpha


def rhs(
    u_S: Profile1D,
    t: float,
    dtn: DtnMap,
    params: ModelParams,
    load: LoadSpec,
    *,
    coupling: bool = True,
) -> Profile1D:
    dyn = SlipDynamics(dtn, params, load, coupling=coupling)
    return Profile1D(u_S.grid, dyn.rhs(t, u_S.values))


def jacobian(
    u_S: Profile1D,
    dtn: DtnMap,
    params: ModelParams,
    load: LoadSpec,
    *,
    coupling: bool = True,
) -> np.ndarray:
    return SlipDynamics(dtn, params, load, coupling=coupling).jacobian(0.0, u_S.values)


def interface_energy(u_S: Profile1D, params: ModelParams) -> float:
    """E0 = integral of eps/2 phi_x^2 + beta F(phi), phi = 2u/b."""
    phi = phase_field(u_S, params)
    dx = u_S.grid.dx
    phi_x = np.gradient(phi, dx, edge_order=2)
    density = 0.5 * params.eps * phi_x ** 2 + params.beta * double_well_F(phi)
    return float(trapezoid(density, dx=dx))


def total_energy(
    u_S: Profile1D,
    t: float,
    grid: GridSpec,
    params: ModelParams,
    load: LoadSpec,
    *,
    dtn: Optional[DtnMap] = None,
    coupling: bool = True,
) -> EnergyReport:
    """Energies at one instant plus the dissipation rate -alpha (4/b^2) int u_t^2.

    dissipation_lhs needs neighbouring samples and is filled in by
    TimeSeries.fill_dissipation_lhs.
    """
    g = eval_load(load, t)
    E0 = interface_energy(u_S, params)
    if coupling:
        field = solve_laplace(grid, u_S, g, params.mu)
        E1 = elastic_energy(field, g, params.mu)
    else:
        E1 = 0.0
    dtn = dtn if dtn is not None else build_dtn(grid)
    u_t = SlipDynamics(dtn, params, load, coupling=coupling).rhs(t, u_S.values)
    dissipation = -params.alpha * (4.0 / params.b ** 2) * float(trapezoid(u_t ** 2, dx=grid.dx))
    return EnergyReport(t=t, E0=E0, E1=E1, E_total=E0 + E1, dissipation_rhs=dissipation)


def level_crossings(u_S: Profile1D, level: float) -> list[float]:
    """x of every sign change of u - level, linearly interpolated, left to right."""
    d = u_S.values - level
    above = d >= 0
    idx = np.flatnonzero(above[:-1] != above[1:])
    x = u_S.grid.x
    return [float(x[i] + u_S.grid.dx * d[i] / (d[i] - d[i + 1])) for i in idx]


def track_position(u_S: Profile1D, params: ModelParams) -> Optional[float]:
    """Dislocation position: leftmost crossing of the level b/4, or None."""
    crossings = level_crossings(u_S, params.b / 4.0)
    if not crossings:
        return None
    if len(crossings) > 1:
        log.debug("Profile crosses b/4 %d times; reporting leftmost", len(crossings))
    return crossings[0]


def predicted_wall_speed(params: ModelParams, g: float) -> float:
    """Velocity of a flat wall (slipped side on the right) under uniform load g.

    Balances the driving force gamma*g/mu over the jump b/2 against the
    dissipation of the equipartition profile, int u'^2 dx.
    """
    jump = params.well
    profile_integral = jump ** 3 / 6.0 * math.sqrt(2.0 / params.eps) * 2.0 * math.sqrt(params.beta) / params.b
    speed = params.gamma * (g / params.mu) * jump / (params.alpha * profile_integral)
    return -speed
