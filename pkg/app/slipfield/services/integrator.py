"""Variable-step, variable-order (1..2) BDF integration of the slip equation.

The solver follows the quasi-constant step-size BDF layout of scipy's BDF
(backward differences rescaled on every step change, predictor from the
interpolating polynomial, error = C_k * (corrector - predictor)), capped at
second order. Newton iterations use the exact Jacobian evaluated at the
predictor of every attempted step.
"""
import logging
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.integrate import DenseOutput, OdeSolver
from scipy.linalg import lu_factor, lu_solve

from ..errors import IntegrationError
from ..models.grid import Profile1D
from ..models.params import LoadSpec, ModelParams, SolverSpec
from ..models.state import Record, SimState, StepStats, TimeSeries
from .dynamics import SlipDynamics, level_crossings, total_energy, track_position
from .elliptic import DtnMap

log = logging.getLogger("slipfield.integrator")

MAX_ORDER = 2
NEWTON_MAXITER = 4
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
MIN_STEP = 1e-12
EPS = np.finfo(float).eps

Observer = Callable[[SimState], None]


def _rms(x: np.ndarray) -> float:
    return float(np.linalg.norm(x) / x.size ** 0.5)


def _compute_R(order: int, factor: float) -> np.ndarray:
    I = np.arange(1, order + 1)[:, None]
    J = np.arange(1, order + 1)
    M = np.zeros((order + 1, order + 1))
    M[1:, 1:] = (I - 1 - factor * J) / I
    M[0] = 1
    return np.cumprod(M, axis=0)


def _change_D(D: np.ndarray, order: int, factor: float) -> None:
    """Rescale the difference table for a new step h_new = factor * h."""
    R = _compute_R(order, factor)
    U = _compute_R(order, 1)
    RU = R.dot(U)
    D[:order + 1] = np.dot(RU.T, D[:order + 1])


class BdfDenseOutput(DenseOutput):
    def __init__(self, t_old, t, h, order, D):
        super().__init__(t_old, t)
        self.order = order
        self.t_shift = self.t - h * np.arange(self.order)
        self.denom = h * (1 + np.arange(self.order))
        self.D = D

    def _call_impl(self, t):
        if t.ndim == 0:
            x = (t - self.t_shift) / self.denom
            p = np.cumprod(x)
        else:
            x = (t - self.t_shift[:, None]) / self.denom[:, None]
            p = np.cumprod(x, axis=0)
        y = np.dot(self.D[1:].T, p)
        if y.ndim == 1:
            y += self.D[0]
        else:
            y += self.D[0, :, None]
        return y


class BoundedBDF(OdeSolver):
    """BDF of order 1..max_order with exact-Jacobian Newton iterations."""

    def __init__(
        self,
        fun,
        t0: float,
        y0: np.ndarray,
        t_bound: float,
        *,
        jac: Callable[[float, np.ndarray], np.ndarray],
        rtol: float = 1e-6,
        atol: float = 1e-9,
        max_order: int = MAX_ORDER,
        first_step: Optional[float] = None,
        min_step: float = MIN_STEP,
    ):
        super().__init__(fun, t0, y0, t_bound, vectorized=False)
        if not 1 <= max_order <= MAX_ORDER:
            raise ValueError(f"max_order must be in 1..{MAX_ORDER}, got {max_order}")
        self.max_order = max_order
        self.rtol = rtol
        self.atol = atol
        self.min_step = min_step
        self.jac = jac
        self.I = np.identity(self.n)

        f = self.fun(self.t, self.y)
        if first_step is None:
            self.h_abs = self._initial_step(f)
        else:
            self.h_abs = first_step
        self.newton_tol = max(10 * EPS / rtol, min(0.03, rtol ** 0.5))

        self.gamma = np.hstack((0, np.cumsum(1 / np.arange(1, MAX_ORDER + 1))))
        self.alpha = self.gamma
        self.error_const = 1 / np.arange(1, MAX_ORDER + 2)

        D = np.zeros((MAX_ORDER + 3, self.n))
        D[0] = self.y
        D[1] = f * self.h_abs * self.direction
        self.D = D
        self.order = 1
        self.n_equal_steps = 0

        self.accepted = 0
        self.rejected = 0
        self.newton_iterations = 0

    def _initial_step(self, f0: np.ndarray) -> float:
        span = abs(self.t_bound - self.t)
        if span == 0:
            return 0.0
        scale = self.atol + np.abs(self.y) * self.rtol
        d0 = _rms(self.y / scale)
        d1 = _rms(f0 / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, span)
        y1 = self.y + h0 * self.direction * f0
        f1 = self.fun(self.t + h0 * self.direction, y1)
        d2 = _rms((f1 - f0) / scale) / h0
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.5
        return min(100 * h0, h1, span)

    def _solve_bdf_system(self, t_new, y_predict, c, psi, LU, scale):
        d = 0
        y = y_predict.copy()
        dy_norm_old = None
        converged = False
        k = 0
        for k in range(NEWTON_MAXITER):
            f = self.fun(t_new, y)
            if not np.all(np.isfinite(f)):
                break
            dy = lu_solve(LU, c * f - psi - d)
            dy_norm = _rms(dy / scale)
            rate = None if dy_norm_old is None else dy_norm / dy_norm_old
            if rate is not None and (
                rate >= 1 or rate ** (NEWTON_MAXITER - k) / (1 - rate) * dy_norm > self.newton_tol
            ):
                break
            y += dy
            d += dy
            if dy_norm == 0 or (rate is not None and rate / (1 - rate) * dy_norm < self.newton_tol):
                converged = True
                break
            dy_norm_old = dy_norm
        return converged, k + 1, y, d

    def _step_impl(self):
        t = self.t
        D = self.D
        order = self.order
        h_abs = self.h_abs

        step_accepted = False
        while not step_accepted:
            if h_abs < self.min_step:
                return False, f"step size {h_abs:.3e} fell below {self.min_step:.1e} at t={t:.6g}"

            h = h_abs * self.direction
            t_new = t + h
            if self.direction * (t_new - self.t_bound) > 0:
                t_new = self.t_bound
                _change_D(D, order, np.abs(t_new - t) / h_abs)
                self.n_equal_steps = 0
            h = t_new - t
            h_abs = np.abs(h)

            y_predict = np.sum(D[:order + 1], axis=0)
            scale = self.atol + self.rtol * np.abs(y_predict)
            psi = np.dot(D[1:order + 1].T, self.gamma[1:order + 1]) / self.alpha[order]
            c = h / self.alpha[order]

            J = self.jac(t_new, y_predict)
            self.njev += 1
            LU = lu_factor(self.I - c * J, overwrite_a=True, check_finite=False)
            self.nlu += 1
            converged, n_iter, y_new, d = self._solve_bdf_system(t_new, y_predict, c, psi, LU, scale)
            self.newton_iterations += n_iter

            if not converged:
                log.debug("Newton failed at t=%.6g h=%.3e; halving step", t_new, h_abs)
                self.rejected += 1
                factor = 0.5
                h_abs *= factor
                _change_D(D, order, factor)
                self.n_equal_steps = 0
                continue

            safety = 0.9 * (2 * NEWTON_MAXITER + 1) / (2 * NEWTON_MAXITER + n_iter)
            scale = self.atol + self.rtol * np.abs(y_new)
            error_norm = _rms(self.error_const[order] * d / scale)
            if error_norm > 1:
                self.rejected += 1
                factor = max(MIN_FACTOR, safety * error_norm ** (-1 / (order + 1)))
                h_abs *= factor
                _change_D(D, order, factor)
                self.n_equal_steps = 0
            else:
                step_accepted = True

        self.accepted += 1
        self.n_equal_steps += 1
        self.t = t_new
        self.y = y_new
        self.h_abs = h_abs

        # d is the (order+1)-th backward difference of the new solution.
        D[order + 2] = d - D[order + 1]
        D[order + 1] = d
        for i in reversed(range(order + 1)):
            D[i] += D[i + 1]

        if self.n_equal_steps < order + 1:
            return True, None

        if order > 1:
            error_m_norm = _rms(self.error_const[order - 1] * D[order] / scale)
        else:
            error_m_norm = np.inf
        if order < self.max_order:
            error_p_norm = _rms(self.error_const[order + 1] * D[order + 2] / scale)
        else:
            error_p_norm = np.inf

        error_norms = np.array([error_m_norm, error_norm, error_p_norm])
        with np.errstate(divide="ignore"):
            factors = error_norms ** (-1 / np.arange(order, order + 3))

        delta_order = int(np.argmax(factors)) - 1
        order += delta_order
        self.order = order

        factor = min(MAX_FACTOR, safety * np.max(factors))
        self.h_abs *= factor
        _change_D(D, order, factor)
        self.n_equal_steps = 0
        return True, None

    def _dense_output_impl(self):
        return BdfDenseOutput(
            self.t_old,
            self.t,
            self.h_abs * self.direction,
            self.order,
            self.D[:self.order + 1].copy(),
        )

    def step_stats(self) -> StepStats:
        return StepStats(
            accepted=self.accepted,
            rejected=self.rejected,
            newton_iterations=self.newton_iterations,
            jacobian_evaluations=self.njev,
            rhs_evaluations=self.nfev,
        )


def snapshot_times(t0: float, T: float, count: int) -> np.ndarray:
    """``count`` uniformly spaced levels including both ends."""
    return np.linspace(t0, T, count)


def integrate(
    state0: SimState,
    params: ModelParams,
    dtn: DtnMap,
    load: LoadSpec,
    observers: Iterable[Observer] = (),
    *,
    snapshots: int = 50,
    solver: SolverSpec = SolverSpec(),
    coupling: bool = True,
) -> TimeSeries:
    """Advance the slip profile from state0.t to params.T.

    At every snapshot time the position and energies are recorded and each
    observer receives the SimState.
    """
    grid = dtn.grid
    observers = list(observers)
    dynamics = SlipDynamics(dtn, params, load, coupling=coupling)
    times = snapshot_times(state0.t, params.T, snapshots)
    series = TimeSeries()
    multiple_crossings_seen = False

    def record(t: float, u: np.ndarray, stats: StepStats) -> None:
        nonlocal multiple_crossings_seen
        profile = Profile1D(grid, u)
        state = SimState(t=float(t), u_S=profile, stats=stats)
        report = total_energy(profile, float(t), grid, params, load, dtn=dtn, coupling=coupling)
        crossings = level_crossings(profile, params.b / 4.0)
        position = track_position(profile, params)
        if not multiple_crossings_seen and len(crossings) > 1:
            multiple_crossings_seen = True
            log.warning("Slip profile crosses b/4 more than once at t=%.4g; tracking the leftmost", t)
        series.append(Record(t=float(t), position=position, energy=report, crossings=len(crossings)))
        for observer in observers:
            observer(state)

    record(times[0], state0.u_S.values.copy(), state0.stats)

    ode = BoundedBDF(
        dynamics.rhs,
        state0.t,
        state0.u_S.values.copy(),
        params.T,
        jac=dynamics.jacobian,
        rtol=solver.rtol,
        atol=solver.atol,
        max_order=solver.max_order,
    )
    k = 1
    while ode.status == "running" and k < len(times):
        message = ode.step()
        if ode.status == "failed":
            stats = ode.step_stats()
            last = SimState(t=float(ode.t), u_S=Profile1D(grid, ode.y), stats=stats)
            log.error("Integration failed: %s (%d accepted steps)", message, stats.accepted)
            raise IntegrationError(f"integration failed: {message}", state=last)
        dense = None
        while k < len(times) and times[k] <= ode.t:
            if times[k] == ode.t:
                u = ode.y.copy()
            else:
                dense = dense or ode.dense_output()
                u = dense(times[k])
            record(times[k], u, ode.step_stats())
            k += 1
        log.debug("t=%.6g h=%.3e order=%d", ode.t, ode.h_abs, ode.order)

    stats = ode.step_stats()
    log.info(
        "Integrated to t=%.4g: %d accepted, %d rejected steps, %d Newton iterations",
        ode.t, stats.accepted, stats.rejected, stats.newton_iterations,
    )
    series.fill_dissipation_lhs()
    return series
