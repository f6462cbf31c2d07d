"""Physical constants, boundary loads and initial slip profiles."""
import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np

from ..errors import LoadRangeError
from .grid import GridSpec, Profile1D


@dataclass(frozen=True)
class ModelParams:
    """Defaults are the reference parameter set (T, alpha, eps, beta, mu, b)."""

    alpha: float = 0.01
    eps: float = 0.04
    beta: float = 10.0
    mu: float = 10.0
    b: float = 0.06
    T: float = 4.0

    def __post_init__(self):
        for name in ("alpha", "eps", "beta", "mu", "b", "T"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value}")

    @property
    def gamma(self) -> float:
        return self.mu * self.b ** 2 / 2.0

    @property
    def well(self) -> float:
        """Slipped well of the potential, b/2."""
        return self.b / 2.0


@dataclass(frozen=True)
class ConstantLoad:
    g0: float = 0.0
    kind: Literal["constant"] = "constant"

    def __call__(self, t: float) -> float:
        return float(self.g0)


@dataclass(frozen=True)
class CosineLoad:
    amplitude: float = 1.0
    omega: float = 0.5
    kind: Literal["cosine"] = "cosine"

    def __call__(self, t: float) -> float:
        return float(self.amplitude * math.cos(self.omega * t))


@dataclass(frozen=True)
class TabulatedLoad:
    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    kind: Literal["table"] = "table"

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.times) < 2:
            raise ValueError("tabulated load needs at least two samples")
        if len(self.times) != len(self.values):
            raise ValueError("tabulated load needs as many values as times")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("tabulated load times must be strictly increasing")

    def __call__(self, t: float) -> float:
        if t < self.times[0] or t > self.times[-1]:
            raise LoadRangeError(
                f"load queried at t={t} outside samples [{self.times[0]}, {self.times[-1]}]"
            )
        return float(np.interp(t, self.times, self.values))


LoadSpec = Union[ConstantLoad, CosineLoad, TabulatedLoad]


def eval_load(load: LoadSpec, t: float) -> float:
    """Spatially uniform traction g(t) on the top boundary."""
    return load(t)


@dataclass(frozen=True)
class InitialCondition:
    """Heaviside step amplitude*H(x - x0), or a uniform slip value.

    The step takes the value amplitude at x >= x0. amplitude "b" is the full Burgers
    vector jump; "b_half" starts exactly in the wells.
    """

    kind: Literal["heaviside", "uniform"] = "heaviside"
    x0: float = 0.0
    amplitude: Literal["b", "b_half"] = "b"
    value: float = 0.0

    def profile(self, grid: GridSpec, params: ModelParams) -> Profile1D:
        if self.kind == "uniform":
            return Profile1D.constant(grid, self.value)
        if not -grid.L < self.x0 < grid.L:
            raise ValueError(f"x0={self.x0} must lie strictly inside (-{grid.L}, {grid.L})")
        height = params.b if self.amplitude == "b" else params.well
        return Profile1D(grid, np.where(grid.x >= self.x0, height, 0.0))


@dataclass(frozen=True)
class OutputSpec:
    snapshots: int = 50
    dir: str = "runs/latest"
    full_field: bool = False


@dataclass(frozen=True)
class SolverSpec:
    rtol: float = 1e-6
    atol: float = 1e-9
    max_order: int = 2


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration, as produced by config.parse_config."""

    grid: GridSpec = field(default_factory=GridSpec)
    params: ModelParams = field(default_factory=ModelParams)
    load: LoadSpec = field(default_factory=ConstantLoad)
    ic: InitialCondition = field(default_factory=InitialCondition)
    output: OutputSpec = field(default_factory=OutputSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    coupling: bool = True
