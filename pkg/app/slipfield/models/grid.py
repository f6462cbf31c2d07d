"""Rectangular domain (-L, L) x (0, H) and nodal fields on it.

Nodes are x_i = -L + i*dx (0 <= i <= Nx) and y_j = j*dy (0 <= j <= Ny).
Row j = 0 is the slip boundary S, row j = Ny is the loaded top Gamma_1 and
columns i = 0, Nx are the lateral surfaces Gamma_0.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import GridError

MIN_CELLS = 4


@dataclass(frozen=True)
class GridSpec:
    L: float = 2.0
    H: float = 2.0
    Nx: int = 256
    Ny: int = 128

    def __post_init__(self):
        if not self.L > 0:
            raise GridError(f"L must be positive, got {self.L}")
        if not self.H > 0:
            raise GridError(f"H must be positive, got {self.H}")
        for name in ("Nx", "Ny"):
            value = getattr(self, name)
            if int(value) != value or value < MIN_CELLS:
                raise GridError(f"{name} must be an integer >= {MIN_CELLS}, got {value}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.Nx

    @property
    def dy(self) -> float:
        return self.H / self.Ny

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.Nx + 1)

    @cached_property
    def y(self) -> np.ndarray:
        return self.dy * np.arange(self.Ny + 1)

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        """Trapezoid weights along S, without the dx factor."""
        w = np.ones(self.Nx + 1)
        w[0] = w[-1] = 0.5
        return w

    def __str__(self) -> str:
        return f"{self.Nx}x{self.Ny} on (-{self.L:g},{self.L:g})x(0,{self.H:g})"


def _frozen(values, shape: tuple, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.size != int(np.prod(shape)):
        raise GridError(f"{what} needs {int(np.prod(shape))} values, got {arr.size}")
    arr = arr.reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise GridError(f"{what} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Field2D:
    """Nodal values, shape (Ny+1, Nx+1): row-major by y then x."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        shape = (self.grid.Ny + 1, self.grid.Nx + 1)
        object.__setattr__(self, "values", _frozen(self.values, shape, "Field2D"))

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "Field2D":
        X, Y = np.meshgrid(grid.x, grid.y)
        return cls(grid, fn(X, Y))

    def trace_S(self) -> "Profile1D":
        return Profile1D(self.grid, self.values[0])

    def trace_top(self) -> "Profile1D":
        return Profile1D(self.grid, self.values[-1])


@dataclass(frozen=True, eq=False)
class Profile1D:
    """One value per slip-boundary node (Nx+1 entries)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, (self.grid.Nx + 1,), "Profile1D"))

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "Profile1D":
        return cls(grid, np.full(grid.Nx + 1, float(value)))

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "Profile1D":
        return cls(grid, fn(grid.x))

    def reflected(self) -> "Profile1D":
        return Profile1D(self.grid, self.values[::-1])
