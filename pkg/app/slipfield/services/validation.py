"""Convergence checks for the Laplace solver and the DtN map.

Both use separable harmonic functions cos(k(x+L)) f(y) with k = m*pi/L,
which satisfy the lateral Neumann condition exactly.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, GridError
from ..models.grid import Field2D, GridSpec
from .elliptic import build_dtn, solve_laplace

log = logging.getLogger("slipfield.validation")

MIN_RATIO = 3.5
MAX_MODE_ERROR = 0.01
DEFAULT_MU = 10.0


def parse_grids(text: str) -> list[tuple[int, int]]:
    """'64x32,128x64' -> [(64, 32), (128, 64)]."""
    sizes = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            nx, ny = (int(v) for v in part.split("x"))
        except ValueError:
            raise ConfigError("grids", f"expected NXxNY, got {part!r}") from None
        sizes.append((nx, ny))
    if len(sizes) < 2:
        raise ConfigError("grids", "need at least two grid sizes to measure convergence")
    return sizes


def mode_wavenumber(grid: GridSpec, m: int) -> float:
    return m * math.pi / grid.L


def manufactured_error(grid: GridSpec, mu: float = DEFAULT_MU, m: int = 1) -> float:
    """Max nodal error for u = cos(k(x+L)) cosh(ky), traction g = mu k sinh(kH) cos(k(x+L))."""
    k = mode_wavenumber(grid, m)
    exact = Field2D.from_function(grid, lambda X, Y: np.cos(k * (X + grid.L)) * np.cosh(k * Y))
    mode = np.cos(k * (grid.x + grid.L))
    g = mu * k * math.sinh(k * grid.H) * mode
    approx = solve_laplace(grid, mode, g, mu)
    return float(np.max(np.abs(approx.values - exact.values)))


def dtn_mode_error(grid: GridSpec, m: int) -> float:
    """Relative max error of A cos(k(x+L)) against -k tanh(kH) cos(k(x+L))."""
    k = mode_wavenumber(grid, m)
    mode = np.cos(k * (grid.x + grid.L))
    eigenvalue = -k * math.tanh(k * grid.H)
    response = build_dtn(grid).matrix @ mode
    return float(np.max(np.abs(response - eigenvalue * mode)) / (abs(eigenvalue) * np.max(np.abs(mode))))


@dataclass
class ValidationReport:
    grids: list[GridSpec]
    errors: list[float] = field(default_factory=list)
    ratios: list[float] = field(default_factory=list)
    mode_errors: dict[int, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r >= MIN_RATIO for r in self.ratios) and all(
            e <= MAX_MODE_ERROR for e in self.mode_errors.values()
        )

    def lines(self) -> list[str]:
        out = []
        for i, (grid, err) in enumerate(zip(self.grids, self.errors)):
            line = f"{grid.Nx}x{grid.Ny}: max error {err:.3e}"
            if i > 0:
                line += f", ratio {self.ratios[i - 1]:.2f}"
            out.append(line)
        finest = self.grids[-1]
        for m, err in sorted(self.mode_errors.items()):
            out.append(f"DtN mode m={m} on {finest.Nx}x{finest.Ny}: relative error {err:.3e}")
        out.append("PASS" if self.passed else "FAIL")
        return out


def validate(
    sizes: list[tuple[int, int]],
    *,
    L: float = 2.0,
    H: float = 2.0,
    mu: float = DEFAULT_MU,
    modes: tuple[int, ...] = (1, 2),
) -> ValidationReport:
    if len(sizes) < 2:
        raise ConfigError("grids", "need at least two grid sizes to measure convergence")
    try:
        grids = [GridSpec(L=L, H=H, Nx=nx, Ny=ny) for nx, ny in sizes]
    except GridError as exc:
        raise ConfigError("grids", str(exc)) from exc
    report = ValidationReport(grids=grids)
    for grid in grids:
        err = manufactured_error(grid, mu)
        report.errors.append(err)
        log.info("Manufactured solution on %s: max error %.3e", grid, err)
    report.ratios = [a / b if b > 0 else math.inf for a, b in zip(report.errors, report.errors[1:])]
    for m in modes:
        report.mode_errors[m] = dtn_mode_error(grids[-1], m)
    return report
