"""Run directory layout and writers.

Every file is rendered in memory and swapped in with utils.save_text, so a
crashed run never leaves a half-written CSV behind.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from ..config import render_config
from ..log import RUN_LOG_NAME
from ..models.grid import Field2D, Profile1D
from ..models.params import RunConfig
from ..models.state import TimeSeries
from ..utils import save_json, save_text

TIMESERIES_NAME = "timeseries.csv"
PROFILES_NAME = "profiles.csv"
CONFIG_NAME = "config.resolved"
SUMMARY_NAME = "summary.json"

TIMESERIES_COLUMNS = [
    "t", "position", "E0", "E1", "E_total", "dissipation_lhs", "dissipation_rhs", "crossings",
]
PROFILE_COLUMNS = ["snapshot_index", "t", "x", "u"]
FIELD_HEADER = "Nx,Ny,L,H"


@dataclass(frozen=True)
class RunOutput:
    directory: Path

    @property
    def timeseries(self) -> Path:
        return self.directory / TIMESERIES_NAME

    @property
    def profiles(self) -> Path:
        return self.directory / PROFILES_NAME

    @property
    def config(self) -> Path:
        return self.directory / CONFIG_NAME

    @property
    def log(self) -> Path:
        return self.directory / RUN_LOG_NAME

    @property
    def summary(self) -> Path:
        return self.directory / SUMMARY_NAME

    def field(self, index: int) -> Path:
        return self.directory / f"field_{index}.csv"


def timeseries_frame(series: TimeSeries) -> pd.DataFrame:
    rows = [
        {
            "t": r.t,
            "position": r.position,
            "E0": r.energy.E0,
            "E1": r.energy.E1,
            "E_total": r.energy.E_total,
            "dissipation_lhs": r.energy.dissipation_lhs,
            "dissipation_rhs": r.energy.dissipation_rhs,
            "crossings": r.crossings,
        }
        for r in series
    ]
    frame = pd.DataFrame(rows, columns=TIMESERIES_COLUMNS, dtype=float)
    return frame.astype({"crossings": int})


def profiles_frame(snapshots: Sequence[tuple[float, Profile1D]]) -> pd.DataFrame:
    if not snapshots:
        return pd.DataFrame(columns=PROFILE_COLUMNS)
    x = snapshots[0][1].grid.x
    n = x.size
    return pd.DataFrame({
        "snapshot_index": np.repeat(np.arange(len(snapshots)), n),
        "t": np.repeat([t for t, _ in snapshots], n),
        "x": np.tile(x, len(snapshots)),
        "u": np.concatenate([p.values for _, p in snapshots]),
    })


def write_timeseries(out: RunOutput, series: TimeSeries) -> Path:
    return save_text(out.timeseries, timeseries_frame(series).to_csv(index=False))


def write_profiles(out: RunOutput, snapshots: Sequence[tuple[float, Profile1D]]) -> Path:
    return save_text(out.profiles, profiles_frame(snapshots).to_csv(index=False))


def write_resolved_config(out: RunOutput, cfg: RunConfig) -> Path:
    return save_text(out.config, render_config(cfg))


def write_field(out: RunOutput, index: int, field: Field2D) -> Path:
    """First line: Nx,Ny,L,H values. Then one row per y level, j = 0..Ny."""
    grid = field.grid
    header = f"{grid.Nx},{grid.Ny},{grid.L!r},{grid.H!r}\n"
    body = pd.DataFrame(field.values).to_csv(index=False, header=False)
    return save_text(out.field(index), header + body)


def write_summary(out: RunOutput, summary: dict) -> Path:
    return save_json(out.summary, summary)


def read_timeseries(path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def read_field(path) -> tuple[dict, np.ndarray]:
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().strip().split(",")
    meta = dict(zip(FIELD_HEADER.split(","), first))
    meta = {"Nx": int(meta["Nx"]), "Ny": int(meta["Ny"]), "L": float(meta["L"]), "H": float(meta["H"])}
    values = pd.read_csv(path, skiprows=1, header=None, float_precision="round_trip").to_numpy(dtype=float)
    return meta, values


def predicted_annihilation_time(series: TimeSeries, speed: Optional[float], L: float) -> Optional[float]:
    """Time at which a wall moving at ``speed`` from its first tracked position reaches x = -L or x = L."""
    if not speed:
        return None
    first = next((r for r in series if r.position is not None), None)
    if first is None:
        return None
    target = -L if speed < 0 else L
    return first.t + (target - first.position) / speed


def summarize(
    series: TimeSeries,
    predicted_speed: Optional[float] = None,
    L: Optional[float] = None,
) -> dict:
    """Annihilation time and mean tracked velocity of a finished run.

    With ``predicted_speed`` and the half width ``L`` the flat-wall
    annihilation time is reported next to the measured one.
    """
    tracked = [(r.t, r.position) for r in series if r.position is not None]
    annihilation = None
    seen = False
    for r in series:
        if r.position is not None:
            seen = True
        elif seen:
            annihilation = r.t
            break
    mean_velocity = None
    if len(tracked) >= 2 and tracked[-1][0] > tracked[0][0]:
        mean_velocity = (tracked[-1][1] - tracked[0][1]) / (tracked[-1][0] - tracked[0][0])
    return {
        "snapshots": len(series),
        "tracked_snapshots": len(tracked),
        "annihilation_time": annihilation,
        "last_position": tracked[-1][1] if tracked else None,
        "mean_velocity": mean_velocity,
        "predicted_wall_speed": predicted_speed,
        "predicted_annihilation_time": (
            predicted_annihilation_time(series, predicted_speed, L) if L is not None else None
        ),
        "multiple_crossing_snapshots": sum(1 for r in series if r.crossings > 1),
    }
