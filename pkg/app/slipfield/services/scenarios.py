"""Experiment presets and the end-to-end run.

A scenario is a set of configuration keys layered under the user's document:
explicit user keys always win, and every conflict is logged.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from ..config import build_config
from ..errors import ConfigError, IntegrationError
from ..log import RUN_LOG_NAME, configure_logging, detach_file_handlers
from ..models.grid import Profile1D
from ..models.params import ConstantLoad, RunConfig
from ..models.state import SimState, TimeSeries
from ..storage.outputs import (
    RunOutput,
    summarize,
    write_field,
    write_profiles,
    write_resolved_config,
    write_summary,
    write_timeseries,
)
from ..utils import ensure_dir, iso_now
from .dynamics import predicted_wall_speed
from .elliptic import build_dtn, solve_laplace
from .integrator import integrate

log = logging.getLogger("slipfield.scenarios")


@dataclass(frozen=True)
class Scenario:
    name: str
    overrides: Mapping[str, object] = field(default_factory=dict)

    def merge(self, document: Mapping[str, object]) -> dict:
        merged = dict(self.overrides)
        for key, value in document.items():
            if key in self.overrides and self.overrides[key] != value:
                log.warning(
                    "Scenario %s sets %s=%r; keeping explicit value %r",
                    self.name, key, self.overrides[key], value,
                )
            merged[key] = value
        return merged

    def resolve(self, document: Mapping[str, object]) -> RunConfig:
        return build_config(self.merge(document))


SCENARIOS = {
    "constant": Scenario(
        "constant",
        {"load.kind": "constant", "load.g0": 0.5, "ic.kind": "heaviside", "ic.x0": 1.8},
    ),
    "periodic": Scenario(
        "periodic",
        {
            "load.kind": "cosine",
            "load.amplitude": 1.0,
            "load.omega": 0.5,
            "ic.kind": "heaviside",
            "ic.x0": 0.0,
            "T": 8.0 * math.pi,
        },
    ),
    "custom": Scenario("custom"),
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ConfigError("scenario", f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}") from None


def run(cfg: RunConfig, out_dir: Optional[str | Path] = None, *, scenario: str = "custom") -> RunOutput:
    """Integrate ``cfg`` and write the run directory.

    On IntegrationError the snapshots gathered so far are still written and
    the error is re-raised.
    """
    out = RunOutput(ensure_dir(out_dir or cfg.output.dir))
    configure_logging(log_file=out.directory / RUN_LOG_NAME)
    try:
        return _run(cfg, out, scenario)
    finally:
        detach_file_handlers()


def _run(cfg: RunConfig, out: RunOutput, scenario: str) -> RunOutput:
    grid, params = cfg.grid, cfg.params
    log.info("Run %s started %s: grid %s, T=%g, load %s", scenario, iso_now(), grid, params.T, cfg.load)
    write_resolved_config(out, cfg)

    predicted = None
    if isinstance(cfg.load, ConstantLoad) and cfg.load.g0 != 0 and cfg.coupling:
        predicted = predicted_wall_speed(params, cfg.load.g0)
        log.info("Predicted flat-wall velocity %.4f", predicted)

    dtn = build_dtn(grid)
    snapshots: list[tuple[float, Profile1D]] = []

    def collect(state: SimState) -> None:
        index = len(snapshots)
        snapshots.append((state.t, state.u_S))
        if cfg.output.full_field:
            field = solve_laplace(grid, state.u_S, cfg.load(state.t), params.mu)
            write_field(out, index, field)

    state0 = SimState(t=0.0, u_S=cfg.ic.profile(grid, params))
    try:
        series: TimeSeries = integrate(
            state0,
            params,
            dtn,
            cfg.load,
            [collect],
            snapshots=cfg.output.snapshots,
            solver=cfg.solver,
            coupling=cfg.coupling,
        )
    except IntegrationError:
        write_profiles(out, snapshots)
        log.warning(
            "Partial outputs: %d of %d snapshots written to %s",
            len(snapshots), cfg.output.snapshots, out.profiles,
        )
        raise

    write_timeseries(out, series)
    write_profiles(out, snapshots)
    summary = summarize(series, predicted, grid.L)
    summary["scenario"] = scenario
    write_summary(out, summary)

    if summary["annihilation_time"] is not None:
        log.info("Dislocation annihilated at t=%.4g", summary["annihilation_time"])
    expected = summary["predicted_annihilation_time"]
    if expected is not None and expected > params.T:
        log.warning(
            "Flat-wall estimate reaches the surface at t=%.4g, after the horizon T=%g", expected, params.T
        )
    if summary["multiple_crossing_snapshots"]:
        log.warning("%d snapshots crossed b/4 more than once", summary["multiple_crossing_snapshots"])
    log.info("Run %s finished; outputs in %s", scenario, out.directory)
    return out
