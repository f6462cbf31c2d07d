"""
Configuration loading for slipfield runs.

The configuration is a flat JSON object. Keys are literal strings, dotted
names included ("load.kind", "ic.x0", ...). Everything optional falls back to
the reference parameter set.

This is the single source of truth for config parsing and rendering.
"""

import json
import logging
import os
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError
from .models.grid import GridSpec
from .models.params import (
    ConstantLoad,
    CosineLoad,
    InitialCondition,
    ModelParams,
    OutputSpec,
    RunConfig,
    SolverSpec,
    TabulatedLoad,
)

log = logging.getLogger("slipfield.config")

CONFIG_ENV_VAR = "SLIPFIELD_CONFIG"


class ConfigDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    L: float = Field(2.0, gt=0, allow_inf_nan=False)
    H: float = Field(2.0, gt=0, allow_inf_nan=False)
    Nx: int = Field(256, ge=4)
    Ny: int = Field(128, ge=4)
    T: float = Field(4.0, gt=0, allow_inf_nan=False)
    alpha: float = Field(0.01, gt=0, allow_inf_nan=False)
    eps: float = Field(0.04, gt=0, allow_inf_nan=False)
    beta: float = Field(10.0, gt=0, allow_inf_nan=False)
    mu: float = Field(10.0, gt=0, allow_inf_nan=False)
    b: float = Field(0.06, gt=0, allow_inf_nan=False)

    load_kind: Literal["constant", "cosine", "table"] = Field("constant", alias="load.kind")
    load_g0: float = Field(0.0, alias="load.g0", allow_inf_nan=False)
    load_amplitude: float = Field(1.0, alias="load.amplitude", allow_inf_nan=False)
    load_omega: float = Field(0.5, alias="load.omega", allow_inf_nan=False)
    load_times: Optional[list[float]] = Field(None, alias="load.times")
    load_values: Optional[list[float]] = Field(None, alias="load.values")

    ic_kind: Literal["heaviside", "uniform"] = Field("heaviside", alias="ic.kind")
    ic_x0: float = Field(0.0, alias="ic.x0", allow_inf_nan=False)
    ic_amplitude: Literal["b", "b_half"] = Field("b", alias="ic.amplitude")
    ic_value: float = Field(0.0, alias="ic.value", allow_inf_nan=False)

    output_snapshots: int = Field(50, ge=2, alias="output.snapshots")
    output_dir: str = Field("runs/latest", alias="output.dir")
    output_full_field: bool = Field(False, alias="output.full_field")

    solver_rtol: float = Field(1e-6, gt=0, lt=1, alias="solver.rtol")
    solver_atol: float = Field(1e-9, gt=0, alias="solver.atol")
    solver_max_order: int = Field(2, ge=1, le=2, alias="solver.max_order")

    coupling: bool = True


KNOWN_KEYS = frozenset(
    field.alias or name for name, field in ConfigDocument.model_fields.items()
)


def read_document(text: str) -> dict:
    """Parse JSON text into a flat key/value dict without validating values."""
    if not text.strip():
        return {}
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(None, f"malformed configuration document: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(None, "configuration document must be a JSON object")
    return document


def _check_cross_fields(doc: ConfigDocument) -> None:
    if doc.ic_kind == "heaviside" and not -doc.L < doc.ic_x0 < doc.L:
        raise ConfigError("ic.x0", f"must lie strictly inside (-{doc.L}, {doc.L}), got {doc.ic_x0}")
    if doc.load_kind == "table":
        if not doc.load_times or not doc.load_values:
            raise ConfigError("load.times", "load.kind 'table' needs load.times and load.values")
        if len(doc.load_times) != len(doc.load_values):
            raise ConfigError("load.values", "must have as many entries as load.times")
        if len(doc.load_times) < 2:
            raise ConfigError("load.times", "needs at least two samples")
        if any(b <= a for a, b in zip(doc.load_times, doc.load_times[1:])):
            raise ConfigError("load.times", "must be strictly increasing")
        if doc.load_times[0] > 0 or doc.load_times[-1] < doc.T:
            raise ConfigError("load.times", f"must cover [0, T={doc.T}]")


def build_config(document: dict) -> RunConfig:
    """Validate a flat document and turn it into a RunConfig."""
    try:
        doc = ConfigDocument.model_validate(document)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first.get("loc", ())) or None
        raise ConfigError(key, first.get("msg", "invalid value")) from exc
    _check_cross_fields(doc)

    if doc.load_kind == "constant":
        load = ConstantLoad(g0=doc.load_g0)
    elif doc.load_kind == "cosine":
        load = CosineLoad(amplitude=doc.load_amplitude, omega=doc.load_omega)
    else:
        load = TabulatedLoad(times=tuple(doc.load_times), values=tuple(doc.load_values))

    return RunConfig(
        grid=GridSpec(L=doc.L, H=doc.H, Nx=doc.Nx, Ny=doc.Ny),
        params=ModelParams(
            alpha=doc.alpha, eps=doc.eps, beta=doc.beta, mu=doc.mu, b=doc.b, T=doc.T
        ),
        load=load,
        ic=InitialCondition(
            kind=doc.ic_kind, x0=doc.ic_x0, amplitude=doc.ic_amplitude, value=doc.ic_value
        ),
        output=OutputSpec(
            snapshots=doc.output_snapshots,
            dir=doc.output_dir,
            full_field=doc.output_full_field,
        ),
        solver=SolverSpec(
            rtol=doc.solver_rtol, atol=doc.solver_atol, max_order=doc.solver_max_order
        ),
        coupling=doc.coupling,
    )


def parse_config(text: str) -> RunConfig:
    return build_config(read_document(text))


def to_document(cfg: RunConfig) -> dict:
    """Flat document that build_config maps back onto ``cfg``."""
    load = cfg.load
    document = {
        "L": cfg.grid.L,
        "H": cfg.grid.H,
        "Nx": cfg.grid.Nx,
        "Ny": cfg.grid.Ny,
        "T": cfg.params.T,
        "alpha": cfg.params.alpha,
        "eps": cfg.params.eps,
        "beta": cfg.params.beta,
        "mu": cfg.params.mu,
        "b": cfg.params.b,
        "load.kind": load.kind,
        "ic.kind": cfg.ic.kind,
        "ic.x0": cfg.ic.x0,
        "ic.amplitude": cfg.ic.amplitude,
        "ic.value": cfg.ic.value,
        "output.snapshots": cfg.output.snapshots,
        "output.dir": cfg.output.dir,
        "output.full_field": cfg.output.full_field,
        "solver.rtol": cfg.solver.rtol,
        "solver.atol": cfg.solver.atol,
        "solver.max_order": cfg.solver.max_order,
        "coupling": cfg.coupling,
    }
    if isinstance(load, ConstantLoad):
        document["load.g0"] = load.g0
    elif isinstance(load, CosineLoad):
        document["load.amplitude"] = load.amplitude
        document["load.omega"] = load.omega
    else:
        document["load.times"] = list(load.times)
        document["load.values"] = list(load.values)
    return document


def render_config(cfg: RunConfig) -> str:
    return json.dumps(to_document(cfg), indent=2, sort_keys=True) + "\n"


def _resolve_config_path(path: str | Path | None) -> Path | None:
    if path:
        return Path(path)
    env_path = os.getenv(CONFIG_ENV_VAR)
    return Path(env_path) if env_path else None


def load_document(path: str | Path | None = None) -> dict:
    """
    Read the raw configuration document from disk.

    With no path and no SLIPFIELD_CONFIG set, the empty document (all
    defaults) is returned.
    """
    config_path = _resolve_config_path(path)
    if config_path is None:
        log.info("No config file given; using defaults")
        return {}
    try:
        text = config_path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(None, f"config file not found: {config_path}") from exc
    except OSError as exc:
        raise ConfigError(None, f"cannot read config file {config_path}: {exc}") from exc
    return read_document(text)


def load_config(path: str | Path | None = None) -> RunConfig:
    return build_config(load_document(path))
