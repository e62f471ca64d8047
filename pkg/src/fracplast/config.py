"""Run configuration: flat JSON key-value files plus command-line overrides."""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from .kernel import FractionalOperatorSpec
from .plasticity import MaterialParams
from .solver import ConfigurationError, Grid1D, LoadProgram, nodal_body_force

__all__ = ["RunConfig", "parse_config", "OUTPUT_ROOT_ENV"]

OUTPUT_ROOT_ENV = "FRACPLAST_OUTPUT_ROOT"


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    ell_fraction: float
    m: int = 2
    l: float = 1.0
    E: float = 205e9
    sigma_Y: float = 1.2e9
    u_bar_fraction: float = 0.003
    body_force: float = 615e6
    body_force_profile: str = "uniform"
    body_force_fraction: float = 0.5
    body_force_table: tuple | None = None
    n_steps: int = 100
    end_convention: str = "outward"
    output: str = "out"

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ConfigurationError(f"alpha must lie in (0,1], got {self.alpha!r}")
        for name in ("ell_fraction", "l", "E", "sigma_Y"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        if int(self.m) != self.m or self.m < 2:
            raise ConfigurationError(f"m must be an integer >= 2, got {self.m!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be an integer >= 1, got {self.n_steps!r}")
        if self.ell_fraction > 1.0:
            raise ConfigurationError(f"ell_fraction must not exceed 1, got {self.ell_fraction!r}")
        if not math.isfinite(self.u_bar_fraction) or not math.isfinite(self.body_force):
            raise ConfigurationError("u_bar_fraction and body_force must be finite")
        if self.end_convention not in ("outward", "both-positive"):
            raise ConfigurationError(
                f"end_convention must be 'outward' or 'both-positive', got {self.end_convention!r}"
            )
        if self.body_force_table is not None:
            object.__setattr__(self, "body_force_table", tuple(tuple(map(float, r)) for r in self.body_force_table))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n_steps", int(self.n_steps))
        # raises with the dx = ell/m message when the node count is fractional
        self.grid()
        self.body_force_values()

    @property
    def ell(self) -> float:
        return self.ell_fraction * self.l

    @property
    def dx(self) -> float:
        return self.ell / self.m

    @property
    def n_intervals(self) -> int:
        return self.grid().n_intervals

    @property
    def u_bar(self) -> float:
        return self.u_bar_fraction * self.l

    def operator_spec(self) -> FractionalOperatorSpec:
        return FractionalOperatorSpec(self.alpha, self.ell, self.m)

    def grid(self) -> Grid1D:
        return Grid1D.for_operator(self.operator_spec(), self.l)

    def material(self) -> MaterialParams:
        return MaterialParams(self.E, self.sigma_Y)

    def body_force_values(self):
        return nodal_body_force(
            self.grid().x, self.body_force, self.body_force_profile, self.body_force_fraction, self.body_force_table
        )

    def load_program(self) -> LoadProgram:
        return LoadProgram(self.u_bar, self.n_steps, self.end_convention, self.body_force_values())

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        if d["body_force_table"] is not None:
            d["body_force_table"] = [list(r) for r in d["body_force_table"]]
        return d

    def header_lines(self) -> list[str]:
        """Human-readable echo of the run parameters."""
        return [
            f"length l = {self.l:g} m, dx = {self.dx:g} m, nodes = {self.n_intervals + 1}",
            f"Young's modulus E = {self.E / 1e9:g} GPa, yield stress sigma_Y = {self.sigma_Y / 1e6:g} MPa",
            f"end displacement U = {self.u_bar_fraction:g} l ({self.end_convention}), "
            f"body force b = {self.body_force / 1e6:g} MN/m^3 ({self.body_force_profile})",
            f"alpha = {self.alpha:g}, ell = {self.ell_fraction:g} l, m = {self.m}, load steps = {self.n_steps}",
        ]


_FIELDS = {f.name: f for f in fields(RunConfig)}
_INT_FIELDS = {"m", "n_steps"}
_STR_FIELDS = {"body_force_profile", "end_convention", "output"}


def _coerce(key: str, value: Any) -> Any:
    if key in _STR_FIELDS:
        return str(value)
    if key == "body_force_table":
        return value
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigurationError(f"{key}: expected a number, got {value!r}") from None
    if key in _INT_FIELDS:
        if float(value) != int(value):
            raise ConfigurationError(f"{key} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def parse_config(path: str | os.PathLike | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Read a flat JSON object from ``path`` and apply ``overrides`` on top.

    ``None`` values in ``overrides`` are ignored, so argparse namespaces can
    be passed through directly.
    """
    data: dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigurationError(f"config file not found: {p}")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file {p} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError(f"config file {p} must hold a flat JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigurationError(f"unknown config key(s): {', '.join(unknown)}")
    missing = [k for k in ("alpha", "ell_fraction") if k not in data]
    if missing:
        raise ConfigurationError(f"missing required config key(s): {', '.join(missing)}")
    if "output" not in data and os.environ.get(OUTPUT_ROOT_ENV):
        data["output"] = os.environ[OUTPUT_ROOT_ENV]
    return RunConfig(**{k: _coerce(k, v) for k, v in data.items()})
