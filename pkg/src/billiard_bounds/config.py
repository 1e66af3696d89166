"""Experiment configuration: one JSON or TOML document per run."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .bounds import is_prime
from .errors import ConfigInvalid

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

Command = Literal["bound", "homology", "solve", "verify", "render"]


class ManifoldSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    params: dict[str, Any] = Field(default_factory=dict)


class SettingsOverrides(BaseModel):
    model_config = ConfigDict(extra="forbid")

    multistart_count: Optional[int] = Field(None, ge=1)
    rng_seed: Optional[int] = Field(None, ge=0)
    newton_tol: Optional[float] = Field(None, gt=0)
    max_newton_iters: Optional[int] = Field(None, ge=1)
    diagonal_guard: Optional[float] = Field(None, gt=0)
    dedup_tol: Optional[float] = Field(None, gt=0)
    degeneracy_threshold: Optional[float] = Field(None, gt=0)
    trust_radius: Optional[float] = Field(None, gt=0)
    hessian_step: Optional[float] = Field(None, gt=0)
    stall_iters: Optional[int] = Field(None, ge=1)
    rotate_charts: Optional[bool] = None

    def values(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    report: Optional[str] = None
    svg: Optional[str] = None


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Command
    manifold: Optional[ManifoldSpec] = None
    bouquet: Optional[list[int]] = None
    betti: Optional[list[int]] = None
    m: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=1)
    p: Optional[int] = Field(None, ge=1)
    mode: str = "relative+quotient"
    budget: Optional[int] = Field(None, ge=1)
    settings: SettingsOverrides = Field(default_factory=SettingsOverrides)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @property
    def period(self) -> Optional[int]:
        return self.p if self.p is not None else self.k

    @model_validator(mode="after")
    def _command_fields(self):
        cmd = self.command
        period = self.period
        if cmd == "bound":
            if self.betti is None:
                raise ValueError("bound: 'betti' is required")
            if self.m is not None and self.m != len(self.betti) - 1:
                raise ValueError(f"bound: m={self.m} does not match betti of length {len(self.betti)}")
            if period is None:
                raise ValueError("bound: 'p' (or 'k') is required")
            if period < 2:
                raise ValueError("bound: period must be >= 2")
        elif cmd == "homology":
            if self.bouquet is None and self.betti is None:
                raise ValueError("homology: 'bouquet' (sphere dims) or 'betti' is required")
            if self.bouquet is not None and (not self.bouquet or min(self.bouquet) < 1):
                raise ValueError("homology: bouquet dims must be a nonempty list of integers >= 1")
            if self.p is None:
                raise ValueError("homology: 'p' is required")
            if not is_prime(self.p) or self.p == 2:
                raise ValueError(f"homology: p={self.p} must be an odd prime")
        else:
            if self.manifold is None:
                raise ValueError(f"{cmd}: 'manifold' is required")
            if self.k is None:
                raise ValueError(f"{cmd}: 'k' is required")
            if self.k < 2:
                raise ValueError(f"{cmd}: k must be >= 2")
        return self


def _flatten(err: ValidationError) -> list[dict]:
    out = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e.get("loc", ())) or "config"
        msg = e.get("msg", "")
        if msg.startswith("Value error, "):
            msg = msg[len("Value error, "):]
        out.append({"field": loc, "message": msg})
    return out


def parse_config(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigInvalid(_flatten(err)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigInvalid([{"field": "config", "message": str(exc)}]) from None
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigInvalid([{"field": "config", "message": f"parse error: {exc}"}]) from None
    return parse_config(data)
