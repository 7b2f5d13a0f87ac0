"""Process-wide settings and the serialisable description of a single run."""

from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import DomainError

logger = logging.getLogger(__name__)

EvenSource = Literal["afe2", "afe1"]


class Settings(BaseSettings):
    """Defaults that can be overridden with HECKE_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="HECKE_", extra="ignore")

    workers: int = Field(default=1, ge=1)
    tolerance: float = Field(default=1e-8, gt=0)
    afe_max_terms: int = Field(default=8_000_000, ge=1)
    euler_truncation: int = Field(default=100_000, ge=100)
    scan_ceiling: int = Field(default=10_000, ge=1)
    stretch_ceiling: int = Field(default=100_000, ge=1)
    log_level: str = "WARNING"
    seed: int = 20240611


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()


class RunConfig(BaseModel):
    """
    Everything needed to replay a moments run.

    The flat key=value form written by `to_key_values` is the same format
    `load_config_file` reads back.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    subcommand: str = Field(default="moments", title="Subcommand")
    grid: tuple[int, ...] = Field(default=(100, 1_000, 10_000), title="X grid")
    xmax: int | None = Field(default=None, title="Largest X")
    ks: tuple[int, ...] = Field(default=(1, 2, 3, 4), title="Moment orders")
    tolerance: float = Field(default=1e-8, gt=0, title="AFE tail tolerance")
    workers: int = Field(default=1, ge=1, title="Worker processes")
    primary_only: bool = Field(default=False, title="One representative per ideal")
    even_source: EvenSource = Field(default="afe2", title="Source of even powers")
    allow_stretch: bool = Field(default=False, title="Allow scans beyond the ceiling")
    cross_check_norm: int = Field(default=1_000, ge=1, title="Cross-check norm bound")
    out: str = Field(default=".", title="Output directory")
    plot: bool = Field(default=True, title="Emit plot script")
    timings: bool = Field(default=False, title="Fill the seconds column of the CSV")
    seed: int = Field(default=20240611, title="Random seed")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Any) -> RunConfig:
        base = {
            "tolerance": settings.tolerance,
            "workers": settings.workers,
            "seed": settings.seed,
        }
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(base)

    def effective_grid(self) -> tuple[int, ...]:
        if self.xmax is None:
            return self.grid
        return tuple(x for x in self.grid if x <= self.xmax) or (self.xmax,)

    def to_key_values(self) -> str:
        lines = []
        for name, value in self.model_dump().items():
            if isinstance(value, (tuple, list)):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = str(value).lower()
            elif value is None:
                continue
            lines.append(f"{name}={value}")
        return "\n".join(lines) + "\n"


_LIST_KEYS = {"grid", "ks"}


def load_config_file(path: Path) -> dict[str, Any]:
    """Reads a flat key=value file (dotenv syntax, # comments)."""
    if not path.is_file():
        raise DomainError(f"config file {path} does not exist")
    raw = dotenv_values(path)
    values: dict[str, Any] = {}
    for key, value in raw.items():
        key = key.strip().lower().replace("-", "_")
        if value is None:
            continue
        if key in _LIST_KEYS:
            values[key] = tuple(int(float(v)) for v in value.split(",") if v.strip())
        else:
            values[key] = value
    logger.debug("loaded %d keys from %s", len(values), path)
    return values


def build_run_config(
    settings: Settings, config_file: Path | None = None, **flags: Any
) -> RunConfig:
    """Defaults < HECKE_* environment < config file < explicit flags."""
    merged: dict[str, Any] = {}
    if config_file is not None:
        merged.update(load_config_file(config_file))
    merged.update({k: v for k, v in flags.items() if v is not None})
    try:
        return RunConfig.from_settings(settings, **merged)
    except ValueError as exc:
        raise DomainError(f"invalid run configuration: {exc}") from exc
