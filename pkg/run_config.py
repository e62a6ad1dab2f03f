#!/usr/bin/env python3
"""
Run configuration for the fractal-calculus command line.

Process-wide defaults (caps, quadrature levels, log level) come from the
environment, optionally through a .env file. Per-run settings live in a
JSON RunConfig document validated with pydantic; IFS definitions use the
same mechanism.
"""
import os
import json
import logging
from fractions import Fraction
from typing import List, Literal, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import ConfigError

load_dotenv()

# --- Environment Defaults ---
LOG_LEVEL = os.getenv("FRACTAL_LOG_LEVEL", "INFO").upper()
LEVEL_CAP = int(os.getenv("FRACTAL_LEVEL_CAP", "40"))
SEGMENT_CAP = int(os.getenv("FRACTAL_SEGMENT_CAP", str(2 ** 22)))
QUADRATURE_LEVEL = int(os.getenv("FRACTAL_QUADRATURE_LEVEL", "16"))
QUADRATURE_LEVEL_2D = int(os.getenv("FRACTAL_QUADRATURE_LEVEL_2D", "9"))


def parse_ratio(value):
    """Accept 0.25, "0.25" or "1/4"."""
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational or decimal ratio: {value!r}") from exc
    return value


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Tolerances(_Section):
    valuation_slack: float = Field(1e-12, gt=0)
    quadrature: float = Field(1e-6, gt=0)
    derivative: float = Field(1e-6, gt=0)
    mass: float = Field(1e-9, gt=0)


class Caps(_Section):
    level: int = Field(LEVEL_CAP, ge=1)
    segments: int = Field(SEGMENT_CAP, ge=1)
    quadrature_level: int = Field(QUADRATURE_LEVEL, ge=1)
    quadrature_level_2d: int = Field(QUADRATURE_LEVEL_2D, ge=1)
    modes_1d: int = Field(32, ge=1)
    modes_2d: int = Field(16, ge=1)


class Output(_Section):
    directory: str = "results"


class SeedSection(_Section):
    """A staircase seed: a Cantor-type set or the identity (smooth limit)."""

    kind: Literal["cantor", "identity"] = "cantor"
    pieces: int = Field(2, ge=2)
    ratio: float = Field(1.0 / 3.0, gt=0, le=0.5)
    level: int = Field(40, ge=1)

    @field_validator("ratio", mode="before")
    @classmethod
    def _normalize_ratio(cls, value):
        return parse_ratio(value)

    @model_validator(mode="after")
    def _no_overlap(self):
        if self.kind == "cantor" and self.pieces * self.ratio > 1.0 + 1e-12:
            raise ValueError(f"pieces * ratio = {self.pieces * self.ratio:.6g} > 1 (pieces overlap)")
        return self


def membrane_seed(config: "RunConfig") -> SeedSection:
    """
    Seed for the membrane when wave2d names none: the top-level seed if the
    document sets one, else two pieces of ratio 1/4 (dimension 1/2).
    """
    if config.wave2d is not None and config.wave2d.seed_x is not None:
        return config.wave2d.seed_x
    if "seed" in config.model_fields_set:
        return config.seed
    return SeedSection(pieces=2, ratio=0.25)


class Wave1DSection(_Section):
    length: float = Field(1.0, gt=0)
    speed_factor: float = Field(1.0, gt=0, le=1)
    profile: str = "sin(pi*u)"
    n_modes: Optional[int] = Field(None, ge=1)
    seed_x: Optional[SeedSection] = None
    seed_t: Optional[SeedSection] = None
    times: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5])
    points: int = Field(51, ge=2)
    fractalize_time: bool = True


class Wave2DSection(_Section):
    speed_factor: float = Field(1.0, gt=0, le=1)
    profile: str = "sin(pi*ux)*sin(pi*uy)"
    m_modes: Optional[int] = Field(None, ge=1)
    n_modes: Optional[int] = Field(None, ge=1)
    seed_x: Optional[SeedSection] = None
    seed_y: Optional[SeedSection] = None
    seed_t: Optional[SeedSection] = None
    times: List[float] = Field(default_factory=lambda: [0.0, 0.5])
    points: int = Field(21, ge=2)
    fractalize_time: bool = True


class DispersionSection(_Section):
    speed_factor: float = Field(1.0, gt=0, le=1)
    k_values: Optional[List[float]] = None
    k_min: float = Field(0.01, gt=0)
    k_max: float = Field(4.0, gt=0)
    samples: int = Field(400, ge=1)
    seed: Optional[SeedSection] = None

    @field_validator("k_values")
    @classmethod
    def _positive(cls, values):
        if values is not None and any(k <= 0 for k in values):
            raise ValueError("all k_values must be positive")
        return values

    @model_validator(mode="after")
    def _ordered_range(self):
        if self.k_max <= self.k_min:
            raise ValueError("k_max must exceed k_min")
        return self


class LacunarySection(_Section):
    k: int = Field(0, ge=0)
    profile: str = "sin(pi*x)*sin(pi*y)"
    m_cap: int = Field(4, ge=1)
    n_cap: int = Field(4, ge=1)
    support: Literal["square", "unit"] = "square"
    order: int = Field(24, ge=2)
    times: List[float] = Field(default_factory=lambda: [0.0])
    points: int = Field(21, ge=2)


class RunConfig(_Section):
    tolerances: Tolerances = Field(default_factory=Tolerances)
    caps: Caps = Field(default_factory=Caps)
    output: Output = Field(default_factory=Output)
    seed: SeedSection = Field(default_factory=SeedSection)
    wave1d: Optional[Wave1DSection] = None
    wave2d: Optional[Wave2DSection] = None
    dispersion: Optional[DispersionSection] = None
    lacunary: Optional[LacunarySection] = None


class IfsMap(_Section):
    scale: float = Field(gt=0, lt=1)
    rotation_degrees: float = 0.0
    translation: Tuple[float, float] = (0.0, 0.0)
    conjugate: bool = False


class IfsDocument(_Section):
    name: str = "custom"
    maps: List[IfsMap] = Field(min_length=2)


def _itemize(exc: ValidationError) -> List[str]:
    items = []
    for err in exc.errors():
        where = ".".join(str(part) for part in err["loc"]) or "<root>"
        items.append(f"{where}: {err['msg']}")
    return items


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(path, [f"line {exc.lineno} column {exc.colno}: {exc.msg}"]) from exc


def load_run_config(path: str) -> RunConfig:
    """Reads and validates a RunConfig document; schema problems are itemized."""
    logging.info(f"Loading run configuration from {path}")
    data = _read_json(path)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(path, _itemize(exc)) from exc


def load_ifs_document(path: str) -> IfsDocument:
    """Reads an IFS document: either {"name", "maps"} or a bare list of maps."""
    data = _read_json(path)
    if isinstance(data, list):
        data = {"maps": data}
    try:
        return IfsDocument.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(path, _itemize(exc)) from exc
