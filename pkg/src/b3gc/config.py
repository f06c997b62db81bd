"""Run configuration: defaults, a key = value config file, and validation.

File format::

    # comment
    case = typechange-CxR
    grid = 32
    tol.integrability = 1e-6

    [surgery]
    p = 0
    q = 1

    [surgery]
    p = 1
    q = -1
    center = 5, 0

Keys before the first ``[surgery]`` block are run settings; each block adds
one surgery.  Values given on the command line override the file, which
overrides the defaults.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from b3gc.structure import Tolerances

FORMATS = ("text", "json")
MIN_GRID = 8
SURGERY_KEYS = ("p", "q", "c", "a", "b", "center")
TOL_KEYS = tuple(f.name for f in dataclasses.fields(Tolerances))


class ConfigError(ValueError):
    """Invalid configuration (exit status 2)."""


@dataclass
class SurgerySpec:
    p: int = 0
    q: int = 1
    c: float = 1.0
    a: float = 1.2
    b: float = 0.8
    center: Optional[tuple] = None

    def to_data(self, center=(0.0, 0.0)):
        from b3gc.surgery import SurgeryData

        try:
            return SurgeryData(p=self.p, q=self.q, c=self.c, a=self.a, b=self.b,
                               center=tuple(self.center) if self.center is not None else tuple(center))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class RunConfig:
    cases: list = field(default_factory=list)
    grid: int = 32
    step: Optional[float] = None
    tol: Tolerances = field(default_factory=Tolerances)
    surgeries: list = field(default_factory=list)
    format: str = "text"
    out: Optional[str] = None
    seed: int = 0
    period_grid: int = 64
    sweep_p: tuple = (-2, -1, 0, 1, 2)
    sweep_q: tuple = (1, -1)
    sweep_c: tuple = (0.5, 1.0, 2.0)
    convergence: bool = False

    def validate(self):
        if self.grid < MIN_GRID or self.period_grid < MIN_GRID:
            raise ConfigError(f"grid resolution must be at least {MIN_GRID}")
        if self.step is not None and not self.step > 0:
            raise ConfigError("step must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        for s in self.surgeries:
            if s.q not in (1, -1):
                raise ConfigError(f"surgery q must be +1 or -1, got {s.q}")
            s.to_data()
        return self


def parse_surgery(text: str) -> SurgerySpec:
    """``p,q[,c,a,b]`` as used by ``--surgery``."""
    parts = [t.strip() for t in text.split(",") if t.strip()]
    if not 2 <= len(parts) <= 5:
        raise ConfigError(f"--surgery expects p,q[,c,a,b], got {text!r}")
    try:
        p, q = int(parts[0]), int(parts[1])
        rest = [float(t) for t in parts[2:]]
    except ValueError as exc:
        raise ConfigError(f"bad surgery string {text!r}: {exc}") from exc
    spec = SurgerySpec(p=p, q=q)
    for name, value in zip(("c", "a", "b"), rest):
        setattr(spec, name, value)
    return spec


def _number_list(value, cast):
    return tuple(cast(t) for t in value.replace(",", " ").split())


def _convert(key, value):
    """Typed value for a run-level key."""
    try:
        if key in ("grid", "seed", "period_grid"):
            return int(value)
        if key == "step":
            return None if value.lower() in ("", "none", "auto") else float(value)
        if key == "case":
            return [t for t in value.replace(",", " ").split()]
        if key in ("format", "out"):
            return value
        if key == "convergence":
            return value.lower() in ("1", "true", "yes", "on")
        if key == "sweep_p" or key == "sweep_q":
            return _number_list(value, int)
        if key == "sweep_c":
            return _number_list(value, float)
        if key.startswith("tol."):
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_text(text: str):
    """Parse a config file into ``(settings dict, list of SurgerySpec)``."""
    settings, surgeries = {}, []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[surgery]":
                raise ConfigError(f"line {lineno}: unknown section {line}")
            current = SurgerySpec()
            surgeries.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        if current is not None:
            if key not in SURGERY_KEYS:
                raise ConfigError(f"line {lineno}: unknown surgery key {key!r}")
            try:
                if key in ("p", "q"):
                    setattr(current, key, int(value))
                elif key == "center":
                    current.center = _number_list(value, float)
                else:
                    setattr(current, key, float(value))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value {value!r}") from exc
        else:
            if key.startswith("tol.") and key[4:] not in TOL_KEYS:
                raise ConfigError(f"line {lineno}: unknown tolerance {key!r}")
            settings[key] = _convert(key, value)
    return settings, surgeries


def build_config(file_settings=None, file_surgeries=None, overrides=None) -> RunConfig:
    """Merge defaults, file settings and CLI overrides (highest precedence)."""
    cfg = RunConfig()
    tol = {}
    for source in (file_settings or {}, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key.startswith("tol."):
                tol[key[4:]] = value
            elif key == "case":
                cfg.cases = list(value)
            elif key == "surgeries":
                continue
            else:
                setattr(cfg, key, value)
    if tol:
        try:
            cfg.tol = dataclasses.replace(cfg.tol, **tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    cli_surgeries = (overrides or {}).get("surgeries")
    cfg.surgeries = list(cli_surgeries) if cli_surgeries else list(file_surgeries or [])
    return cfg.validate()


def load_config(path) -> tuple:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
