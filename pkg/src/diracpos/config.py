"""Run configuration: flat ``key = value`` files overridden by CLI flags."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from math import pi

from .fock import DEFAULT_MAX_DIM, sector_dimension
from .gamma import ConfigurationError


class ConfigError(ConfigurationError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    m: float = 1.0
    L: float = 20 * pi
    N: int = 1
    sector: int | None = None
    t: float = 1.3
    tmax: float | None = None
    dt: float = 0.05
    state: str = "vacuum"
    tol_exact: float = 1e-12
    tol_fit: float = 1e-3
    fd_factor: float = 1e-2
    max_dim: int = DEFAULT_MAX_DIM
    out: str | None = None

    def validate(self) -> "RunConfig":
        for name in ("m", "L", "dt", "tol_exact", "tol_fit", "fd_factor"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.N < 0:
            raise ConfigError("N must be non-negative")
        if self.sector is not None and self.sector < 0:
            raise ConfigError("sector must be non-negative")
        if self.max_dim <= 0:
            raise ConfigError("max_dim must be positive")
        return self

    def fock_dimension(self, N: int | None = None, sector: int | None = None) -> int:
        n = self.N if N is None else N
        return sector_dimension(4 * (2 * n + 1), self.sector if sector is None else sector)

    def merged(self, **overrides) -> "RunConfig":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean).validate()


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _float(raw: str) -> float:
    """Plain float, or a multiple of pi written as ``20*pi`` / ``pi``."""
    raw = raw.strip()
    if raw.endswith("pi"):
        head = raw[:-2].rstrip("*").strip()
        return (float(head) if head else 1.0) * pi
    return float(raw)


def _convert(key: str, raw: str, line: int):
    kind = _TYPES[key]
    try:
        if raw.lower() in ("none", ""):
            if "None" in str(kind):
                return None
            raise ValueError("value required")
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return _float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})", line) from None


def parse_config(text: str) -> dict:
    out = {}
    for k, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", k)
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}", k)
        out[key] = _convert(key, raw, k)
    return out


def load_config(path: str | None = None, **overrides) -> RunConfig:
    base = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            base = parse_config(fh.read())
    return RunConfig().merged(**base).merged(**overrides)
