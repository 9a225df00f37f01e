"""Run configuration, check records and byte-stable report serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

__all__ = [
    "ConfigError",
    "RunConfig",
    "CheckRecord",
    "VerificationReport",
    "load_config",
    "REPORT_SCHEMA",
]

MAX_M = 7


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key."""


def fmt(x: float) -> str:
    """17-significant-digit decimal, round-trippable and locale independent."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunConfig:
    case: str = "algebra"
    m: int | None = None
    k: int | None = None
    samples: int = 100
    seed: int = 0
    fd_step: float = 1e-5
    tolerances: dict = field(default_factory=dict)
    timing: bool = False

    def validate(self, known_cases=None) -> "RunConfig":
        if known_cases is not None and self.case not in known_cases:
            raise ConfigError(f"case: unknown case {self.case!r} (choose from {', '.join(sorted(known_cases))})")
        if self.m is not None:
            if isinstance(self.m, bool) or not isinstance(self.m, int):
                raise ConfigError(f"m: expected an integer, got {self.m!r}")
            if not 1 <= self.m <= MAX_M:
                raise ConfigError(f"m: Clifford systems supported for m ≤ {MAX_M}, got m={self.m}")
        if self.k is not None and (isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 1):
            raise ConfigError(f"k: expected a positive integer, got {self.k!r}")
        if isinstance(self.samples, bool) or not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError(f"samples: expected a positive integer, got {self.samples!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed: expected a non-negative integer, got {self.seed!r}")
        if not isinstance(self.fd_step, (int, float)) or not 0 < self.fd_step < 1:
            raise ConfigError(f"fd_step: expected a number in (0, 1), got {self.fd_step!r}")
        for name, val in self.tolerances.items():
            if not isinstance(val, (int, float)) or isinstance(val, bool) or math.isnan(val):
                raise ConfigError(f"tol.{name}: expected a number, got {val!r}")
        return self


_KEYS = {"case", "m", "k", "samples", "seed", "fd_step", "tolerances", "timing"}


def load_config(path=None, known_cases=None, **overrides) -> RunConfig:
    """Merge a JSON config file with explicit overrides (``None`` means unset).

    An empty file or ``{}`` yields the defaults.
    """
    data: dict = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        if text.strip():
            try:
                data = json.loads(text)
            except json.JSONDecodeError as err:
                raise ConfigError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object")
        unknown = set(data) - _KEYS
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown configuration key")
    tols = dict(data.pop("tolerances", {}) or {})
    tols.update(overrides.pop("tolerances", None) or {})
    data.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**data, tolerances=tols)
    return cfg.validate(known_cases)


def parse_tolerance(text: str) -> tuple[str, float]:
    name, sep, val = text.partition("=")
    if not sep or not name:
        raise ConfigError(f"--tol: expected name=value, got {text!r}")
    try:
        return name, float(val)
    except ValueError:
        raise ConfigError(f"--tol {name}: not a number: {val!r}") from None


@dataclass(frozen=True)
class CheckRecord:
    name: str
    value: float
    tolerance: float
    kind: str = "max"  # "max": value <= tol passes; "min": value >= tol passes
    gating: bool = True
    witness: object = None
    status: str = "ok"
    note: str | None = None

    @property
    def passed(self) -> bool:
        if self.status != "ok" or math.isnan(self.value):
            return False
        return self.value <= self.tolerance if self.kind == "max" else self.value >= self.tolerance

    def as_dict(self) -> dict:
        d = {
            "name": self.name,
            "max_residual": fmt(self.value),
            "tolerance": fmt(self.tolerance),
            "pass": self.passed,
            "kind": self.kind,
            "gating": self.gating,
            "status": self.status,
        }
        if self.witness is not None:
            d["witness"] = [fmt(v) for v in _flat(self.witness)]
        if self.note is not None:
            d["note"] = self.note
        return d

    def line(self) -> str:
        tag = "PASS" if self.passed else ("FAIL" if self.gating else "INFO")
        rel = "<=" if self.kind == "max" else ">="
        return f"{tag} {self.name}: {fmt(self.value)} {rel} {fmt(self.tolerance)}"


def _flat(w):
    import numpy as np

    return [float(v) for v in np.asarray(w, dtype=float).ravel()]


@dataclass(frozen=True)
class VerificationReport:
    config: RunConfig
    checks: tuple
    duration_ms: float | None = None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def as_dict(self) -> dict:
        return {
            "case": self.config.case,
            "seed": self.config.seed,
            "samples": self.config.samples,
            "fd_step": fmt(self.config.fd_step),
            "checks": [c.as_dict() for c in self.checks],
            "duration_ms": None if self.duration_ms is None else round(self.duration_ms, 3),
        }

    def to_json(self) -> str:
        # key order is fixed by as_dict; newline-terminated, LF only
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "max_residual", "tolerance", "pass", "gating"])
        for c in self.checks:
            w.writerow([c.name, fmt(c.value), fmt(c.tolerance), str(c.passed).lower(), str(c.gating).lower()])
        return buf.getvalue()

    def with_timing(self, ms: float) -> "VerificationReport":
        return replace(self, duration_ms=ms)


_DECIMAL = {"type": "string", "pattern": r"^(-?[0-9.e+-]+|nan|-?inf)$"}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["case", "seed", "samples", "fd_step", "checks", "duration_ms"],
    "additionalProperties": False,
    "properties": {
        "case": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "samples": {"type": "integer", "minimum": 1},
        "fd_step": _DECIMAL,
        "duration_ms": {"type": ["number", "null"]},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "max_residual", "tolerance", "pass", "kind", "gating", "status"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "max_residual": _DECIMAL,
                    "tolerance": _DECIMAL,
                    "pass": {"type": "boolean"},
                    "kind": {"enum": ["max", "min"]},
                    "gating": {"type": "boolean"},
                    "status": {"enum": ["ok", "sampler-failure", "error"]},
                    "witness": {"type": "array", "items": _DECIMAL},
                    "note": {"type": "string"},
                },
            },
        },
    },
}
