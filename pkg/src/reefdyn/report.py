"""Plain-text configuration files and deterministic CSV output."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .model import PARAM_NAMES, ModelParams

DEFAULT_PRECISION = 6
#: canonical key order when writing a configuration back out
KEY_ORDER = (*PARAM_NAMES, "delta")


class ConfigError(ValueError):
    """Malformed configuration text or flag."""


def parse_config(text: str) -> dict[str, str]:
    """Read ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        out[key] = value
    return out


def _order(key: str) -> tuple[int, str]:
    return (KEY_ORDER.index(key), "") if key in KEY_ORDER else (len(KEY_ORDER), key)


def emit_config(values: dict) -> str:
    """Canonical text for a configuration: known keys first, then the rest sorted."""
    lines = []
    for key in sorted(values, key=_order):
        v = values[key]
        lines.append(f"{key} = {format_value(v)}")
    return "".join(line + "\n" for line in lines)


def normalize_config(text: str) -> str:
    return emit_config({k: _coerce(v) for k, v in parse_config(text).items()})


def _coerce(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class RunConfig:
    """Everything needed to repeat one CLI run."""

    command: str
    params: ModelParams | None
    delta: float | None = None
    ics: list[tuple[float, float]] = field(default_factory=list)
    out: str = "."
    precision: int = DEFAULT_PRECISION
    extra: dict[str, object] = field(default_factory=dict)

    def as_dict(self) -> dict:
        d: dict = {"command": self.command}
        if self.params is not None:
            d.update(self.params.as_dict())
        if self.delta is not None:
            d["delta"] = self.delta
        for i, (M, C) in enumerate(self.ics):
            d[f"ic{i}"] = f"{M!r},{C!r}"
        d["precision"] = self.precision
        d.update(self.extra)
        return d

    def header(self) -> str:
        return "".join(f"# {line}\n" for line in emit_config(self.as_dict()).splitlines())


def params_from_mapping(values: dict) -> ModelParams:
    missing = [n for n in PARAM_NAMES if n not in values]
    if missing:
        raise ConfigError(f"missing model parameters: {', '.join(missing)}")
    try:
        return ModelParams(**{n: float(values[n]) for n in PARAM_NAMES})
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def fmt(x, precision: int = DEFAULT_PRECISION) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        s = f"{x:.{precision}f}"
        return "0." + "0" * precision if s == "-0." + "0" * precision else s
    return str(x)


def csv_text(header: list[str], rows, precision: int = DEFAULT_PRECISION) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v, precision) for v in row))
    return "\n".join(lines) + "\n"


def emit_csv(header: list[str], rows, path, precision: int = DEFAULT_PRECISION) -> Path:
    """Write a header plus fixed-decimal rows, UTF-8 with ``\\n`` line ends."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(header, rows, precision))
    return path
