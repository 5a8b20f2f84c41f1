"""Run configuration: key=value files with defaults for the iodine molecule.

Lines are UTF-8 ``key=value`` pairs; ``#`` starts a comment. Unknown keys,
unparsable values and violated invariants raise ConfigError naming the key
and line. Angles accept ``pi`` expressions ("pi/8", "3pi/4", "2pi"); time
fractions accept "a/b".
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .morse import MorseParams

_PI_TOKEN = re.compile(
    r"^(?P<sign>[+-]?)(?P<coef>\d+\.?\d*|\.\d+)?\s*pi\s*(?:/\s*(?P<div>\d+\.?\d*|\.\d+))?$"
)


def parse_angle(token: str) -> float:
    """Radians from a plain float or a pi expression like '3pi/8'."""
    token = token.strip()
    match = _PI_TOKEN.match(token)
    if match:
        coef = float(match.group("coef")) if match.group("coef") else 1.0
        if match.group("sign") == "-":
            coef = -coef
        div = float(match.group("div")) if match.group("div") else 1.0
        if div == 0.0:
            raise ValueError("division by zero in angle")
        return coef * math.pi / div
    return float(token)


def parse_fraction(token: str) -> float:
    """Float from '0.125' or a ratio '1/8'."""
    token = token.strip()
    if "/" in token:
        num, _, den = token.partition("/")
        denominator = float(den)
        if denominator == 0.0:
            raise ValueError("division by zero in fraction")
        return float(num) / denominator
    return float(token)


def _parse_bool(token: str) -> bool:
    low = token.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {token!r}")


def _parse_float_list(token: str, item_parser) -> tuple[float, ...]:
    items = [piece for piece in token.split(",") if piece.strip()]
    if not items:
        raise ValueError("expected at least one value")
    return tuple(item_parser(piece) for piece in items)


@dataclass(frozen=True)
class RunConfig:
    """Scenario inputs: molecule, ladder, grids, control phases and times."""

    beta: float = 4.954
    mu: float = 1.156e5
    r0: float = 5.03
    D: float = 0.057
    alpha: float = 2.0
    n_levels: int = 24
    x_min: float = -0.25
    x_max: float = 0.45
    nx: int = 2048
    np: int = 512
    auto_p: bool = True
    p_max: float | None = None
    theta: tuple[float, ...] = (0.0,)
    t_frac: tuple[float, ...] | None = (0.0,)
    t_au: tuple[float, ...] | None = None
    theta_count: int = 33
    steps: int = 64
    max_shift: float | None = None
    direction: str = "position"
    lobe_threshold: float = 0.3
    outdir: str = "out"
    workers: int = 1
    format: str = "full"


_PARSERS = {
    "beta": float,
    "mu": float,
    "r0": float,
    "D": float,
    "alpha": float,
    "n_levels": int,
    "x_min": float,
    "x_max": float,
    "nx": int,
    "np": int,
    "auto_p": _parse_bool,
    "p_max": float,
    "theta": lambda v: _parse_float_list(v, parse_angle),
    "t_frac": lambda v: _parse_float_list(v, parse_fraction),
    "t_au": lambda v: _parse_float_list(v, float),
    "theta_count": int,
    "steps": int,
    "max_shift": lambda v: None if v.strip().lower() == "auto" else float(v),
    "direction": str,
    "lobe_threshold": float,
    "outdir": str,
    "workers": int,
    "format": str,
}

_FIELD_NAMES = {f.name for f in fields(RunConfig)}
assert set(_PARSERS) == _FIELD_NAMES


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate_config(cfg: RunConfig, where: str = "config") -> RunConfig:
    """Cross-field invariants; raises ConfigError naming the offender."""

    def fail(key: str, message: str) -> None:
        raise ConfigError(f"{where}: {key}: {message}")

    try:
        params = MorseParams(beta=cfg.beta, mu=cfg.mu, r0=cfg.r0, D=cfg.D)
    except ValueError as exc:
        raise ConfigError(f"{where}: physical parameters invalid: {exc}") from exc
    if not 1 <= cfg.n_levels <= params.bound_state_count:
        fail("n_levels", f"must be 1..{params.bound_state_count} "
                         f"(the well binds {params.bound_state_count} states), got {cfg.n_levels}")
    for key in ("nx", "np"):
        value = getattr(cfg, key)
        if not (_is_power_of_two(value) and value >= 128):
            fail(key, f"must be a power of two >= 128, got {value}")
    if not cfg.x_min < cfg.x_max:
        fail("x_min", f"x_min={cfg.x_min} must be below x_max={cfg.x_max}")
    if not cfg.auto_p and (cfg.p_max is None or cfg.p_max <= 0):
        fail("p_max", "a positive p_max is required when auto_p is false")
    if cfg.t_frac is not None and cfg.t_au is not None:
        fail("t_au", "give times as t_frac or t_au, not both")
    if cfg.t_frac is None and cfg.t_au is None:
        fail("t_frac", "one of t_frac or t_au is required")
    if cfg.theta_count < 9:
        fail("theta_count", f"must be >= 9, got {cfg.theta_count}")
    if cfg.steps < 32:
        fail("steps", f"must be >= 32, got {cfg.steps}")
    if not 0.0 < cfg.lobe_threshold < 1.0:
        fail("lobe_threshold", f"must be in (0, 1), got {cfg.lobe_threshold}")
    if cfg.direction not in ("position", "momentum"):
        fail("direction", f"must be 'position' or 'momentum', got {cfg.direction!r}")
    if cfg.format not in ("full", "compact"):
        fail("format", f"must be 'full' or 'compact', got {cfg.format!r}")
    if cfg.workers < 1:
        fail("workers", f"must be >= 1, got {cfg.workers}")
    if cfg.max_shift is not None and cfg.max_shift <= 0:
        fail("max_shift", f"must be positive or 'auto', got {cfg.max_shift}")
    return cfg


def _assign(cfg: RunConfig, key: str, raw: str, where: str) -> RunConfig:
    if key not in _PARSERS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    try:
        value = _PARSERS[key](raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: {key}: cannot parse {raw!r} ({exc})") from exc
    if key == "t_frac":
        cfg = replace(cfg, t_au=None)
    elif key == "t_au":
        cfg = replace(cfg, t_frac=None)
    return replace(cfg, **{key: value})


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """RunConfig from key=value text, applied on top of the defaults."""
    cfg = base if base is not None else RunConfig()
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key=value, got {line.strip()!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        cfg = _assign(cfg, key, raw, f"line {lineno}")
    return validate_config(cfg)


def apply_overrides(cfg: RunConfig, overrides: list[str]) -> RunConfig:
    """Apply --set key=value pairs on top of a parsed configuration."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, _, raw = item.partition("=")
        cfg = _assign(cfg, key.strip(), raw.strip(), f"--set {key.strip()}")
    return validate_config(cfg)


def config_times(cfg: RunConfig, revival_time: float) -> tuple[tuple[float, ...], tuple[float, ...] | None]:
    """(absolute times in a.u., matching revival fractions or None)."""
    if cfg.t_frac is not None:
        return tuple(f * revival_time for f in cfg.t_frac), cfg.t_frac
    return tuple(cfg.t_au or ()), None
