"""Key=value config-file parsing and assembly into model objects.

The file format is deliberately tiny: one ``key = value`` pair per line,
``#`` starts a comment, blank lines ignored.  Recognized keys:

    m, omega, lambda, mu, hbar        oscillator parameters
    temp.C | temp.T                   bath temperature (coth factor or kelvin
                                      in natural units; mutually exclusive)
    init.delta, init.r                initial squeezing and correlation
    init.q0, init.p0                  initial expectation values

Values are parsed exactly as decimals (``Decimal``), so config files never
pick up binary round-off beyond the final float conversion; ``inf`` is
accepted where it makes sense (e.g. ``temp.C = inf``).  Unknown or duplicate
keys are rejected with the offending line number.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from pathlib import Path

from .model import InitialStateSpec, OscillatorConfig, TemperatureSpec

__all__ = [
    "ConfigError",
    "CONFIG_KEYS",
    "parse_config_text",
    "load_config_file",
    "build_model",
]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration input."""


CONFIG_KEYS = (
    "m",
    "omega",
    "lambda",
    "mu",
    "hbar",
    "temp.C",
    "temp.T",
    "init.delta",
    "init.r",
    "init.q0",
    "init.p0",
)

_DEFAULTS = {
    "m": 1.0,
    "omega": 1.0,
    "lambda": 0.0,
    "mu": 0.0,
    "hbar": 1.0,
    "init.delta": 1.0,
    "init.r": 0.0,
    "init.q0": 0.0,
    "init.p0": 0.0,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, float]:
    """Parse config text into a {key: float} mapping (no defaults applied)."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value_text:
            raise ConfigError(f"{source}:{lineno}: missing value for {key!r}")
        try:
            values[key] = float(Decimal(value_text))
        except InvalidOperation as exc:
            raise ConfigError(
                f"{source}:{lineno}: invalid number {value_text!r} for {key!r}"
            ) from exc
    if "temp.C" in values and "temp.T" in values:
        raise ConfigError(f"{source}: temp.C and temp.T are mutually exclusive")
    return values


def load_config_file(path: str | Path) -> dict[str, float]:
    """Read and parse a config file.  I/O errors propagate as ``OSError``."""
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), source=str(path))


def build_model(
    values: dict[str, float] | None = None,
    overrides: dict[str, float] | None = None,
) -> tuple[OscillatorConfig, InitialStateSpec]:
    """Assemble the oscillator config and initial-state spec.

    ``overrides`` (same key names) take precedence over ``values``; an
    override of either temperature key supersedes any file temperature.
    Defaults: unit mass/frequency/hbar, no damping, zero temperature,
    unsqueezed uncorrelated state at the origin.  A config with
    lambda = mu = 0 is marked as a closed system automatically.
    """
    merged = dict(values or {})
    if overrides:
        cleaned = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(cleaned) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown override keys: {sorted(unknown)}")
        if "temp.C" in cleaned and "temp.T" in cleaned:
            raise ConfigError("temp.C and temp.T are mutually exclusive")
        if "temp.C" in cleaned or "temp.T" in cleaned:
            merged.pop("temp.C", None)
            merged.pop("temp.T", None)
        merged.update(cleaned)

    if "temp.C" in merged:
        temp = TemperatureSpec.from_coth(merged["temp.C"])
    elif "temp.T" in merged:
        temp = TemperatureSpec.from_temperature(merged["temp.T"])
    else:
        temp = TemperatureSpec.zero()

    def get(key: str) -> float:
        return merged.get(key, _DEFAULTS[key])

    lam = get("lambda")
    mu = get("mu")
    cfg = OscillatorConfig(
        m=get("m"),
        omega=get("omega"),
        lam=lam,
        mu=mu,
        hbar=get("hbar"),
        temp=temp,
        closed_system=(lam == 0.0 and mu == 0.0),
    )
    spec = InitialStateSpec(
        spread=get("init.delta"),
        correlation=get("init.r"),
        center_q=get("init.q0"),
        center_p=get("init.p0"),
    )
    return cfg, spec
