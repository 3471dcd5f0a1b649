"""
Run configuration.
A run is described by flat ``key = value`` lines with dotted keys and '#'
comments. Every legal key and its default lives in configs/defaults.yaml;
a key that is not there is rejected, so a typo never silently falls back to
a default.
"""

import logging
import math
import os
import re
import threading
from enum import Enum
from pathlib import Path
from types import SimpleNamespace
from typing import Any, Dict, Iterable, List, Mapping, Optional

import psutil
import yaml
from dotenv import load_dotenv

from arcsim.errors import ConfigError
from arcsim.models import Dispersion, Ordering, PhotonKind

logger = logging.getLogger(__name__)

DEFAULTS_FILE = Path(__file__).resolve().parent.parent / "configs" / "defaults.yaml"

CHOICES: Dict[str, Any] = {
    "photon.kind": PhotonKind,
    "photon.ordering": Ordering,
    "run.dispersion": Dispersion,
    "sweep.scale": ("linear", "log"),
    "arc_scan.scale": ("linear", "log"),
    "smith_purcell.axis": ("angle", "frequency"),
}

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:e[-+]?\d+)?"
_PI_PATTERN = re.compile(
    rf"^([-+]?)({_NUMBER})?\s*\*?\s*pi(?:\s*/\s*({_NUMBER}))?$"
)

_defaults_lock = threading.Lock()
_defaults: Dict[Path, Dict[str, Any]] = {}


def _flatten(data: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def load_defaults(path: Path = DEFAULTS_FILE) -> Dict[str, Any]:
    """Load and flatten the defaults file once per process."""
    with _defaults_lock:
        if path not in _defaults:
            logger.debug(f"Loading configuration defaults from {path}")
            try:
                with path.open("r") as f:
                    data = yaml.safe_load(f)
            except (IOError, yaml.YAMLError) as e:
                raise ConfigError(f"Failed to load defaults file {path}: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"Defaults file {path} must hold a mapping")
            _defaults[path] = _flatten(data)
        return dict(_defaults[path])


def parse_float(key: str, text: str) -> float:
    """Parse a float, accepting inf/nan and multiples or fractions of pi."""
    lower = text.strip().lower()
    try:
        return float(lower)
    except ValueError:
        pass
    match = _PI_PATTERN.match(lower)
    if match:
        sign, coefficient, divisor = match.groups()
        value = (float(coefficient) if coefficient else 1.0) * math.pi
        if divisor:
            value /= float(divisor)
        return -value if sign == "-" else value
    raise ConfigError(f"{key}: expected a number, got {text!r}")


def _coerce_choice(key: str, text: str, choices: Any) -> str:
    if isinstance(choices, type) and issubclass(choices, Enum):
        allowed = [member.value for member in choices]
    else:
        allowed = list(choices)
    for option in allowed:
        if text.lower() == option.lower():
            return option
    raise ConfigError(f"{key}: expected one of {', '.join(allowed)}, got {text!r}")


def coerce(key: str, text: str, default: Any) -> Any:
    """Convert a raw config value to the type of the key's default."""
    text = text.strip().strip("'\"")
    if key in CHOICES:
        return _coerce_choice(key, text, CHOICES[key])
    if isinstance(default, bool):
        value = yaml.safe_load(text) if text else None
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected true or false, got {text!r}")
        return value
    if isinstance(default, int):
        number = parse_float(key, text)
        if not number.is_integer():
            raise ConfigError(f"{key}: expected an integer, got {text!r}")
        return int(number)
    if default is None:
        if text.lower() in ("", "none", "null"):
            return None
        return parse_float(key, text)
    if isinstance(default, float):
        return parse_float(key, text)
    return text


def format_value(value: Any) -> str:
    """Canonical text of a config value; floats use the shortest round-trip repr."""
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RunConfig:
    """Validated flat configuration with per-section attribute access (cfg.photon.kind)."""

    def __init__(self, values: Mapping[str, Any], explicit: Iterable[str] = ()):
        self._values = dict(values)
        self._explicit = frozenset(explicit)
        self._update_namespaces()

    def _update_namespaces(self) -> None:
        sections: Dict[str, Dict[str, Any]] = {}
        for key, value in self._values.items():
            section, _, leaf = key.partition(".")
            sections.setdefault(section, {})[leaf] = value
        for section, leaves in sections.items():
            setattr(self, section, SimpleNamespace(**leaves))

    @classmethod
    def from_mapping(
        cls, overrides: Mapping[str, Any], defaults: Optional[Mapping[str, Any]] = None
    ) -> "RunConfig":
        base = dict(defaults) if defaults is not None else load_defaults()
        values = dict(base)
        for key, raw in overrides.items():
            if key not in base:
                raise ConfigError(f"Unknown configuration key: {key}")
            if isinstance(raw, Enum):
                raw = raw.value
            if isinstance(raw, str):
                values[key] = coerce(key, raw, base[key])
            else:
                values[key] = coerce(key, format_value(raw), base[key])
        return cls(values, explicit=overrides.keys())

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "RunConfig":
        overrides: Dict[str, str] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue
            key, sep, raw = content.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ConfigError(f"{source}:{number}: expected 'key = value'")
            if key in overrides:
                raise ConfigError(f"{source}:{number}: duplicate key {key}")
            overrides[key] = raw.strip()
        try:
            return cls.from_mapping(overrides)
        except ConfigError as e:
            raise ConfigError(f"{source}: {e}") from e

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        logger.info(f"Loading run configuration from {path}")
        try:
            text = Path(path).read_text()
        except IOError as e:
            raise ConfigError(f"Cannot read configuration file {path}: {e}") from e
        return cls.from_text(text, source=str(path))

    def get(self, key: str) -> Any:
        if key not in self._values:
            raise ConfigError(f"Unknown configuration key: {key}")
        return self._values[key]

    def is_explicit(self, key: str) -> bool:
        return key in self._explicit

    def is_set(self, key: str) -> bool:
        return self.get(key) is not None

    @property
    def values(self) -> Dict[str, Any]:
        return dict(self._values)

    @property
    def explicit_keys(self) -> List[str]:
        return sorted(self._explicit)

    def with_value(self, key: str, value: Any) -> "RunConfig":
        """Copy of this config with one key replaced (marked explicit)."""
        if key not in self._values:
            raise ConfigError(f"Unknown configuration key: {key}")
        values = dict(self._values)
        values[key] = value
        return RunConfig(values, explicit=self._explicit | {key})

    def header_lines(self) -> List[str]:
        return [f"{key} = {format_value(self._values[key])}" for key in sorted(self._values)]

    def __getstate__(self):
        return {"values": self._values, "explicit": self._explicit}

    def __setstate__(self, state):
        self._values = state["values"]
        self._explicit = state["explicit"]
        self._update_namespaces()


class RuntimeSettings:
    """Process-level settings from environment variables (and a .env file)."""

    def __init__(self):
        load_dotenv()
        self.log_level = os.getenv("ARCSIM_LOG_LEVEL", "INFO").upper()
        self.log_file = os.getenv("ARCSIM_LOG_FILE") or None
        workers = os.getenv("ARCSIM_WORKERS")
        try:
            self.workers = int(workers) if workers else None
        except ValueError as e:
            raise ConfigError(f"ARCSIM_WORKERS must be an integer, got {workers!r}") from e

    def resolve_workers(self, requested: Optional[int] = None) -> int:
        """--workers beats ARCSIM_WORKERS, which beats the physical core count."""
        if requested:
            return max(1, requested)
        if self.workers:
            return max(1, self.workers)
        return psutil.cpu_count(logical=False) or 1
