"""Runtime settings loaded from the environment and any local .env file."""

from __future__ import annotations

import dataclasses
import functools
import pathlib

from secretbox import SecretBox

__all__ = [
    "ConfigError",
    "Settings",
    "get_settings",
]

_PREFIX = "QUDITWIGNER_"


class ConfigError(ValueError):
    """Raised when a configuration value cannot be interpreted."""


@dataclasses.dataclass(frozen=True)
class Settings:
    """Numerical limits, tolerances and output defaults."""

    max_dimension: int = 11
    max_lattice_points: int = 729
    tolerance: float = 1e-10
    strict_tolerance: float = 1e-12
    k_tolerance: float = 1e-9
    path_budget: int = 5_000_000
    output_dir: pathlib.Path | None = None
    log_level: str = "WARNING"

    def output_path(self, filename: str) -> pathlib.Path:
        """Resolve an output filename against the configured output directory."""
        path = pathlib.Path(filename)
        if path.is_absolute() or self.output_dir is None:
            return path

        return self.output_dir / path


def _read(secrets: SecretBox, key: str, default: str) -> str:
    return secrets.get(_PREFIX + key, default) or default


def _as_int(secrets: SecretBox, key: str, default: int) -> int:
    raw = _read(secrets, key, str(default))
    try:
        return int(raw)

    except ValueError as err:
        raise ConfigError(f"{_PREFIX}{key} must be an integer, got {raw!r}") from err


def _as_float(secrets: SecretBox, key: str, default: float) -> float:
    raw = _read(secrets, key, repr(default))
    try:
        value = float(raw)

    except ValueError as err:
        raise ConfigError(f"{_PREFIX}{key} must be a number, got {raw!r}") from err

    if value <= 0:
        raise ConfigError(f"{_PREFIX}{key} must be positive, got {raw!r}")

    return value


@functools.lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Return the process-wide settings.

    Raises:
        ConfigError: If any QUDITWIGNER_* value is malformed.
    """
    secrets = SecretBox(auto_load=True)
    defaults = Settings()

    output_dir = _read(secrets, "OUTPUT_DIR", "")

    return Settings(
        max_dimension=_as_int(secrets, "MAX_DIMENSION", defaults.max_dimension),
        max_lattice_points=_as_int(
            secrets, "MAX_LATTICE_POINTS", defaults.max_lattice_points
        ),
        tolerance=_as_float(secrets, "TOLERANCE", defaults.tolerance),
        strict_tolerance=_as_float(
            secrets, "STRICT_TOLERANCE", defaults.strict_tolerance
        ),
        k_tolerance=_as_float(secrets, "K_TOLERANCE", defaults.k_tolerance),
        path_budget=_as_int(secrets, "PATH_BUDGET", defaults.path_budget),
        output_dir=pathlib.Path(output_dir) if output_dir else None,
        log_level=_read(secrets, "LOG_LEVEL", defaults.log_level).upper(),
    )
