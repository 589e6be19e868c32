"""Configuration system for cylint.

Loads project-level defaults from a `.cylint.toml` file.
Override precedence: CLI flags > environment (CYLINT_RMIN) > config file >
hardcoded defaults.
"""

import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

CONFIG_FILENAME = ".cylint.toml"
RMIN_ENV_VAR = "CYLINT_RMIN"


class GeometryConfig(BaseModel):
    """Defaults for the coordinate layer."""

    r_min: float = Field(default=1e-6, gt=0.0)


class VerifyConfig(BaseModel):
    """Defaults for the verification suites."""

    fd_step: float = Field(default=1e-3, gt=0.0)
    samples: int = Field(default=100, ge=1)
    seed: int = 0
    tol: float = Field(default=1e-6, ge=0.0)
    grid: tuple[int, int, int] = (5, 8, 5)
    r_range: tuple[float, float] = (0.5, 2.0)
    z_range: tuple[float, float] = (-1.0, 1.0)
    p_range: tuple[float, float] = (-2.0, 2.0)


class IntegratorSettings(BaseModel):
    """Defaults for trajectory integration."""

    scheme: Literal["implicit-midpoint", "rk4"] = "implicit-midpoint"
    dt: float = Field(default=1e-3, gt=0.0)
    tol: float = Field(default=1e-12, gt=0.0)
    max_iter: int = Field(default=50, ge=1)


class OdesConfig(BaseModel):
    """Defaults for the profile ODE solvers."""

    steps: int = Field(default=10_000, ge=10)
    monitor_tol: float = Field(default=1e-9, gt=0.0)
    consistency_tol: float = Field(default=1e-10, gt=0.0)
    gamma_floor: float = Field(default=0.1, gt=0.0, lt=1.0)


class LoggingConfig(BaseModel):
    """Logging level used by the command line front end."""

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"


class CylintConfig(BaseModel):
    """Root configuration for cylint."""

    geometry: GeometryConfig = GeometryConfig()
    verify: VerifyConfig = VerifyConfig()
    integrator: IntegratorSettings = IntegratorSettings()
    odes: OdesConfig = OdesConfig()
    logging: LoggingConfig = LoggingConfig()


_cached_config: Optional[CylintConfig] = None


def find_config_file(start_dir: Optional[Path] = None) -> Optional[Path]:
    """Search for .cylint.toml, walking up from start_dir to root.

    Args:
        start_dir: Directory to start searching from. Defaults to cwd.

    Returns:
        Path to the config file if found, None otherwise.
    """
    current = (start_dir or Path.cwd()).resolve()
    while True:
        candidate = current / CONFIG_FILENAME
        if candidate.is_file():
            return candidate
        parent = current.parent
        if parent == current:
            break
        current = parent
    return None


def apply_env_overrides(config: CylintConfig) -> CylintConfig:
    """Apply environment overrides on top of a loaded configuration.

    Only CYLINT_RMIN is recognised. Values that do not parse as a positive
    float are ignored with a warning.
    """
    raw = os.environ.get(RMIN_ENV_VAR)
    if raw is None or not raw.strip():
        return config
    try:
        r_min = float(raw)
        geometry = GeometryConfig(r_min=r_min)
    except Exception as e:
        logger.warning("Ignoring %s=%r: %s", RMIN_ENV_VAR, raw, e)
        return config
    return config.model_copy(update={"geometry": geometry})


def load_config(config_path: Optional[Path] = None) -> CylintConfig:
    """Load configuration from a TOML file.

    Args:
        config_path: Explicit path to config file. If None, searches
            for .cylint.toml walking up from cwd.

    Returns:
        CylintConfig instance with environment overrides applied. Falls back
        to defaults if no file is found or the file cannot be parsed.
    """
    if config_path is None:
        config_path = find_config_file()

    if config_path is None or not config_path.is_file():
        return apply_env_overrides(CylintConfig())

    try:
        with open(config_path, "rb") as f:
            data = tomllib.load(f)
        config = CylintConfig.model_validate(data)
    except Exception as e:
        logger.warning("Failed to load config from %s: %s", config_path, e)
        config = CylintConfig()
    return apply_env_overrides(config)


def get_config() -> CylintConfig:
    """Return the process-wide configuration, loading it on first use."""
    global _cached_config
    if _cached_config is None:
        _cached_config = load_config()
    return _cached_config


def set_config(config: CylintConfig) -> None:
    """Install an explicit configuration (used by the CLI --config flag)."""
    global _cached_config
    _cached_config = config


def reset_config_cache() -> None:
    """Forget the cached configuration so the next get_config() reloads."""
    global _cached_config
    _cached_config = None
