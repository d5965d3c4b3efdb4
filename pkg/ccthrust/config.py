# ccthrust/config.py

import os
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values

from .errors import ConfigurationError

ENV_PREFIX = "CCTHRUST_"

# Keys a settings source may provide. CLI flags use the same names with dashes.
SETTING_KEYS = (
    "radius_m",
    "rot_freq_hz",
    "rot_omega_rad_s",
    "t_env_k",
    "t_particle_k",
    "material",
    "pol_mode",
    "diff_mode",
    "rel_tol",
    "out",
    "output",
    "omega0_hz",
    "omega0_rad_s",
    "kappa_strength",
    "freeze_gamma",
    "damping_convention",
    "window_linewidths",
    "workers",
    "log_level",
    "omega_min_rad_s",
    "omega_max_rad_s",
    "points",
    "log",
    "var",
    "value_from",
    "value_to",
    "temp_target",
)


class BaseConfig:
    """Defaults shared by every environment, read from CCTHRUST_* variables."""

    LOG_LEVEL = os.environ.get("CCTHRUST_LOG_LEVEL", "INFO")
    WORKERS = int(os.environ.get("CCTHRUST_WORKERS", "1"))
    REL_TOL = float(os.environ.get("CCTHRUST_REL_TOL", "1e-9"))
    OUTPUT_FORMAT = os.environ.get("CCTHRUST_OUTPUT_FORMAT", "csv")
    POL_MODE = os.environ.get("CCTHRUST_POL_MODE", "mie")
    DIFF_MODE = os.environ.get("CCTHRUST_DIFF_MODE", "auto")

    # Run defaults that are not tied to an environment
    ROT_FREQ_HZ = 1.0e4
    T_ENV_K = 300.0
    T_PARTICLE_K = 300.0

    @classmethod
    def validate(cls) -> None:
        if cls.WORKERS < 1:
            raise ConfigurationError(f"WORKERS must be >= 1, got {cls.WORKERS}", key="workers")


class DevelopmentConfig(BaseConfig):
    """Verbose local runs."""

    LOG_LEVEL = os.environ.get("CCTHRUST_LOG_LEVEL", "DEBUG")


class ProductionConfig(BaseConfig):
    """Batch runs: quieter logs, worker count must be sane."""

    LOG_LEVEL = os.environ.get("CCTHRUST_LOG_LEVEL", "INFO")

    @classmethod
    def validate(cls) -> None:
        super().validate()
        if cls.REL_TOL <= 0.0:
            raise ConfigurationError("REL_TOL must be positive in production", key="rel_tol")


def get_config(env: Optional[str] = None):
    """Pick the config class from CCTHRUST_ENV (production or development)."""
    env = env or os.getenv("CCTHRUST_ENV", "development")
    config_class = ProductionConfig if env == "production" else DevelopmentConfig
    config_class.validate()
    return config_class


def _normalise(raw: Mapping[str, Any]) -> Dict[str, Any]:
    out = {}
    for key, value in raw.items():
        name = key.strip().lower().replace("-", "_")
        if name in SETTING_KEYS and value not in (None, ""):
            out[name] = value
    return out


def load_settings(
    cli_values: Mapping[str, Any],
    config_file: Optional[str] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Dict[str, Any]:
    """
    Merge settings sources.

    Precedence: CLI value > config file (dotenv format) > CCTHRUST_* environment.
    Values from files and the environment stay strings; callers coerce them.
    """
    environ = os.environ if environ is None else environ
    merged: Dict[str, Any] = {}

    env_values = {
        key[len(ENV_PREFIX):]: value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX)
    }
    merged.update(_normalise(env_values))

    if config_file:
        if not os.path.isfile(config_file):
            raise ConfigurationError(f"config file not found: {config_file}", key="config")
        merged.update(_normalise(dotenv_values(config_file)))

    merged.update(_normalise(cli_values))
    return merged


def require_float(settings: Mapping[str, Any], key: str, default: Optional[float] = None) -> float:
    """Float setting, raising ConfigurationError naming the key when missing or malformed."""
    value = settings.get(key, default)
    if value is None:
        raise ConfigurationError(f"missing required setting '{key}'", key=key)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"setting '{key}' is not a number: {value!r}", key=key) from None


def optional_float(settings: Mapping[str, Any], key: str) -> Optional[float]:
    if settings.get(key) is None:
        return None
    return require_float(settings, key)


def as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")
