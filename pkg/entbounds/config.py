"""
Configuration management for entbounds

Grid sizes, tolerances, sample counts and seeds. Values are resolved in
increasing precedence: defaults, ENTBOUNDS_* environment variables (a
.env file is honoured), a key=value config file, then explicit overrides
(CLI flags).
"""

import logging
import os
from pathlib import Path
from typing import Any

from dotenv import dotenv_values, load_dotenv
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
)

from entbounds.core.errors import ConfigError

# Load .env file from the working directory
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = "ENTBOUNDS_"


class Config(BaseModel):
    """Configuration model for entbounds"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    figure_points: int = Field(
        default=501, ge=2, description="Abscissa points per figure"
    )
    envelope_grid: int = Field(
        default=1_000_000,
        ge=2,
        description="Uniform points for envelope verification",
    )
    endpoint_points: int = Field(
        default=10_000,
        ge=0,
        description="Chebyshev-clustered points added near each endpoint",
    )
    quick_grid: int = Field(
        default=10_000, ge=2, description="Envelope grid in quick suite mode"
    )
    slack_tolerance: float = Field(
        default=1e-13, gt=0, description="Allowed envelope rounding slack"
    )
    sandwich_tolerance: float = Field(
        default=1e-10, gt=0, description="Allowed slack in lower<=H<=upper"
    )
    design_tolerance: float = Field(
        default=1e-9, gt=0, description="Frame potential tolerance (built-in)"
    )
    found_design_tolerance: float = Field(
        default=1e-6,
        gt=0,
        description="Frame potential tolerance (numerically found designs)",
    )
    conjecture_tolerance: float = Field(
        default=1e-12, gt=0, description="Allowed margin for Shannon-Tsallis"
    )
    bisection_xtol: float = Field(
        default=1e-13, gt=0, description="Absolute tolerance for the root"
    )
    bisection_maxiter: int = Field(
        default=200, ge=1, description="Bisection step limit"
    )
    snub_restarts: int = Field(
        default=64, ge=1, description="Nelder-Mead restarts for snub cube"
    )
    seed: int = Field(default=20240521, description="Global RNG seed")
    monte_carlo_samples: int = Field(
        default=100_000, ge=1, description="Random distributions per check"
    )
    state_samples: int = Field(
        default=10_000, ge=1, description="Random states per design check"
    )
    workers: int = Field(
        default=4, ge=1, description="Threads for chunked computations"
    )
    log_level: str = Field(
        default="WARNING", description="Logging level (DEBUG, INFO, WARNING)"
    )

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        if not isinstance(logging.getLevelName(value.strip().upper()), int):
            raise ValueError(f"Unknown log level: {value}")
        return value.strip().upper()


class ConfigManager:
    """
    Black Box: Configuration Manager

    Interface:
    - get_config() -> Config: defaults + environment + config file
    - with_overrides(**values) -> Config: same, plus explicit overrides
    """

    def __init__(
        self,
        config_path: Path | None = None,
        environ: dict[str, str] | None = None,
    ) -> None:
        """
        Args:
            config_path: Optional key=value file (e.g. from --config)
            environ: Environment mapping (defaults to os.environ)
        """
        self.config_path = config_path
        self._environ = dict(os.environ if environ is None else environ)
        self.config = self._build({})

    def _from_env(self) -> dict[str, Any]:
        """Collect ENTBOUNDS_* variables that name a config field"""
        values: dict[str, Any] = {}
        for key, value in self._environ.items():
            if not key.startswith(ENV_PREFIX):
                continue
            name = key[len(ENV_PREFIX) :].lower()
            if name in Config.model_fields:
                values[name] = value
            else:
                logger.warning(f"Ignoring unknown environment setting {key}")
        return values

    def _from_file(self) -> dict[str, Any]:
        """Parse the key=value config file, rejecting unknown keys"""
        if self.config_path is None:
            return {}
        if not self.config_path.exists():
            raise ConfigError(f"Config file not found: {self.config_path}")

        raw = dotenv_values(self.config_path)
        values: dict[str, Any] = {}
        for key, value in raw.items():
            name = key.strip().lower()
            if name not in Config.model_fields:
                raise ConfigError(
                    f"Unknown config key '{key}' in {self.config_path}"
                )
            if value is None:
                raise ConfigError(f"Config key '{key}' has no value")
            values[name] = value
        logger.debug(f"Loaded {len(values)} settings from {self.config_path}")
        return values

    def _build(self, overrides: dict[str, Any]) -> Config:
        data: dict[str, Any] = {}
        data.update(self._from_env())
        data.update(self._from_file())
        data.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return Config(**data)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

    def get_config(self) -> Config:
        """Get current configuration"""
        return self.config

    def with_overrides(self, **values: Any) -> Config:
        """
        Resolve configuration with explicit overrides on top.

        None values are ignored so unset CLI flags fall through.
        """
        return self._build(values)


# Global instance
_config_manager: ConfigManager | None = None


def get_config_manager() -> ConfigManager:
    """Get the global config manager instance"""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def get_config() -> Config:
    """Shortcut for the global configuration"""
    return get_config_manager().get_config()
