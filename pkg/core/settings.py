"""Runtime settings loaded from the environment (optionally via a .env file).

Values are validated once and cached; tests call ``get_settings(reset=True)``
after changing the environment.
"""
from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError


class Settings(BaseModel):
    """Tunable limits of the exact engine and the simulator."""

    model_config = ConfigDict(frozen=True)

    budget: float = Field(default=2e10, gt=0)
    max_hands: int = Field(default=16, ge=2)
    rational_horizon: int = Field(default=64, ge=1)
    round_cap: int = Field(default=10**9, ge=1)
    tail_tolerance: float = Field(default=1e-9, gt=0, lt=1)
    max_levels: int = Field(default=200_000, ge=1)
    rational_digits: int = Field(default=4000, ge=10)
    log_level: str = "INFO"


# env var -> field name
_ENV_FIELDS = {
    "JANKEN_BUDGET": "budget",
    "JANKEN_MAX_HANDS": "max_hands",
    "JANKEN_RATIONAL_HORIZON": "rational_horizon",
    "JANKEN_ROUND_CAP": "round_cap",
    "JANKEN_TAIL_TOLERANCE": "tail_tolerance",
    "JANKEN_MAX_LEVELS": "max_levels",
    "JANKEN_RATIONAL_DIGITS": "rational_digits",
    "JANKEN_LOG_LEVEL": "log_level",
}

_settings: Optional[Settings] = None
_settings_lock = threading.Lock()


def _load_env_file(env_path: Optional[Path] = None) -> None:
    path = env_path or Path(".env")
    if path.exists():
        try:
            load_dotenv(path, override=False)
        except Exception as e:  # pragma: no cover
            logger.warning(f"Failed to load {path}: {e}")


def load_settings(env_path: Optional[Path] = None) -> Settings:
    """Build a Settings instance from the environment.

    Args:
        env_path: Optional .env file; defaults to ./.env when present

    Returns:
        Validated Settings

    Raises:
        ValueError: If an environment value does not validate
    """
    _load_env_file(env_path)

    raw = {}
    for env_name, field_name in _ENV_FIELDS.items():
        value = os.getenv(env_name)
        if value is not None and value.strip():
            raw[field_name] = value.strip()

    try:
        # float() first so "1e9" is accepted for integer caps
        for name in (
            "round_cap",
            "max_hands",
            "rational_horizon",
            "max_levels",
            "rational_digits",
        ):
            if name in raw:
                raw[name] = int(float(raw[name]))
        return Settings(**raw)
    except (ValidationError, ValueError) as e:
        raise ValueError(f"Invalid JANKEN_* configuration: {e}") from e


def get_settings(reset: bool = False) -> Settings:
    """Return the cached settings, re-reading the environment when ``reset``."""
    global _settings

    with _settings_lock:
        if _settings is None or reset:
            _settings = load_settings()
            logger.debug(f"Settings loaded: {_settings.model_dump()}")
    return _settings
