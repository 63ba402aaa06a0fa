"""
Toolkit configuration loaded from the environment (.env supported)
"""

import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

from .exceptions import ConfigurationError

_TRUE_VALUES = {'1', 'true', 'yes', 'on'}


@dataclass(frozen=True)
class ToolkitConfig:
    """Resolved settings shared by the modules and the CLI"""

    output_dir: Optional[str] = None
    default_k: int = 80
    max_level: int = 26
    exact_level_cap: int = 16
    hankel_nodes: int = 200
    workers: int = 4
    quiet: bool = False

    def with_overrides(self, **changes) -> 'ToolkitConfig':
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _int_from_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"❌ {name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigurationError(f"❌ {name} must be >= {minimum}, got {value}")
    return value


def load_config(dotenv: bool = True) -> ToolkitConfig:
    """Read FAREY_* variables into a ToolkitConfig."""
    if dotenv:
        load_dotenv()

    output_dir = os.getenv('FAREY_OUTPUT_DIR') or None
    return ToolkitConfig(
        output_dir=output_dir,
        default_k=_int_from_env('FAREY_DEFAULT_K', 80),
        max_level=_int_from_env('FAREY_MAX_LEVEL', 26),
        exact_level_cap=_int_from_env('FAREY_EXACT_LEVEL_CAP', 16),
        hankel_nodes=_int_from_env('FAREY_HANKEL_NODES', 200, minimum=8),
        workers=_int_from_env('FAREY_WORKERS', 4),
        quiet=os.getenv('FAREY_QUIET', '0').strip().lower() in _TRUE_VALUES,
    )


_active: Optional[ToolkitConfig] = None


def get_config() -> ToolkitConfig:
    """Process-wide configuration, loaded on first use."""
    global _active
    if _active is None:
        _active = load_config()
    return _active


def set_config(config: Optional[ToolkitConfig]) -> None:
    """Install (or with None, reset) the process-wide configuration."""
    global _active
    _active = config
