"""
Configuration Utilities Module

This module provides run-configuration management for the evrep CLI:
- Loads defaults from evrep.toml ([evrep] table) in the working directory
- Loads .env files with python-dotenv
- Reads the EVREP_SEED, EVREP_SHOTS and EVREP_JOBS environment variables
- Validates the merged settings

Precedence, highest first: command-line flag, environment (including .env),
evrep.toml, built-in defaults.
"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import tomli
from dotenv import find_dotenv, load_dotenv

# Defaults
DEFAULT_SEED = 0
DEFAULT_SHOTS = 10_000
DEFAULT_JOBS = 1
CONFIG_FILE = "evrep.toml"

ENV_VARS = {
    "seed": "EVREP_SEED",
    "shots": "EVREP_SHOTS",
    "jobs": "EVREP_JOBS",
}


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by the commands that sample or parallelize."""
    seed: int = DEFAULT_SEED
    shots: int = DEFAULT_SHOTS
    jobs: int = DEFAULT_JOBS


def _as_int(key: str, value: Any, source: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{key} from {source} must be an integer, got {value!r}")
    try:
        return int(str(value).strip())
    except ValueError:
        raise ValueError(f"{key} from {source} must be an integer, got {value!r}")


def load_toml_defaults(directory: Path) -> Dict[str, int]:
    """
    Read the [evrep] table of evrep.toml, if present.

    Args:
        directory: Directory to look in

    Returns:
        Recognized settings found in the file

    Raises:
        ValueError: If the file is not valid TOML or a value is not an integer
    """
    path = directory / CONFIG_FILE
    if not path.exists():
        return {}
    try:
        with path.open("rb") as f:
            data = tomli.load(f)
    except tomli.TOMLDecodeError as e:
        raise ValueError(f"Invalid {CONFIG_FILE}: {e}")
    table = data.get("evrep", {})
    return {
        key: _as_int(key, table[key], CONFIG_FILE)
        for key in ENV_VARS
        if key in table
    }


def load_env_overrides() -> Dict[str, int]:
    """Recognized settings from the environment; .env values never override real ones."""
    load_dotenv(find_dotenv(usecwd=True), override=False)
    out: Dict[str, int] = {}
    for key, var in ENV_VARS.items():
        raw = os.getenv(var)
        if raw is not None and raw.strip():
            out[key] = _as_int(key, raw, var)
    return out


def validate_run_config(config: RunConfig) -> RunConfig:
    """
    Check the merged settings.

    Raises:
        ValueError: For a negative seed or non-positive shots or jobs
    """
    if config.seed < 0:
        raise ValueError(f"seed must be non-negative, got {config.seed}")
    if config.shots < 1:
        raise ValueError(f"shots must be positive, got {config.shots}")
    if config.jobs < 1:
        raise ValueError(f"jobs must be positive, got {config.jobs}")
    return config


def load_run_config(
    directory: Optional[Path] = None,
    **flags: Optional[int],
) -> RunConfig:
    """
    Merge defaults, evrep.toml, environment and command-line flags.

    Args:
        directory: Where to look for evrep.toml (default: the working directory)
        **flags: seed/shots/jobs values from the command line; None means unset

    Returns:
        A validated RunConfig
    """
    config = RunConfig()
    config = replace(config, **load_toml_defaults(directory or Path.cwd()))
    config = replace(config, **load_env_overrides())
    known = {f.name for f in fields(RunConfig)}
    explicit = {k: v for k, v in flags.items() if k in known and v is not None}
    return validate_run_config(replace(config, **explicit))
