"""
CLI Utilities Package

This package provides core utilities for the evrep CLI:
- Logging and output formatting
- Run configuration (flags, environment, .env and evrep.toml)
- Command-line input validation
"""

from .config import RunConfig, load_run_config, validate_run_config
from .logger import Colors, Symbols, log
from .validation import parse_axis, parse_float_list, parse_int_list

__all__ = [
    # Logger
    'log',
    'Symbols',
    'Colors',

    # Config
    'RunConfig',
    'load_run_config',
    'validate_run_config',

    # Validation
    'parse_axis',
    'parse_float_list',
    'parse_int_list',
]
