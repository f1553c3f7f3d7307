"""
CLI Logging System

This module implements the console logging used by the evrep CLI:
- Provides color-coded output on stderr, so CSV/JSON on stdout stays clean
- Implements indented groups usable as context managers
- Supports metric, check and written-file lines
- Handles error and warning blocks with key/value details

Colors are switched off when NO_COLOR is set or stderr is not a terminal.
"""

import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, TextIO, TypedDict, Union

__all__ = ['Colors', 'Symbols', 'Logger', 'log']


class DetailDict(TypedDict, total=False):
    """Type definition for detail dictionaries with optional dim-gray values."""
    key: str
    value: str
    dim_value: str


@dataclass
class Colors:
    """ANSI color codes for terminal output."""
    __slots__ = []

    MAIN: str = "\033[38;2;95;173;235m"       # #5FADEB - Primary actions/success
    LIGHT_GRAY: str = "\033[38;2;204;204;204m" # #CCCCCC - Secondary info
    DIM_GRAY: str = "\033[38;2;128;128;128m"  # #808080 - Technical details
    ERROR: str = "\033[38;2;255;59;48m"       # #FF3B30 - Errors and failed checks
    WARNING: str = "\033[38;2;255;149;0m"     # #FF9500 - Warnings
    RESET: str = "\033[0m"


@dataclass
class Symbols:
    """Unicode symbols for consistent logging."""
    __slots__ = []

    # Status indicators
    SUCCESS: str = "✅"
    ERROR: str = "❌"
    WARNING: str = "⚠️"
    CHECK: str = "✓"
    CROSS: str = "✗"
    ARROW: str = "→"
    METRIC: str = "📊"

    # Command indicators
    ATOM: str = "⚛️"
    DICE: str = "🎲"
    MAGNIFIER: str = "🔍"
    CLOCK: str = "⏱️"
    CHART: str = "📈"
    FOLDER: str = "📂"

    FILE_WRITTEN: str = "+"

    # Labels
    ERROR_LABEL: str = "[ERROR]"
    WARNING_LABEL: str = "[WARNING]"


def _color_enabled(stream: TextIO) -> bool:
    if os.getenv("NO_COLOR"):
        return False
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


class Logger:
    """
    Structured stderr logger for the evrep commands.

    Every method returns the logger so calls can be chained. `group` prints a
    heading and indents everything until the matching `end_group` (or the end
    of the `with` block).
    """

    def __init__(self, stream: Optional[TextIO] = None, color: Optional[bool] = None) -> None:
        self._stream = stream
        self._color = color
        self._indent_level: int = 0
        self._indent_size: int = 2

    @property
    def stream(self) -> TextIO:
        # resolved lazily so test runners that swap sys.stderr are honoured
        return self._stream if self._stream is not None else sys.stderr

    @property
    def color(self) -> bool:
        return _color_enabled(self.stream) if self._color is None else self._color

    def _indent(self) -> str:
        return " " * (self._indent_level * self._indent_size)

    def _paint(self, color: str, text: str) -> str:
        return f"{color}{text}{Colors.RESET}" if self.color else text

    def _format(self, color: str, message: str, metric: Optional[str] = None) -> 'Logger':
        """Format and print a log message with consistent styling."""
        parts: List[str] = [self._paint(color, f"{self._indent()}{message}")]
        if metric:
            parts.append(self._paint(Colors.DIM_GRAY, metric))
        print(" ".join(parts), file=self.stream)
        return self

    def detail(self, message: str, metric: Optional[str] = None, dim_suffix: Optional[str] = None) -> 'Logger':
        """Log additional details in light gray."""
        msg = f"{message} ({dim_suffix})" if dim_suffix else message
        return self._format(Colors.LIGHT_GRAY, msg, metric=metric)

    def success(self, message: str) -> 'Logger':
        return self._format(Colors.MAIN, f"{Symbols.SUCCESS} {message}")

    def error(self, message: str, details: Optional[Dict[str, object]] = None) -> 'Logger':
        """Log an error block with optional key/value details."""
        print("", file=self.stream)
        self._format(Colors.ERROR, f"{Symbols.ERROR_LABEL} {Symbols.ERROR} {message}")
        if details:
            self._indent_level += 1
            for key, value in details.items():
                self._format(Colors.ERROR, f"{Symbols.ARROW} {key}: {value}")
            self._indent_level -= 1
        return self

    def warning(self, message: str, details: Optional[List[DetailDict]] = None) -> 'Logger':
        """Log a warning block; details may carry a dim-gray suffix."""
        print("", file=self.stream)
        self._format(Colors.WARNING, f"{Symbols.WARNING_LABEL} {Symbols.WARNING} {message}")
        if details:
            self._indent_level += 1
            for detail in details:
                msg = f"{Symbols.ARROW} {detail['key']}: {detail['value']}"
                self._format(Colors.WARNING, msg, metric=detail.get('dim_value'))
            self._indent_level -= 1
        return self

    def written_file(self, path: object) -> 'Logger':
        return self._format(Colors.MAIN, f"{Symbols.FILE_WRITTEN} {path}")

    def check(self, item: str, passed: bool = True, metric: Optional[str] = None) -> 'Logger':
        """Log a validation line with a check mark or a cross."""
        if passed:
            return self._format(Colors.MAIN, f"{Symbols.CHECK} {item}", metric=metric)
        return self._format(Colors.ERROR, f"{Symbols.CROSS} {item}", metric=metric)

    def metric(self, value: Union[str, int, float], context: Optional[str] = None) -> 'Logger':
        """Log metric display with optional context."""
        msg = f"{value:.6g}" if isinstance(value, float) else str(value)
        if context:
            msg = f"{msg} {context}"
        return self.detail(f"{Symbols.METRIC} {msg}")

    def group(self, message: str, emoji: Optional[str] = None) -> 'Logger':
        """Create a new log group with increased indentation."""
        self._format(Colors.MAIN, f"{emoji + ' ' if emoji else ''}{message}")
        self._indent_level += 1
        return self

    def end_group(self) -> 'Logger':
        if self._indent_level > 0:
            self._indent_level -= 1
        return self

    def __enter__(self) -> 'Logger':
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.end_group()


# Global logger instance
log = Logger()
