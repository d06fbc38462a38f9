"""
Shared logging configuration helpers.

Provides a single entry point to configure logging so that the CLI, the
verification suite and the tests do not fight over logging.basicConfig.
Log records always go to stderr or a file: stdout is reserved for CSV.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional

DEFAULT_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def level_from_name(name: str) -> int:
    """Translate a level name from config ("DEBUG", "info", ...) to an int."""
    level = logging.getLevelName(name.strip().upper())
    if not isinstance(level, int):
        raise ValueError(f"Unknown log level: {name}")
    return level


def configure_logging(
    *,
    level: int = logging.WARNING,
    log_file: Optional[str] = None,
    include_console: bool = True,
    force: bool = False,
) -> None:
    """
    Configure root logging once.

    Args:
        level: Default logging level to apply.
        log_file: Optional filename to log to. None skips file logging.
        include_console: Whether to emit logs to stderr as well.
        force: When True, reconfigure even if handlers already exist.
    """
    root_logger = logging.getLogger()

    if root_logger.handlers and not force:
        root_logger.setLevel(level)
        return

    handlers: list[logging.Handler] = []
    formatter = logging.Formatter(DEFAULT_FORMAT)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    if include_console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        handlers.append(console_handler)

    logging.basicConfig(
        level=level,
        handlers=handlers or [logging.NullHandler()],
        format=DEFAULT_FORMAT,
        force=force,
    )
