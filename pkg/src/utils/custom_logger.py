"""Custom logger for the project.

Provides a `get_logger(name: str)` function that returns a configured logger
that writes to a rotating file in the `logs/` directory and to stdout, and
`set_log_level(level)` used by the command line to tune console verbosity.
"""
from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
import sys

from src.config.settings import LOG_DIR, LOG_FILE_NAME

_LOG_DIR = LOG_DIR
_LOG_DIR.mkdir(parents=True, exist_ok=True)

_LOG_FILE = _LOG_DIR / LOG_FILE_NAME

_DEFAULT_LOG_FORMAT = "%(asctime)s — %(name)s — %(levelname)s — %(message)s"
_DEFAULT_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# console level shared by every logger handed out
_console_level = logging.INFO
_stream_handlers: list[logging.StreamHandler] = []


def _make_file_handler() -> RotatingFileHandler:
    handler = RotatingFileHandler(
        filename=str(_LOG_FILE),
        mode="a",
        maxBytes=5 * 1024 * 1024,  # 5 MB
        backupCount=5,
        encoding="utf-8",
    )
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(_DEFAULT_LOG_FORMAT, _DEFAULT_DATE_FORMAT))
    return handler


def _make_stream_handler() -> logging.StreamHandler:
    handler = logging.StreamHandler(stream=sys.stdout)
    handler.setLevel(_console_level)
    handler.setFormatter(logging.Formatter(_DEFAULT_LOG_FORMAT, _DEFAULT_DATE_FORMAT))
    _stream_handlers.append(handler)
    return handler


def get_logger(name: str | None = None) -> logging.Logger:
    """Return a configured logger.

    The logger has a rotating file handler writing to `logs/glrt.log` and a
    stream handler writing to stdout. Calling this function repeatedly for the
    same `name` does not add duplicate handlers.
    """
    logger_name = name or "glrt"
    logger = logging.getLogger(logger_name)
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    if not logger.handlers:
        logger.addHandler(_make_file_handler())
        logger.addHandler(_make_stream_handler())

    return logger


def set_log_level(level: str | int) -> None:
    """Set the console level of all project loggers (file output stays at DEBUG)."""
    global _console_level
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"Unknown log level: {level}")
        level = resolved
    _console_level = level
    for handler in _stream_handlers:
        handler.setLevel(level)


# Module-level default logger
LOGGER = get_logger("glrt")
