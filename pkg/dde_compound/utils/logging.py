"""Logging for the package: stderr for the console, ``run.log`` per output directory."""

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from dde_compound.config import get_settings
from dde_compound.utils.errors import InvalidArgumentError

PACKAGE_LOGGER = "dde_compound"
RUN_LOG = "run.log"


def resolve_level(level: str | None) -> int:
    """Numeric level for ``level``, falling back to the configured default."""
    name = (level or get_settings().log_level).upper()
    value = logging.getLevelName(name)
    if not isinstance(value, int):
        msg = f"unknown log level '{level}'"
        raise InvalidArgumentError(msg)
    return value


def setup_logging(level: str | None = None, format_string: str | None = None) -> logging.Logger:
    """Configure the package logger to write to stderr.

    stdout stays free for the CSV the ``spectrum`` subcommand prints. Calling
    this again replaces the console handler instead of stacking a second one.

    Args:
    ----
        level: Level name; ``Settings.log_level`` when omitted
        format_string: Record format; ``Settings.log_format`` when omitted

    Returns:
    -------
        The package logger

    """
    numeric = resolve_level(level)
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel(numeric)

    for handler in logger.handlers[:]:
        if not isinstance(handler, logging.FileHandler):
            logger.removeHandler(handler)

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(numeric)
    console.setFormatter(logging.Formatter(format_string or get_settings().log_format))
    logger.addHandler(console)
    logger.propagate = False
    return logger


def get_logger(name: str) -> logging.Logger:
    """Module logger; ``__name__`` inside the package makes it a child of the package logger."""
    return logging.getLogger(name)


def setup_file_logging(logger: logging.Logger, log_file: Path, level: str | None = None) -> logging.FileHandler:
    """Attach a handler writing ``log_file`` from scratch and return it."""
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
    handler.setLevel(resolve_level(level))
    handler.setFormatter(logging.Formatter(get_settings().log_format))
    logger.addHandler(handler)
    return handler


@contextmanager
def run_log(directory: Path, level: str | None = None) -> Iterator[Path]:
    """Record package logs of one run in ``directory/run.log``; the handler is detached on exit."""
    logger = logging.getLogger(PACKAGE_LOGGER)
    path = directory / RUN_LOG
    handler = setup_file_logging(logger, path, level)
    try:
        yield path
    finally:
        logger.removeHandler(handler)
        handler.close()
