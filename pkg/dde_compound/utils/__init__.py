"""Utility functions and helpers."""

from .errors import CapacityError, CompoundDdeError, InvalidArgumentError, NumericFailureError, UnsupportedError
from .logging import get_logger, resolve_level, run_log, setup_file_logging, setup_logging
from .parallel import parallel_map

__all__ = [
    "CapacityError",
    "CompoundDdeError",
    "InvalidArgumentError",
    "NumericFailureError",
    "UnsupportedError",
    "get_logger",
    "parallel_map",
    "resolve_level",
    "run_log",
    "setup_file_logging",
    "setup_logging",
]
