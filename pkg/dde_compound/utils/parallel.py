"""Bounded worker pool for independent trials."""

from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from dde_compound.config import get_settings
from dde_compound.utils.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """Apply ``func`` to every item, preserving input order.

    numpy releases the GIL inside the heavy kernels, so threads give real
    speedups for trial batches. Results never depend on the thread count:
    each item must carry its own seed.

    Args:
    ----
        func: Function of one item
        items: Work items
        threads: Worker count; defaults to the configured thread count

    Returns:
    -------
        Results in item order

    """
    work = list(items)
    workers = threads if threads is not None else get_settings().threads
    workers = max(1, min(workers, len(work) or 1))

    if workers == 1:
        return [func(item) for item in work]

    logger.debug("Dispatching %d items to %d worker threads", len(work), workers)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="dde-compound") as pool:
        return list(pool.map(func, work))
