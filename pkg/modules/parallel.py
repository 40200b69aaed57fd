import os
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import TypeVar

from . import global_vars as gv
from .logger import logger

T = TypeVar("T")
R = TypeVar("R")


def worker_count(threads: int | None = None) -> int:
    """Requested workers, capped at the CPU count."""
    threads = gv.config.threads if threads is None else threads
    if threads < 1:
        msg = "The thread count must be at least 1."
        raise ValueError(msg)
    return min(threads, max(1, os.cpu_count() or 1))


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """fn over items in worker processes. Results keep the order of items."""

    workers = min(worker_count(threads), len(items))
    if workers <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Running {len(items)} tasks on {workers} workers")
    results: list = [None] * len(items)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futures = {ex.submit(fn, item): i for i, item in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return results
