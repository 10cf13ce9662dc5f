# helper/workers.py
from __future__ import annotations

import logging
from collections.abc import Callable
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import os_env

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def map_ordered(fn: Callable[[T], R], items: Sequence[T], workers: int | None = None) -> list[R]:
    """
    Applies fn to every item on a thread pool.

    Results come back in item order regardless of completion order, and the
    first exception raised by any task is re-raised here.
    """
    workers = workers or os_env.WORKERS
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug(f"dispatching {len(items)} tasks to {workers} workers")
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='dressed-gate') as pool:
        futures = [pool.submit(fn, item) for item in items]
        return [future.result() for future in futures]
