# app/workers.py
"""Process pool for chunked accumulation.

Results come back in task order, so merging them left to right gives the
same answer for any worker count.
"""

import logging
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def run_ordered(func, tasks, threads=1):
    tasks = list(tasks)
    if threads <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    workers = min(threads, len(tasks))
    logger.debug("dispatching %d chunks to %d workers", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))
