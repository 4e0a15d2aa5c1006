"""
Ordered fan-out used by the dataset-level operations behind ``--threads``.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)


def ordered_map(func, items, threads=1):
    """Apply ``func`` to every item and return results in input order.

    ``threads`` only changes wall time: results are collected by position,
    never by completion order.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug('Fanning out %d items over %d threads', len(items), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
