from functools import wraps
from time import process_time
from typing import Callable

from phidiag import logger

__all__ = ["time_function"]


def time_function(func: Callable):
    """Decorator logging the process time spent in a pipeline stage."""

    @wraps(func)
    def _time_it(*args, **kwargs):
        start = process_time()
        try:
            return func(*args, **kwargs)
        finally:
            delta = process_time() - start
            logger.info(f'"{func.__qualname__}" took {delta:.3f} s of process time')

    return _time_it
