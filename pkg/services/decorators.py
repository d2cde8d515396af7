import logging
import time
from contextlib import contextmanager
from functools import wraps
from typing import Callable, Dict

logger = logging.getLogger(__name__)


def log_performance(func: Callable) -> Callable:
    """Decorator to log function execution time"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            execution_ms = (time.perf_counter() - start_time) * 1000.0
            logger.debug(f"{func.__name__} executed in {execution_ms:.2f} ms")

    return wrapper


class PhaseTimer:
    """Collects wall time per named phase, in milliseconds"""

    def __init__(self):
        self.timings: Dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        start_time = time.perf_counter()
        try:
            yield
        finally:
            elapsed = (time.perf_counter() - start_time) * 1000.0
            self.timings[name] = self.timings.get(name, 0.0) + elapsed
