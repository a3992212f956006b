from contextlib import contextmanager
from typing import Optional
from time import perf_counter

from .core import LoggerService


class LoggedService:
    """Base for the numerical cores: shared logger plus timing of heavy steps."""

    def __init__(self, logger: Optional[LoggerService] = None):
        self.logging = (logger or LoggerService()).get_logger()

    @contextmanager
    def timed(self, step: str):
        start_time = perf_counter()
        self.logging.info(f"{self.__class__.__name__}: {step} started")
        try:
            yield
        except Exception as e:
            self.logging.error(f"{self.__class__.__name__}: {step} failed: {e}", exc_info=True)
            raise
        self.logging.info(f"{self.__class__.__name__}: {step} finished in {perf_counter() - start_time:.2f} seconds")
