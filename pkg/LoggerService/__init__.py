from .core import LoggerService
from .service import LoggedService

__all__ = ["LoggerService", "LoggedService"]
