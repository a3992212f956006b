from .routers import lab

__all__ = ["lab"]
