from .models import ScenarioRun
from .DatabaseSer import DatabaseService
from .config import registry_url
from .core import RunRegistry, get_registry

__all__ = ["DatabaseService", "ScenarioRun", "RunRegistry", "get_registry", "registry_url"]
