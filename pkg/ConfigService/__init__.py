from .config import ENV, LOG_DIR, MAX_DIM, WORKERS, REGISTRY_URL, QUAD_EPSREL, QUAD_LIMIT
from .errors import (LabError, ConfigError, DomainError, ValidationError, AssumptionError, NumericalError,
                     QuadratureError, ResourceError, ComplexityError, DegenerateSpecError)
from .schema import RunConfig
from .loader import load_config, parse_config, dump_resolved
from .files import atomic_write_text

__all__ = ["ENV", "LOG_DIR", "MAX_DIM", "WORKERS", "REGISTRY_URL", "QUAD_EPSREL", "QUAD_LIMIT",
           "LabError", "ConfigError", "DomainError", "ValidationError", "AssumptionError", "NumericalError",
           "QuadratureError", "ResourceError", "ComplexityError", "DegenerateSpecError",
           "RunConfig", "load_config", "parse_config", "dump_resolved", "atomic_write_text"]
