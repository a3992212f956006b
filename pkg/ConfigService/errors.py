from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for every error raised by the lab services."""
    exit_code = 3


class ConfigError(LabError):
    """Unparseable or schema-invalid run configuration."""
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key:
            where.append(f"key '{key}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class DomainError(LabError, ValueError):
    """Argument outside the mathematical domain of an operation."""
    exit_code = 2


class ValidationError(LabError, ValueError):
    """Structurally invalid input: class violation, window violation, incomplete Kraus set."""
    exit_code = 2


class AssumptionError(LabError):
    """(A1) or (A2a) does not hold for the requested model."""
    exit_code = 1


class NumericalError(LabError, ArithmeticError):
    """Eigendecomposition, matrix exponential or similar numerical failure."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(f"{message} {self.diagnostics}" if self.diagnostics else message)


class QuadratureError(NumericalError):
    """Quadrature whose error estimate stays above tolerance."""


class ResourceError(LabError, MemoryError):
    """Composite dimension above the configured budget."""

    def __init__(self, message: str, dimension: Optional[int] = None, limit: Optional[int] = None):
        self.dimension = dimension
        self.limit = limit
        super().__init__(f"{message}: dimension {dimension} exceeds limit {limit}" if dimension else message)


class ComplexityError(LabError):
    """Wick word longer than the configured maximum."""


class DegenerateSpecError(LabError):
    """Zero-trace Kraus state or vanishing discretization weight."""
