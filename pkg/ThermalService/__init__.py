from .models import WordFactor, PolynomialWord, ContinuumMeasure, DiscreteMeasure
from .quadrature import integrate, half_line, full_line
from .core import ThermalCore, get_thermal_core, bose_occupation, coth_half

__all__ = ["WordFactor", "PolynomialWord", "ContinuumMeasure", "DiscreteMeasure", "integrate", "half_line",
           "full_line", "ThermalCore", "get_thermal_core", "bose_occupation", "coth_half"]
