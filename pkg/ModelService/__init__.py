from .models import (RadialProfile, RadialFunction, FormFactor, TestFunction, SystemModel, AssumptionReport,
                     BohrSector, BohrDecomposition)
from .angular import sphere_rule, sphere_integral
from .core import ModelCore, get_model_core, spectral_density, complex_matrix

__all__ = ["RadialProfile", "RadialFunction", "FormFactor", "TestFunction", "SystemModel", "AssumptionReport",
           "BohrSector", "BohrDecomposition", "sphere_rule", "sphere_integral", "ModelCore", "get_model_core",
           "spectral_density", "complex_matrix"]
