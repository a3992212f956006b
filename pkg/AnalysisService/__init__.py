from .models import (Scenario, DecompositionTrace, MarkovError, GateReport, VanHoveRow, DominanceProfile,
                     PowerLawFit, Assertion, ScenarioResult, Trajectory)
from .core import AnalysisCore, get_analysis_core, characteristic_frequency, library_versions, CSV_COLUMNS

__all__ = ["Scenario", "DecompositionTrace", "MarkovError", "GateReport", "VanHoveRow", "DominanceProfile",
           "PowerLawFit", "Assertion", "ScenarioResult", "Trajectory", "AnalysisCore", "get_analysis_core",
           "characteristic_frequency", "library_versions", "CSV_COLUMNS"]
