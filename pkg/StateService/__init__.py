from .models import LinearTerm, OperatorFactor, OperatorWord, KrausSpec
from .core import StateCore, get_state_core, psd_power

__all__ = ["LinearTerm", "OperatorFactor", "OperatorWord", "KrausSpec", "StateCore", "get_state_core", "psd_power"]
