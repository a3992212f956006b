from .models import (LevelShiftOperator, DaviesGenerator, SpectralMode, SpectralDecomposition, CPTPCheck)
from .principal_value import ThermalWeight, PlemeljIntegrals
from .core import DaviesCore, get_davies_core, dualize, gibbs_weights, transpose_permutation

__all__ = ["LevelShiftOperator", "DaviesGenerator", "SpectralMode", "SpectralDecomposition", "CPTPCheck",
           "ThermalWeight", "PlemeljIntegrals", "DaviesCore", "get_davies_core", "dualize",
           "gibbs_weights", "transpose_permutation"]
