from .models import DiscretizedBath, FockTruncation, CompositeState
from .core import BathCore, get_bath_core, ladder, occupation, trace_distance, von_neumann_entropy

__all__ = ["DiscretizedBath", "FockTruncation", "CompositeState", "BathCore", "get_bath_core", "ladder",
           "occupation", "trace_distance", "von_neumann_entropy"]
