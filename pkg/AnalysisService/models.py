from hashlib import sha256
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from BathService import CompositeState, DiscretizedBath, FockTruncation
from DaviesService import DaviesGenerator
from ModelService import FormFactor, SystemModel
from StateService import KrausSpec, OperatorWord


class Scenario(BaseModel):
    """One simulation setting: model, coupling, bath, initial correlations, observables and time grid."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    model: SystemModel
    ff: FormFactor
    beta: float
    lam: float
    bath: DiscretizedBath
    trunc: FockTruncation
    kraus: KrausSpec
    observables: Dict[str, OperatorWord] = Field(default_factory=dict)
    t_grid: np.ndarray
    recurrence_time: float
    labels: Dict[str, Any] = Field(default_factory=dict)
    degeneracy_tolerance: float = 1e-9
    simplicity_tolerance: float = 1e-9
    max_dim: Optional[int] = None

    @field_validator("t_grid", mode="before")
    @classmethod
    def _grid(cls, value):
        return np.asarray(value, dtype=float)

    @model_validator(mode="after")
    def _window(self):
        if np.any(np.diff(self.t_grid) < 0) or np.any(self.t_grid < 0):
            raise ValueError("time grid must be sorted and nonnegative")
        if self.t_grid.size and self.t_grid[-1] > 0.5 * self.recurrence_time * (1 + 1e-12):
            raise ValueError(f"time grid ends at {self.t_grid[-1]:.6g}, beyond half the recurrence time "
                             f"{0.5 * self.recurrence_time:.6g}")
        for name, word in self.observables.items():
            for function in word.functions:
                if function.function_class != "obs":
                    raise ValueError(f"observable '{name}' uses a test function outside class obs")
        return self

    def fingerprint(self) -> str:
        digest = sha256()
        digest.update(self.model.model_hash().encode())
        digest.update(self.ff.fingerprint().encode())
        digest.update(np.array([self.beta, self.lam], dtype=float).tobytes())
        digest.update(self.bath.frequencies.tobytes() + self.bath.couplings.tobytes())
        digest.update(repr(self.trunc.cutoffs).encode())
        digest.update(repr(self.kraus).encode())
        digest.update(repr(sorted(self.observables)).encode())
        digest.update(self.t_grid.tobytes())
        return digest.hexdigest()[:16]

    def provenance(self) -> Dict[str, Any]:
        return {"n_modes": self.bath.n_modes, "scheme": self.bath.scheme, "omega_max": self.bath.omega_max,
                "cutoffs": list(self.trunc.cutoffs), "dimension": self.trunc.dimension,
                "recurrence_time": self.recurrence_time, "window_end": 0.5 * self.recurrence_time,
                "form_factor": self.bath.provenance, "model_hash": self.model.model_hash()}


class DecompositionTrace(BaseModel):
    """exact = markov + chi_hat for one observable along the time grid, plus the free correlation."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    observable: str
    t: np.ndarray
    exact: np.ndarray
    markov: np.ndarray
    free_corr: np.ndarray
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def chi_hat(self) -> np.ndarray:
        return self.exact - self.markov

    def identity_defect(self) -> float:
        return float(np.max(np.abs(self.exact - (self.markov + self.chi_hat)))) if self.t.size else 0.0


class MarkovError(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    t: np.ndarray
    distance: np.ndarray

    @property
    def supremum(self) -> float:
        return float(np.max(self.distance))

    @property
    def argmax_time(self) -> float:
        return float(self.t[int(np.argmax(self.distance))])

    @property
    def argmax_at_edge(self) -> bool:
        return int(np.argmax(self.distance)) == self.t.size - 1

    def restricted(self, t_end: float) -> "MarkovError":
        """The same series on the shorter window [0, t_end]."""
        keep = self.t <= t_end * (1 + 1e-12)
        return MarkovError(t=self.t[keep], distance=self.distance[keep])


class GateReport(BaseModel):
    name: str
    max_distance: Optional[float] = None
    threshold: float
    passed: Optional[bool] = None
    skipped: bool = False
    reason: str = ""


class VanHoveRow(BaseModel):
    tau: float
    lam: float
    t: float
    interaction: complex
    weak_coupling: complex

    @property
    def deviation(self) -> float:
        return abs(self.interaction - self.weak_coupling)


class DominanceProfile(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    t: np.ndarray
    correlation: np.ndarray
    markov_deviation: np.ndarray
    crossovers: List[float] = Field(default_factory=list)


class PowerLawFit(BaseModel):
    observable: str
    window: Tuple[float, float]
    exponent: Optional[float] = None
    r_squared: Optional[float] = None
    reason: str = ""


class Assertion(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class ScenarioResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    scenario_hash: str
    lam: float
    traces: Dict[str, DecompositionTrace]
    markov_error: MarkovError
    born_distance: Optional[np.ndarray] = None
    gates: List[GateReport] = Field(default_factory=list)
    fits: List[PowerLawFit] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict)


class Trajectory(BaseModel):
    """Exact joint states on the grid together with the Markovian reference they are compared against."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    initial: CompositeState
    reservoir: CompositeState
    states: List[CompositeState]
    system_initial: np.ndarray
    system_exact: List[np.ndarray]
    system_markov: List[np.ndarray]
    generator: DaviesGenerator
