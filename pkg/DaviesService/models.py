from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class LevelShiftOperator(BaseModel):
    """Lambda_e on the span of phi_m (x) phi_n with (m, n) in the Bohr sector e.

    `hamiltonian` collects the principal-value integrals, `dissipative` the -i pi w(x0) terms;
    `matrix` is their sum.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    e: float
    pairs: Tuple[Tuple[int, int], ...]
    hamiltonian: np.ndarray
    dissipative: np.ndarray

    @field_validator("hamiltonian", "dissipative", mode="before")
    @classmethod
    def _complex(cls, value):
        return np.asarray(value, dtype=complex)

    @property
    def matrix(self) -> np.ndarray:
        return self.hamiltonian + self.dissipative

    @property
    def size(self) -> int:
        return len(self.pairs)


class DaviesGenerator(BaseModel):
    """L_S(lambda) as an N^2 x N^2 matrix on row-major vectorized density matrices."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lam: float
    beta: float
    energies: np.ndarray
    superop: np.ndarray
    hamiltonian_part: np.ndarray
    dissipative_part: np.ndarray
    shifts: Tuple[LevelShiftOperator, ...] = ()
    model_hash: str = ""
    settings: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("energies", mode="before")
    @classmethod
    def _real(cls, value):
        return np.asarray(value, dtype=float)

    @field_validator("superop", "hamiltonian_part", "dissipative_part", mode="before")
    @classmethod
    def _complex(cls, value):
        return np.asarray(value, dtype=complex)

    @property
    def dim(self) -> int:
        return int(self.energies.shape[0])

    @property
    def weak_coupling(self) -> np.ndarray:
        """K = (L_S(lambda) - L_S) / lambda^2."""
        return self.hamiltonian_part + self.dissipative_part


class SpectralMode(BaseModel):
    """One resonance: eigenvalue i (e + lambda^2 a) of L_S(lambda) with spectral projector P."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    e: float
    a: complex
    projector: np.ndarray
    multiplicity: int = 1


class SpectralDecomposition(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    modes: List[SpectralMode]
    lam: float
    simple: bool
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    def propagator(self, t: float) -> np.ndarray:
        """sum_j exp(i t (e_j + lambda^2 a_j)) P_j."""
        return sum(np.exp(1j * t * (mode.e + self.lam ** 2 * mode.a)) * mode.projector for mode in self.modes)

    def stationary_modes(self, tolerance: float = 1e-10) -> List[SpectralMode]:
        return [mode for mode in self.modes if abs(mode.e) + abs(mode.a) <= tolerance]


class CPTPCheck(BaseModel):
    t: float
    min_eigenvalue: float
    trace_defect: float
    passed: bool

