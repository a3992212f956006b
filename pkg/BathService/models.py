from typing import Any, Dict, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ThermalService import DiscreteMeasure

Scheme = Literal["uniform_midpoint", "gauss_spectral"]


class DiscretizedBath(BaseModel):
    """Finitely many oscillators omega_k with couplings g_k standing in for the continuum reservoir.

    `radial_weights` mu_k satisfy int u^2 F(u) du ~ sum_k mu_k F(omega_k); test functions are
    sampled with them so that compiled fields use the same quadrature as the coupling.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    frequencies: np.ndarray
    couplings: np.ndarray
    radial_weights: np.ndarray
    scheme: Scheme
    omega_max: float
    provenance: str = ""

    @field_validator("frequencies", "radial_weights", mode="before")
    @classmethod
    def _real(cls, value):
        return np.asarray(value, dtype=float)

    @field_validator("couplings", mode="before")
    @classmethod
    def _complex(cls, value):
        return np.asarray(value, dtype=complex)

    @property
    def n_modes(self) -> int:
        return int(self.frequencies.shape[0])

    @property
    def measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(frequencies=self.frequencies, weights=self.radial_weights)

    def describe(self) -> Dict[str, Any]:
        return {"scheme": self.scheme, "n_modes": self.n_modes, "omega_max": self.omega_max,
                "frequencies": self.frequencies.tolist(), "form_factor": self.provenance}


class FockTruncation(BaseModel):
    """Per-mode cutoffs n_k; mode k keeps the Fock states |0>, ..., |n_k>."""
    model_config = ConfigDict(frozen=True)

    cutoffs: Tuple[int, ...]
    system_dim: int

    @field_validator("cutoffs", mode="before")
    @classmethod
    def _positive(cls, value):
        value = tuple(int(n) for n in value)
        if any(n < 1 for n in value):
            raise ValueError(f"Fock cutoffs must be positive, got {value}")
        return value

    @property
    def mode_dims(self) -> Tuple[int, ...]:
        return tuple(n + 1 for n in self.cutoffs)

    @property
    def bath_dim(self) -> int:
        return int(np.prod(self.mode_dims, dtype=np.int64))

    @property
    def dimension(self) -> int:
        return self.system_dim * self.bath_dim

    def raised(self, step: int = 1) -> "FockTruncation":
        return FockTruncation(cutoffs=tuple(n + step for n in self.cutoffs), system_dim=self.system_dim)


class CompositeState(BaseModel):
    """Density matrix on C^N (x) (x)_k C^(n_k + 1); `system_dim` is 1 for a reservoir-only factor."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    rho: np.ndarray
    system_dim: int
    mode_dims: Tuple[int, ...]
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("rho", mode="before")
    @classmethod
    def _complex(cls, value):
        return np.asarray(value, dtype=complex)

    @property
    def bath_dim(self) -> int:
        return int(np.prod(self.mode_dims, dtype=np.int64))

    @property
    def dimension(self) -> int:
        return int(self.rho.shape[0])

    def validity(self) -> Dict[str, float]:
        """Hermiticity defect, trace defect and minimum eigenvalue."""
        return {"hermiticity": float(np.max(np.abs(self.rho - self.rho.conj().T))),
                "trace": float(abs(np.trace(self.rho) - 1.0)),
                "min_eigenvalue": float(np.min(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))))}
