from hashlib import sha256
from typing import List, Literal, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .angular import sphere_rule, sphere_integral

ADMISSIBLE_A1_EXPONENTS = (-0.5, 0.5, 1.5)


class RadialProfile(BaseModel):
    """Smooth radial factor h(|k|) = scale * P(|k|) * exp(-|k|^2 / (2 width^2)) with closed-form derivatives.

    The constant family is h = scale. Both families declare derivatives of every order; only the
    gaussian family decays faster than any exponential.
    """
    model_config = ConfigDict(frozen=True)

    family: Literal["constant", "gaussian"] = "constant"
    scale: float = 1.0
    coefficients: Tuple[float, ...] = (1.0,)
    width: float = Field(1.0, gt=0)

    @field_validator("coefficients", mode="before")
    @classmethod
    def _as_tuple(cls, value):
        return tuple(value)

    @property
    def declared_derivatives(self) -> int:
        return 4 if self.family == "constant" else 8

    @property
    def super_exponential(self) -> bool:
        return self.family == "gaussian"

    def _polynomial(self, order: int) -> Polynomial:
        poly = Polynomial(self.coefficients) * self.scale
        damping = Polynomial([0.0, -1.0 / self.width ** 2])
        for _ in range(order):
            poly = poly.deriv() + damping * poly
        return poly

    def value(self, r, order: int = 0):
        """h or its derivative of the given order with respect to |k|."""
        r = np.asarray(r, dtype=float)
        if self.family == "constant":
            return np.full_like(r, self.scale if order == 0 else 0.0)
        return self._polynomial(order)(r) * np.exp(-r ** 2 / (2.0 * self.width ** 2))

    def check_smooth(self, orders: int, r_max: float = 50.0, samples: int = 2001) -> bool:
        """h(0) != 0 and finite, bounded derivatives up to `orders` on a sampling grid."""
        if orders > self.declared_derivatives or self.value(0.0) == 0.0:
            return False
        grid = np.linspace(0.0, r_max, samples)
        return all(np.all(np.isfinite(self.value(grid, order))) for order in range(orders + 1))


class RadialFunction(BaseModel):
    """Function on R^3 of the form amplitude * |k|^p / (1 + |k|^(p+q)) * h(|k|) * (1 + anisotropy cos(theta))."""
    model_config = ConfigDict(frozen=True)

    p: float = 0.5
    q: float = 2.5
    profile: RadialProfile = Field(default_factory=RadialProfile)
    anisotropy: float = 0.0
    amplitude_re: float = 1.0
    amplitude_im: float = 0.0

    @property
    def amplitude(self) -> complex:
        return complex(self.amplitude_re, self.amplitude_im)

    @property
    def isotropic(self) -> bool:
        return self.anisotropy == 0.0

    def radial(self, u):
        """Real radial part without amplitude; zero at the origin when p > 0."""
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.power(u, self.p) / (1.0 + np.power(u, self.p + self.q)) * self.profile.value(u)

    def angular(self, cos_theta):
        return 1.0 + self.anisotropy * np.asarray(cos_theta, dtype=float)

    def __call__(self, u, cos_theta=1.0):
        return self.amplitude * self.radial(u) * self.angular(cos_theta)

    def angular_overlap(self, other: "RadialFunction", order: int = 26) -> float:
        """Integral over S^2 of the product of the two (real) angular factors."""
        if self.isotropic and other.isotropic:
            return 4.0 * np.pi
        nodes, _ = sphere_rule(order)
        return float(np.real(sphere_integral(self.angular(nodes[:, 2]) * other.angular(nodes[:, 2]), order)))

    def angular_mean(self) -> float:
        """Average of the angular factor over the sphere."""
        return 1.0

    def scaled(self, factor: complex):
        amplitude = self.amplitude * factor
        return self.model_copy(update={"amplitude_re": amplitude.real, "amplitude_im": amplitude.imag})

    def fingerprint(self) -> str:
        return sha256(self.model_dump_json().encode()).hexdigest()[:16]


class FormFactor(RadialFunction):
    """Coupling function g(k) of the interaction lambda G (x) phi(g)."""

    @model_validator(mode="after")
    def _square_integrable(self):
        if not self.p > -1.5 or not self.q > 2:
            raise ValueError(f"form factor must have p > -3/2 and q > 2, got p={self.p}, q={self.q}")
        return self

    @property
    def a1_exponent_ok(self) -> bool:
        return any(abs(self.p - p) < 1e-12 for p in ADMISSIBLE_A1_EXPONENTS) or self.p > 2


class TestFunction(RadialFunction):
    """Single-particle test function of class obs (observables) or cor (Kraus operators)."""
    __test__ = False

    function_class: Literal["obs", "cor"] = "obs"
    q: float = 4.0

    @model_validator(mode="after")
    def _admissible(self):
        if not (any(abs(self.p - p) < 1e-12 for p in (-0.5, 0.5)) or self.p > 1):
            raise ValueError(f"test function infrared exponent must be -1/2, 1/2 or > 1, got {self.p}")
        if not self.q > 1.5:
            raise ValueError(f"test function must decay faster than |k|^-3/2, got q={self.q}")
        if self.function_class == "cor" and not self.profile.super_exponential:
            raise ValueError("class cor needs a profile with super-exponential decay (gaussian family)")
        return self


class SystemModel(BaseModel):
    """Finite-level system: ascending energies and Hermitian coupling matrix in the energy eigenbasis."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    energies: np.ndarray
    coupling: np.ndarray

    @field_validator("energies", mode="before")
    @classmethod
    def _energies(cls, value):
        return np.asarray(value, dtype=float)

    @field_validator("coupling", mode="before")
    @classmethod
    def _coupling(cls, value):
        return np.asarray(value, dtype=complex)

    @model_validator(mode="after")
    def _invariants(self):
        n = self.energies.shape[0]
        if self.energies.ndim != 1 or n < 2:
            raise ValueError("a system needs at least two levels")
        if np.any(np.diff(self.energies) < 0):
            raise ValueError("energies must be sorted ascending")
        if self.coupling.shape != (n, n):
            raise ValueError(f"coupling must be {n}x{n}, got {self.coupling.shape}")
        scale = max(np.max(np.abs(self.coupling)), 1.0)
        if np.max(np.abs(self.coupling - self.coupling.conj().T)) > 1e-12 * scale:
            raise ValueError("coupling matrix is not Hermitian")
        return self

    @property
    def dim(self) -> int:
        return int(self.energies.shape[0])

    @property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.energies).astype(complex)

    def model_hash(self) -> str:
        digest = sha256(self.energies.tobytes() + self.coupling.tobytes())
        return digest.hexdigest()[:16]


class AssumptionReport(BaseModel):
    a1_ok: bool
    a2a_ok: bool
    a2a_witness: List[Tuple[int, int, complex]] = Field(default_factory=list)
    fgr_tolerance: float = 1e-12
    notes: str = ""

    @property
    def ok(self) -> bool:
        return self.a1_ok and self.a2a_ok


class BohrSector(BaseModel):
    """One Bohr frequency e and the index pairs (m, n) with E_m - E_n = e."""
    model_config = ConfigDict(frozen=True)

    e: float
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.pairs)


class BohrDecomposition(BaseModel):
    model_config = ConfigDict(frozen=True)

    sectors: Tuple[BohrSector, ...]
    dim: int

    @property
    def frequencies(self) -> List[float]:
        return [sector.e for sector in self.sectors]

    def sector(self, e: float, tolerance: float = 1e-9) -> BohrSector:
        for sector in self.sectors:
            if abs(sector.e - e) <= tolerance:
                return sector
        raise KeyError(f"no Bohr frequency {e}")

    def index(self, m: int, n: int) -> int:
        """Row-major position of the pair (m, n) in a vectorized N x N matrix."""
        return m * self.dim + n
