from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ModelService import RadialFunction, TestFunction


class WordFactor(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["create", "annihilate"]
    function: TestFunction


class PolynomialWord(BaseModel):
    """Ordered product of creation and annihilation operators times a complex scalar."""
    model_config = ConfigDict(frozen=True)

    factors: Tuple[WordFactor, ...] = ()
    scalar: complex = 1.0

    @field_validator("factors", mode="before")
    @classmethod
    def _pairs(cls, value):
        return tuple(WordFactor(kind=item[0], function=item[1]) if isinstance(item, (tuple, list)) else item
                     for item in value)

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def balanced(self) -> bool:
        creators = sum(1 for factor in self.factors if factor.kind == "create")
        return 2 * creators == len(self.factors)


class ContinuumMeasure(BaseModel):
    """Lebesgue measure d^3k on R^3; radial integrals by adaptive quadrature."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["continuum"] = "continuum"
    breaks: Tuple[float, ...] = (0.0, 1.0, 8.0)


class DiscreteMeasure(BaseModel):
    """Radial nodes omega_k with weights mu_k so that int u^2 F(u) du ~ sum_k mu_k F(omega_k).

    Functions are mapped to mode coefficients f_k = amplitude * radial(omega_k) * sqrt(4 pi mu_k) * angular mean,
    which is the same rule that maps the form factor to the bath couplings g_k.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["discrete"] = "discrete"
    frequencies: np.ndarray
    weights: np.ndarray = Field(..., description="Radial weights mu_k")

    @field_validator("frequencies", "weights", mode="before")
    @classmethod
    def _array(cls, value):
        return np.asarray(value, dtype=float)

    def coefficients(self, f: RadialFunction) -> np.ndarray:
        return f.amplitude * f.radial(self.frequencies) * np.sqrt(4.0 * np.pi * self.weights) * f.angular_mean()
