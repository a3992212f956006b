from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ModelService import TestFunction


class LinearTerm(BaseModel):
    """B (x) a#(f) inside an exponential of a linear field expression."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    kind: Literal["create", "annihilate"]
    function: TestFunction

    @field_validator("matrix", mode="before")
    @classmethod
    def _complex(cls, value):
        return np.asarray(value, dtype=complex)


class OperatorFactor(BaseModel):
    """One factor of an operator word: a system matrix, a(f), a*(f), W(f) or exp(i sum B_r (x) a#(f_r))."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["system", "create", "annihilate", "weyl", "exp_linear"]
    matrix: Optional[np.ndarray] = None
    function: Optional[TestFunction] = None
    terms: Tuple[LinearTerm, ...] = ()

    @field_validator("matrix", mode="before")
    @classmethod
    def _complex(cls, value):
        return None if value is None else np.asarray(value, dtype=complex)

    @model_validator(mode="after")
    def _payload(self):
        if self.kind == "system" and self.matrix is None:
            raise ValueError("system factor needs a matrix")
        if self.kind in ("create", "annihilate", "weyl") and self.function is None:
            raise ValueError(f"{self.kind} factor needs a test function")
        if self.kind == "exp_linear" and not self.terms:
            raise ValueError("exp_linear factor needs at least one term")
        return self

    @property
    def functions(self) -> Tuple[TestFunction, ...]:
        if self.kind == "exp_linear":
            return tuple(term.function for term in self.terms)
        return () if self.function is None else (self.function,)

    @classmethod
    def system(cls, matrix) -> "OperatorFactor":
        return cls(kind="system", matrix=matrix)

    @classmethod
    def create(cls, function: TestFunction) -> "OperatorFactor":
        return cls(kind="create", function=function)

    @classmethod
    def annihilate(cls, function: TestFunction) -> "OperatorFactor":
        return cls(kind="annihilate", function=function)

    @classmethod
    def weyl(cls, function: TestFunction) -> "OperatorFactor":
        return cls(kind="weyl", function=function)


class OperatorWord(BaseModel):
    model_config = ConfigDict(frozen=True)

    factors: Tuple[OperatorFactor, ...] = ()
    scalar: complex = 1.0

    @property
    def functions(self) -> Tuple[TestFunction, ...]:
        return tuple(f for factor in self.factors for f in factor.functions)

    @property
    def separable(self) -> bool:
        """True when the word is a product of system-only and reservoir-only factors."""
        return all(factor.kind != "exp_linear" for factor in self.factors)

    @property
    def system_only(self) -> bool:
        return all(factor.kind == "system" for factor in self.factors)


class KrausSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    words: Tuple[OperatorWord, ...] = Field(..., min_length=1)
    normalize: bool = True

    @property
    def product(self) -> bool:
        """System-only Kraus words keep the reservoir in its thermal state: the initial state is a product."""
        return all(word.system_only for word in self.words)
