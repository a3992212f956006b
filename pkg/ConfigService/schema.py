from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, List, Literal, Optional, Tuple, Union

ComplexPair = Tuple[float, float]
ComplexMatrix = List[List[ComplexPair]]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProfileConfig(_Section):
    family: Literal["constant", "gaussian"] = Field("constant", description="Radial profile family")
    scale: float = Field(1.0, description="Value of the profile at the origin")
    coefficients: List[float] = Field(default_factory=lambda: [1.0], description="Polynomial coefficients, low order first")
    width: float = Field(1.0, gt=0, description="Gaussian width (gaussian family only)")


class FormFactorConfig(_Section):
    p: float = Field(0.5, description="Infrared exponent")
    q: float = Field(2.5, description="Ultraviolet exponent")
    anisotropy: float = Field(0.0, description="Dipole anisotropy of the angular factor")
    profile: ProfileConfig = Field(default_factory=ProfileConfig)


class ModelConfig(_Section):
    energies: List[float] = Field(..., min_length=2, description="System energies, ascending")
    coupling: ComplexMatrix = Field(..., description="Coupling matrix G, row-major (re, im) pairs")
    beta: float = Field(1.0, gt=0, description="Inverse temperature")
    lambdas: List[float] = Field(default_factory=lambda: [0.1], min_length=1, description="Coupling constants")
    fgr_tolerance: float = Field(1e-12, gt=0)
    degeneracy_tolerance: float = Field(1e-9, gt=0)
    simplicity_tolerance: float = Field(1e-9, gt=0)

    @model_validator(mode="after")
    def _square_coupling(self):
        n = len(self.energies)
        if len(self.coupling) != n or any(len(row) != n for row in self.coupling):
            raise ValueError(f"coupling must be {n}x{n}")
        return self


class BathConfig(_Section):
    n_modes: int = Field(4, ge=1)
    omega_max: float = Field(4.0, gt=0)
    scheme: Literal["uniform_midpoint", "gauss_spectral"] = "gauss_spectral"
    cutoffs: Optional[List[int]] = Field(None, description="Explicit Fock cutoffs, one per mode")
    max_dim: Optional[int] = Field(None, ge=2, description="Composite dimension budget")


class FunctionConfig(_Section):
    function_class: Literal["obs", "cor"] = "obs"
    p: float = 0.5
    q: float = 4.0
    amplitude: ComplexPair = (1.0, 0.0)
    anisotropy: float = 0.0
    profile: ProfileConfig = Field(default_factory=lambda: ProfileConfig(family="gaussian", width=1.0))


class LinearTermConfig(_Section):
    matrix: ComplexMatrix
    kind: Literal["create", "annihilate"]
    function: str


class FactorConfig(_Section):
    system: Optional[ComplexMatrix] = None
    create: Optional[str] = None
    annihilate: Optional[str] = None
    weyl: Optional[str] = None
    exp_linear: Optional[List[LinearTermConfig]] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [name for name in ("system", "create", "annihilate", "weyl", "exp_linear")
                 if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"a factor needs exactly one of system/create/annihilate/weyl/exp_linear, got {given}")
        return self


class WordConfig(_Section):
    factors: List[FactorConfig] = Field(default_factory=list)
    scalar: ComplexPair = (1.0, 0.0)


class KrausConfig(_Section):
    kind: Literal["identity", "product", "example", "words"] = "identity"
    normalize: bool = True
    sigma: Optional[ComplexMatrix] = Field(None, description="System state for kind = product")
    creators: List[LinearTermConfig] = Field(default_factory=list, description="B_j (x) a*(f_j) terms for kind = example")
    annihilators: List[LinearTermConfig] = Field(default_factory=list, description="D_k (x) a(f_k) terms for kind = example")
    words: List[WordConfig] = Field(default_factory=list)

    @model_validator(mode="after")
    def _kind_fields(self):
        if self.kind == "product" and self.sigma is None:
            raise ValueError("kind = product needs sigma")
        if self.kind == "words" and not self.words:
            raise ValueError("kind = words needs at least one word")
        return self


class AnalysisConfig(_Section):
    t_max: float = Field(20.0, gt=0)
    n_times: int = Field(41, ge=2)
    observables: List[str] = Field(default_factory=list)
    fit_observable: Optional[str] = None
    window_start: float = Field(5.0, ge=0)
    tau_list: List[float] = Field(default_factory=lambda: [0.0, 1.0])
    seed: int = 7
    gates: bool = True

    @field_validator("tau_list")
    @classmethod
    def _nonnegative(cls, value):
        if any(tau < 0 for tau in value):
            raise ValueError("tau values must be nonnegative")
        return value


class OutputConfig(_Section):
    directory: str = "runs/default"


class RunConfig(_Section):
    """Complete, validated run configuration."""
    model: ModelConfig
    form_factor: FormFactorConfig = Field(default_factory=FormFactorConfig)
    bath: BathConfig = Field(default_factory=BathConfig)
    functions: Dict[str, FunctionConfig] = Field(default_factory=dict)
    kraus: KrausConfig = Field(default_factory=KrausConfig)
    observables: Dict[str, WordConfig] = Field(default_factory=dict)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _references(self):
        names = set(self.functions)

        def check(function_name: Union[str, None], where: str):
            if function_name is not None and function_name not in names:
                raise ValueError(f"{where} refers to unknown function '{function_name}'")

        def word_functions(word: WordConfig):
            for factor in word.factors:
                yield from (factor.create, factor.annihilate, factor.weyl)
                yield from (term.function for term in factor.exp_linear or [])

        kraus_functions = [term.function for term in self.kraus.creators + self.kraus.annihilators]
        for word in self.kraus.words:
            kraus_functions.extend(word_functions(word))
        for function_name in kraus_functions:
            check(function_name, "kraus")
            if function_name is not None and self.functions[function_name].function_class != "cor":
                raise ValueError(f"kraus uses function '{function_name}' which is not of class cor")
        for word in self.observables.values():
            for function_name in word_functions(word):
                check(function_name, "observable")
        for name in self.analysis.observables:
            if name not in self.observables:
                raise ValueError(f"analysis refers to unknown observable '{name}'")
        if self.analysis.fit_observable and self.analysis.fit_observable not in self.observables:
            raise ValueError(f"unknown fit observable '{self.analysis.fit_observable}'")
        return self
