from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from ConfigService import DegenerateSpecError, NumericalError, RunConfig, ValidationError
from ConfigService.schema import LinearTermConfig, WordConfig
from LoggerService import LoggerService, LoggedService
from BathService import BathCore, CompositeState, DiscretizedBath, FockTruncation, get_bath_core
from ModelService import SystemModel, TestFunction, complex_matrix, get_model_core
from .models import KrausSpec, LinearTerm, OperatorFactor, OperatorWord

COMPLETENESS_TOLERANCE = 1e-6
HERMITIAN_IMAGINARY = 1e-9


def psd_power(matrix: np.ndarray, power: float) -> np.ndarray:
    """matrix^power for a Hermitian positive semidefinite matrix (eigenvalues clipped at zero)."""
    values, vectors = np.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    values = np.clip(values, 0.0, None)
    with np.errstate(divide="ignore"):
        powered = np.where(values > 0, values ** power, 0.0)
    return (vectors * powered[None, :]) @ vectors.conj().T


class StateCore(LoggedService):
    """Compiles operator words on the truncated composite space and builds initial states."""

    def __init__(self, logger: Optional[LoggerService] = None, bath_core: Optional[BathCore] = None):
        super().__init__(logger)
        self.bath_core = bath_core or get_bath_core(logger)

    # ---- compilation

    @staticmethod
    def _check_class(word: OperatorWord, required: Optional[str]):
        if required is None:
            return
        for function in word.functions:
            if function.function_class != required:
                raise ValidationError(f"word uses a class {function.function_class} test function where "
                                      f"class {required} is required")

    def _bath_factor(self, factor: OperatorFactor, bath: DiscretizedBath, trunc: FockTruncation) -> np.ndarray:
        coefficients = bath.measure.coefficients(factor.function)
        if factor.kind == "create":
            return self.bath_core.creation(trunc, coefficients).toarray()
        if factor.kind == "annihilate":
            return self.bath_core.annihilation(trunc, coefficients).toarray()
        return self._exponential(1j * self.bath_core.field(trunc, coefficients).toarray())

    @staticmethod
    def _exponential(argument: np.ndarray) -> np.ndarray:
        result = expm(argument)
        if not np.all(np.isfinite(result)):
            raise NumericalError("matrix exponential did not converge",
                                 diagnostics={"dimension": argument.shape[0],
                                              "norm": float(np.linalg.norm(argument))})
        return result

    def _linear_argument(self, terms: Sequence[LinearTerm], bath: DiscretizedBath, trunc: FockTruncation
                         ) -> np.ndarray:
        """sum_r B_r (x) a#(f_r) on the composite space."""
        total = 0
        for term in terms:
            coefficients = bath.measure.coefficients(term.function)
            if term.kind == "create":
                field = self.bath_core.creation(trunc, coefficients)
            else:
                field = self.bath_core.annihilation(trunc, coefficients)
            total = total + np.kron(term.matrix, field.toarray())
        return total

    def compile_word(self, word: OperatorWord, bath: DiscretizedBath, trunc: FockTruncation,
                     required_class: Optional[str] = None) -> np.ndarray:
        """Matrix of the word on C^N (x) truncated Fock space; factors multiply in listed order."""
        self._check_class(word, required_class)
        n, b = trunc.system_dim, trunc.bath_dim
        result = np.eye(n * b, dtype=complex)
        for factor in word.factors:
            if factor.kind == "system":
                if factor.matrix.shape != (n, n):
                    raise ValidationError(f"system factor must be {n}x{n}, got {factor.matrix.shape}")
                matrix = np.kron(factor.matrix, np.eye(b))
            elif factor.kind == "exp_linear":
                matrix = self._exponential(1j * self._linear_argument(factor.terms, bath, trunc))
            else:
                matrix = np.kron(np.eye(n), self._bath_factor(factor, bath, trunc))
            result = result @ matrix
        return complex(word.scalar) * result

    def split_word(self, word: OperatorWord, bath: DiscretizedBath, trunc: FockTruncation
                   ) -> Tuple[np.ndarray, np.ndarray]:
        """(S, R) with compile_word(word) = S (x) R, for words without exp_linear factors."""
        if not word.separable:
            raise ValidationError("word with an exp_linear factor is not a product of system and reservoir parts")
        system = complex(word.scalar) * np.eye(trunc.system_dim, dtype=complex)
        reservoir = np.eye(trunc.bath_dim, dtype=complex)
        for factor in word.factors:
            if factor.kind == "system":
                system = system @ factor.matrix
            else:
                reservoir = reservoir @ self._bath_factor(factor, bath, trunc)
        return system, reservoir

    # ---- states

    def correlated_initial_state(self, spec: KrausSpec, model: SystemModel, bath: DiscretizedBath, beta: float,
                                 trunc: FockTruncation) -> CompositeState:
        """sum_alpha K_alpha (rho_S,beta (x) omega_R) K_alpha^dagger."""
        reservoir = self.bath_core.bath_thermal_state(bath, beta, trunc)
        reference = self.bath_core.product_state(get_model_core().gibbs_state(model, beta), reservoir)
        krauses = [self.compile_word(word, bath, trunc, required_class="cor") for word in spec.words]
        if not spec.normalize:
            completeness = sum(k.conj().T @ k for k in krauses)
            deviation = float(np.linalg.norm(completeness - np.eye(completeness.shape[0]), 2))
            if deviation > COMPLETENESS_TOLERANCE:
                raise ValidationError(f"Kraus operators are not complete: ||sum K^dagger K - 1|| = {deviation:.2e}")
        rho = sum(k @ reference.rho @ k.conj().T for k in krauses)
        trace = np.trace(rho).real
        if trace < 1e-12:
            raise DegenerateSpecError(f"Kraus state has trace {trace:.2e}")
        hermitian = 0.5 * (rho + rho.conj().T)
        asymmetry = float(np.max(np.abs(hermitian - rho)))
        if spec.normalize:
            hermitian = hermitian / trace
        self.logging.info(f"Correlated state: {len(krauses)} Kraus words, trace before normalization {trace:.6f}, "
                          f"re-symmetrized by {asymmetry:.2e}")
        return CompositeState(rho=hermitian, system_dim=trunc.system_dim, mode_dims=trunc.mode_dims,
                              metadata={**reservoir.metadata, "kraus_trace": trace, "kraus_words": len(krauses)})

    def expectation(self, state: CompositeState, observable: OperatorWord, bath: DiscretizedBath,
                    trunc: FockTruncation) -> complex:
        """tr(rho O) for an observable built from class obs test functions."""
        matrix = self.compile_word(observable, bath, trunc, required_class="obs")
        value = complex(np.trace(state.rho @ matrix))
        scale = max(float(np.max(np.abs(matrix))), 1.0)
        if np.max(np.abs(matrix - matrix.conj().T)) <= 1e-12 * scale and abs(value.imag) > HERMITIAN_IMAGINARY:
            raise NumericalError("Hermitian observable has a complex expectation",
                                 diagnostics={"value": str(value)})
        return value

    @staticmethod
    def example_word(creators: Sequence[Tuple[np.ndarray, TestFunction]],
                     annihilators: Sequence[Tuple[np.ndarray, TestFunction]]) -> OperatorWord:
        """exp(E) with E = sum_j B_j (x) a*(f_j) + sum_k D_k (x) a(f_k), written as exp(i sum (-i B) (x) a#)."""
        terms = [LinearTerm(matrix=-1j * np.asarray(b, dtype=complex), kind="create", function=f)
                 for b, f in creators]
        terms += [LinearTerm(matrix=-1j * np.asarray(d, dtype=complex), kind="annihilate", function=f)
                  for d, f in annihilators]
        return OperatorWord(factors=(OperatorFactor(kind="exp_linear", terms=tuple(terms)),))

    def example_state(self, model: SystemModel, bath: DiscretizedBath, beta: float, trunc: FockTruncation,
                      creators: Sequence[Tuple[np.ndarray, TestFunction]],
                      annihilators: Sequence[Tuple[np.ndarray, TestFunction]] = ()) -> CompositeState:
        """exp(E) (rho_S,beta (x) omega_R) exp(E)^dagger / Z."""
        spec = KrausSpec(words=(self.example_word(creators, annihilators),), normalize=True)
        return self.correlated_initial_state(spec, model, bath, beta, trunc)

    @staticmethod
    def reference_change_kraus(sigma: np.ndarray, model: SystemModel, beta: float) -> OperatorWord:
        """K = sqrt(sigma) rho_S,beta^(-1/2), mapping rho_S,beta (x) omega_R to sigma (x) omega_R."""
        sigma = np.asarray(sigma, dtype=complex)
        gibbs = get_model_core().gibbs_state(model, beta)
        return OperatorWord(factors=(OperatorFactor.system(psd_power(sigma, 0.5) @ psd_power(gibbs, -0.5)),))

    # ---- configuration

    @staticmethod
    def _term(config: LinearTermConfig, functions: Dict[str, TestFunction]) -> LinearTerm:
        return LinearTerm(matrix=complex_matrix(config.matrix), kind=config.kind, function=functions[config.function])

    def word_from_config(self, config: WordConfig, functions: Dict[str, TestFunction]) -> OperatorWord:
        factors: List[OperatorFactor] = []
        for entry in config.factors:
            if entry.system is not None:
                factors.append(OperatorFactor.system(complex_matrix(entry.system)))
            elif entry.create is not None:
                factors.append(OperatorFactor.create(functions[entry.create]))
            elif entry.annihilate is not None:
                factors.append(OperatorFactor.annihilate(functions[entry.annihilate]))
            elif entry.weyl is not None:
                factors.append(OperatorFactor.weyl(functions[entry.weyl]))
            else:
                factors.append(OperatorFactor(kind="exp_linear",
                                              terms=tuple(self._term(term, functions) for term in entry.exp_linear)))
        return OperatorWord(factors=tuple(factors), scalar=complex(*config.scalar))

    def kraus_from_config(self, config: RunConfig, model: SystemModel, functions: Dict[str, TestFunction]
                          ) -> KrausSpec:
        kraus = config.kraus
        if kraus.kind == "identity":
            return KrausSpec(words=(OperatorWord(),), normalize=kraus.normalize)
        if kraus.kind == "product":
            word = self.reference_change_kraus(complex_matrix(kraus.sigma), model, config.model.beta)
            return KrausSpec(words=(word,), normalize=kraus.normalize)
        if kraus.kind == "example":
            word = OperatorWord(factors=(OperatorFactor(kind="exp_linear", terms=tuple(
                LinearTerm(matrix=-1j * complex_matrix(term.matrix), kind=term.kind,
                           function=functions[term.function]) for term in kraus.creators + kraus.annihilators)),))
            return KrausSpec(words=(word,), normalize=True)
        return KrausSpec(words=tuple(self.word_from_config(word, functions) for word in kraus.words),
                         normalize=kraus.normalize)

    def observables_from_config(self, config: RunConfig, functions: Dict[str, TestFunction]
                                ) -> Dict[str, OperatorWord]:
        return {name: self.word_from_config(word, functions) for name, word in config.observables.items()}


def get_state_core(logger: Optional[LoggerService] = None, bath_core: Optional[BathCore] = None) -> StateCore:
    return StateCore(logger, bath_core)
