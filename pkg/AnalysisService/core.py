from json import dumps
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy
from pydantic import ValidationError as PydanticValidationError
from scipy.linalg import expm

from ConfigService import (DomainError, MAX_DIM, ResourceError, RunConfig, ValidationError, atomic_write_text)
from LoggerService import LoggerService, LoggedService
from BathService import BathCore, CompositeState, DiscretizedBath, FockTruncation, get_bath_core, trace_distance
from DaviesService import DaviesCore, DaviesGenerator, get_davies_core
from ModelService import FormFactor, ModelCore, SystemModel, get_model_core
from StateService import KrausSpec, OperatorWord, StateCore, get_state_core
from ThermalService import ThermalCore, get_thermal_core
from .models import (Assertion, DecompositionTrace, DominanceProfile, GateReport, MarkovError, PowerLawFit,
                     Scenario, ScenarioResult, Trajectory, VanHoveRow)

DENSE_SVD_LIMIT = 4096
CONVERGENCE_THRESHOLD = 1e-3
TRUNCATION_THRESHOLD = 1e-4
IDENTITY_TOLERANCE = 1e-12
DECAY_EXPONENT = -2.5
DECAY_R_SQUARED = 0.9
CHI_SCALING_FACTOR = 1.5
UNIFORMITY_FRACTION = 0.5
CSV_COLUMNS = ["t", "observable", "exact_re", "exact_im", "markov_re", "markov_im", "chi_hat_re", "chi_hat_im",
               "free_corr_re", "free_corr_im", "born_distance", "markov_error"]


def library_versions() -> Dict[str, str]:
    return {"numpy": np.__version__, "scipy": scipy.__version__, "pandas": pd.__version__}


def characteristic_frequency(bath: DiscretizedBath) -> float:
    """Mean mode frequency weighted by |g_k|^2."""
    weights = np.abs(bath.couplings) ** 2
    if not np.any(weights > 0):
        return float(np.mean(bath.frequencies))
    return float(np.sum(weights * bath.frequencies) / np.sum(weights))


class AnalysisCore(LoggedService):
    """Exact versus Markovian dynamics of a scenario: Markov error, correlation term, Born distance and fits."""

    def __init__(self, logger: Optional[LoggerService] = None, max_dim: int = MAX_DIM):
        super().__init__(logger)
        self.max_dim = max_dim
        self.model_core: ModelCore = get_model_core(logger)
        self.thermal_core: ThermalCore = get_thermal_core(logger)
        self.davies_core: DaviesCore = get_davies_core(logger)
        self.bath_core: BathCore = get_bath_core(logger, max_dim)
        self.state_core: StateCore = get_state_core(logger, self.bath_core)
        self._trajectories: Dict[str, Trajectory] = {}
        self._generators: Dict[Tuple[str, str, float, float], DaviesGenerator] = {}

    # ---- scenarios

    def build_scenario(self, model: SystemModel, ff: FormFactor, beta: float, lam: float, kraus: KrausSpec,
                       observables: Dict[str, OperatorWord], t_grid: Sequence[float], n_modes: int,
                       omega_max: float, scheme: str = "gauss_spectral", cutoffs: Optional[Sequence[int]] = None,
                       max_dim: Optional[int] = None, labels: Optional[Dict[str, Any]] = None,
                       degeneracy_tolerance: float = 1e-9, simplicity_tolerance: float = 1e-9) -> Scenario:
        bath = self.bath_core.discretize(ff, n_modes, omega_max, scheme)
        trunc = self.bath_core.truncation(bath, beta, model.dim, cutoffs, max_dim)
        return self.scenario_for(model, ff, beta, lam, bath, trunc, kraus, observables, t_grid, labels=labels,
                                 max_dim=max_dim, degeneracy_tolerance=degeneracy_tolerance,
                                 simplicity_tolerance=simplicity_tolerance)

    def scenario_for(self, model: SystemModel, ff: FormFactor, beta: float, lam: float, bath: DiscretizedBath,
                     trunc: FockTruncation, kraus: KrausSpec, observables: Dict[str, OperatorWord],
                     t_grid: Sequence[float], **extra) -> Scenario:
        extra = {key: value for key, value in extra.items() if value is not None}
        try:
            return Scenario(model=model, ff=ff, beta=beta, lam=lam, bath=bath, trunc=trunc, kraus=kraus,
                            observables=observables, t_grid=t_grid,
                            recurrence_time=self.bath_core.recurrence_time(bath), **extra)
        except PydanticValidationError as e:
            raise ValidationError(f"invalid scenario: {e.errors()[0]['msg']}") from e

    def scenario_from_config(self, config: RunConfig, lam: float) -> Scenario:
        """Scenario for one coupling constant of a run configuration; the grid is clipped to T_rec / 2."""
        model, ff, beta, _ = self.model_core.load_model(config)
        functions = self.model_core.load_functions(config)
        kraus = self.state_core.kraus_from_config(config, model, functions)
        observables = self.state_core.observables_from_config(config, functions)
        if config.analysis.observables:
            observables = {name: observables[name] for name in config.analysis.observables}
        bath = self.bath_core.discretize(ff, config.bath.n_modes, config.bath.omega_max, config.bath.scheme)
        trunc = self.bath_core.truncation(bath, beta, model.dim, config.bath.cutoffs, config.bath.max_dim)
        window = 0.5 * self.bath_core.recurrence_time(bath)
        t_max = config.analysis.t_max
        if t_max > window:
            self.logging.warning(f"t_max={t_max} exceeds half the recurrence time; clipped to {window:.6g}")
            t_max = window
        return self.scenario_for(model, ff, beta, lam, bath, trunc, kraus, observables,
                                 np.linspace(0.0, t_max, config.analysis.n_times),
                                 labels={"requested_t_max": config.analysis.t_max},
                                 max_dim=config.bath.max_dim,
                                 degeneracy_tolerance=config.model.degeneracy_tolerance,
                                 simplicity_tolerance=config.model.simplicity_tolerance)

    # ---- trajectories

    def generator(self, scenario: Scenario) -> DaviesGenerator:
        key = (scenario.model.model_hash(), scenario.ff.fingerprint(), scenario.beta, scenario.lam)
        if key not in self._generators:
            self._generators[key] = self.davies_core.build(scenario.model, scenario.ff, scenario.beta,
                                                           scenario.lam, scenario.degeneracy_tolerance)
        return self._generators[key]

    def _exact(self, scenario: Scenario, bath: DiscretizedBath, trunc: FockTruncation, t_grid: np.ndarray
               ) -> Tuple[CompositeState, CompositeState, List[CompositeState]]:
        if trunc.dimension > (scenario.max_dim or self.max_dim):
            raise ResourceError("composite space too large", dimension=trunc.dimension,
                                limit=scenario.max_dim or self.max_dim)
        initial = self.state_core.correlated_initial_state(scenario.kraus, scenario.model, bath, scenario.beta, trunc)
        reservoir = self.bath_core.bath_thermal_state(bath, scenario.beta, trunc)
        hamiltonian = self.bath_core.hamiltonian(scenario.model, bath, scenario.lam, trunc)
        return initial, reservoir, self.bath_core.evolve(hamiltonian, initial, t_grid)

    def trajectory(self, scenario: Scenario) -> Trajectory:
        key = scenario.fingerprint()
        if key in self._trajectories:
            return self._trajectories[key]
        with self.timed(f"trajectory {key} (lambda={scenario.lam}, dimension {scenario.trunc.dimension})"):
            initial, reservoir, states = self._exact(scenario, scenario.bath, scenario.trunc, scenario.t_grid)
            generator = self.generator(scenario)
            system_initial = self.bath_core.partial_trace_system(initial)
            system_markov = [self.davies_core.semigroup_apply(generator, t, system_initial) for t in scenario.t_grid]
        trajectory = Trajectory(initial=initial, reservoir=reservoir, states=states, system_initial=system_initial,
                                system_exact=[self.bath_core.partial_trace_system(state) for state in states],
                                system_markov=system_markov, generator=generator)
        self._trajectories[key] = trajectory
        return trajectory

    def _product_values(self, scenario: Scenario, systems: Sequence[np.ndarray], reservoir: CompositeState,
                        word: OperatorWord) -> np.ndarray:
        """(sigma (x) omega_R)(O) for each sigma."""
        if word.separable:
            system, bath_part = self.state_core.split_word(word, scenario.bath, scenario.trunc)
            reservoir_value = complex(np.sum(reservoir.rho * bath_part.T))
            return np.array([complex(np.sum(sigma * system.T)) * reservoir_value for sigma in systems])
        matrix = self.state_core.compile_word(word, scenario.bath, scenario.trunc)
        return np.array([complex(np.sum(np.kron(sigma, reservoir.rho) * matrix.T)) for sigma in systems])

    def _observable(self, scenario: Scenario, name: str) -> OperatorWord:
        if name not in scenario.observables:
            raise DomainError(f"unknown observable '{name}'")
        return scenario.observables[name]

    # ---- decomposition

    def markov_error(self, scenario: Scenario) -> MarkovError:
        """1/2 || rho_S^t - e^{tL} rho_S ||_1 on the grid."""
        trajectory = self.trajectory(scenario)
        distance = np.array([trace_distance(exact, markov) for exact, markov
                             in zip(trajectory.system_exact, trajectory.system_markov)])
        error = MarkovError(t=scenario.t_grid, distance=distance)
        self.logging.info(f"Markov error (lambda={scenario.lam}): sup {error.supremum:.3e} at t={error.argmax_time}")
        return error

    def free_correlation(self, scenario: Scenario, name: str) -> np.ndarray:
        """(rho_SR - rho_S (x) omega_R)(e^{itH_0} O e^{-itH_0}); H_0 is diagonal in the product Fock basis."""
        word = self._observable(scenario, name)
        trajectory = self.trajectory(scenario)
        matrix = self.state_core.compile_word(word, scenario.bath, scenario.trunc, required_class="obs")
        difference = trajectory.initial.rho - np.kron(trajectory.system_initial, trajectory.reservoir.rho)
        free = np.add.outer(scenario.model.energies,
                            self.bath_core.free_bath_energies(scenario.bath, scenario.trunc)).reshape(-1)
        gaps = np.subtract.outer(free, free)
        weighted = difference * matrix.T
        return np.array([complex(np.sum(weighted * np.exp(-1j * t * gaps))) for t in scenario.t_grid])

    def correlation_term(self, scenario: Scenario, name: str) -> DecompositionTrace:
        """exact, Markov and chi_hat = exact - Markov values of one observable."""
        word = self._observable(scenario, name)
        trajectory = self.trajectory(scenario)
        matrix = self.state_core.compile_word(word, scenario.bath, scenario.trunc, required_class="obs")
        exact = np.array([complex(np.sum(state.rho * matrix.T)) for state in trajectory.states])
        markov = self._product_values(scenario, trajectory.system_markov, trajectory.reservoir, word)
        trace = DecompositionTrace(observable=name, t=scenario.t_grid, exact=exact, markov=markov,
                                   free_corr=self.free_correlation(scenario, name),
                                   metadata={"lambda": scenario.lam,
                                             "vanishing_correlation": word.system_only or scenario.kraus.product,
                                             **scenario.provenance()})
        self.logging.info(f"Correlation term '{name}' (lambda={scenario.lam}): "
                          f"max |chi_hat| {float(np.max(np.abs(trace.chi_hat))):.3e}")
        return trace

    def born_distance(self, scenario: Scenario) -> np.ndarray:
        """1/2 || rho_SR^t - rho_S^t (x) omega_R ||_1 on the composite space."""
        if scenario.trunc.dimension > DENSE_SVD_LIMIT:
            raise ResourceError("composite space too large for dense trace norms",
                                dimension=scenario.trunc.dimension, limit=DENSE_SVD_LIMIT)
        trajectory = self.trajectory(scenario)
        return np.array([trace_distance(state.rho, np.kron(system, trajectory.reservoir.rho))
                         for state, system in zip(trajectory.states, trajectory.system_exact)])

    def van_hove_check(self, scenario: Scenario, name: str, tau_list: Sequence[float],
                       lambda_list: Sequence[float]) -> List[VanHoveRow]:
        """Interaction-picture expectation at t = tau / lambda^2 against (e^{tau K} rho_S (x) omega_R)(O)."""
        word = self._observable(scenario, name)
        taus = np.sort(np.asarray(tau_list, dtype=float))
        window = 0.5 * scenario.recurrence_time
        for lam in lambda_list:
            if lam == 0:
                raise DomainError("van Hove check needs nonzero coupling constants")
            if taus[-1] / lam ** 2 > window:
                raise ValidationError(f"tau={taus[-1]} at lambda={lam} reaches t={taus[-1] / lam ** 2:.6g}, "
                                      f"beyond the recurrence window {window:.6g}")
        matrix = self.state_core.compile_word(word, scenario.bath, scenario.trunc, required_class="obs")
        bath_identity = np.eye(scenario.trunc.bath_dim)
        rows = []
        for lam in lambda_list:
            shifted = scenario.model_copy(update={"lam": float(lam), "t_grid": taus / lam ** 2})
            trajectory = self.trajectory(shifted)
            weak = trajectory.generator.weak_coupling
            for tau, t, state in zip(taus, shifted.t_grid, trajectory.states):
                rotation = np.kron(self.model_core.free_propagator(scenario.model, t), bath_identity)
                interaction = complex(np.sum(state.rho * (rotation @ matrix @ rotation.conj().T).T))
                sigma = (expm(tau * weak) @ trajectory.system_initial.reshape(-1)).reshape(scenario.model.dim, -1)
                reference = complex(np.sum(np.kron(sigma, trajectory.reservoir.rho) * matrix.T))
                rows.append(VanHoveRow(tau=float(tau), lam=float(lam), t=float(t), interaction=interaction,
                                       weak_coupling=reference))
        return rows

    # ---- gates

    def _gate(self, name: str, threshold: float, scenario: Scenario, bath: Optional[DiscretizedBath],
              trunc: Optional[FockTruncation], reason: str = "") -> GateReport:
        if trunc is None:
            self.logging.warning(f"{name} gate skipped: {reason}")
            return GateReport(name=name, threshold=threshold, skipped=True, reason=reason)
        reference = self.trajectory(scenario).system_exact
        _, _, states = self._exact(scenario, bath, trunc, scenario.t_grid)
        distance = max(trace_distance(self.bath_core.partial_trace_system(state), system)
                       for state, system in zip(states, reference))
        report = GateReport(name=name, max_distance=distance, threshold=threshold, passed=distance <= threshold)
        self.logging.info(f"{name} gate: max distance {distance:.3e}, passed={report.passed}")
        return report

    def convergence_gate(self, scenario: Scenario) -> GateReport:
        """System marginals with twice as many modes agree to CONVERGENCE_THRESHOLD."""
        bath = self.bath_core.discretize(scenario.ff, 2 * scenario.bath.n_modes, scenario.bath.omega_max,
                                         scenario.bath.scheme)
        try:
            trunc = self.bath_core.truncation(bath, scenario.beta, scenario.model.dim,
                                              max_dim=scenario.max_dim or self.max_dim)
        except ResourceError as e:
            return self._gate("convergence", CONVERGENCE_THRESHOLD, scenario, None, None, str(e))
        return self._gate("convergence", CONVERGENCE_THRESHOLD, scenario, bath, trunc)

    def truncation_gate(self, scenario: Scenario) -> GateReport:
        """System marginals with every Fock cutoff raised by one agree to TRUNCATION_THRESHOLD."""
        trunc = scenario.trunc.raised(1)
        limit = scenario.max_dim or self.max_dim
        if trunc.dimension > limit:
            return self._gate("truncation", TRUNCATION_THRESHOLD, scenario, None, None,
                              f"raised dimension {trunc.dimension} exceeds {limit}")
        return self._gate("truncation", TRUNCATION_THRESHOLD, scenario, scenario.bath, trunc)

    # ---- profiles and fits

    def dominance_profile(self, scenario: Scenario, name: str) -> DominanceProfile:
        """|chi_hat| against the Markovian distance from equilibrium |((e^{tL} rho_S - rho_beta) (x) omega_R)(O)|."""
        trace = self.correlation_term(scenario, name)
        trajectory = self.trajectory(scenario)
        gibbs = self.model_core.gibbs_state(scenario.model, scenario.beta)
        deviation = np.abs(self._product_values(scenario, [sigma - gibbs for sigma in trajectory.system_markov],
                                                trajectory.reservoir, scenario.observables[name]))
        correlation = np.abs(trace.chi_hat)
        sign = np.sign(correlation - deviation)
        crossovers = [float(0.5 * (scenario.t_grid[i] + scenario.t_grid[i + 1]))
                      for i in range(len(sign) - 1) if sign[i] * sign[i + 1] < 0]
        return DominanceProfile(t=scenario.t_grid, correlation=correlation, markov_deviation=deviation,
                                crossovers=crossovers)

    def fit_window(self, scenario: Scenario, start: float = 5.0) -> Tuple[float, float]:
        return max(start, 5.0 / characteristic_frequency(scenario.bath)), 0.5 * scenario.recurrence_time

    def decay_fit(self, trace: DecompositionTrace, window: Tuple[float, float]) -> PowerLawFit:
        series = list(zip(trace.t, np.abs(trace.chi_hat)))
        try:
            exponent, r_squared = self.thermal_core.fit_power_law(series, window)
        except DomainError as e:
            self.logging.warning(f"decay fit of '{trace.observable}' not possible: {e}")
            return PowerLawFit(observable=trace.observable, window=window, reason=str(e))
        self.logging.info(f"decay fit of '{trace.observable}': exponent {exponent:.3f}, r^2 {r_squared:.3f}")
        return PowerLawFit(observable=trace.observable, window=window, exponent=exponent, r_squared=r_squared)

    # ---- runs

    def run(self, scenario: Scenario, gates: bool = True, fit_observable: Optional[str] = None,
            window_start: float = 5.0) -> ScenarioResult:
        traces = {name: self.correlation_term(scenario, name) for name in scenario.observables}
        try:
            born = self.born_distance(scenario)
        except ResourceError as e:
            self.logging.warning(f"Born distance skipped: {e}")
            born = None
        reports = [self.convergence_gate(scenario), self.truncation_gate(scenario)] if gates else []
        fits = []
        if fit_observable is not None:
            fits.append(self.decay_fit(traces[fit_observable], self.fit_window(scenario, window_start)))
        return ScenarioResult(scenario_hash=scenario.fingerprint(), lam=scenario.lam, traces=traces,
                              markov_error=self.markov_error(scenario), born_distance=born, gates=reports,
                              fits=fits, provenance=scenario.provenance())

    @staticmethod
    def time_uniformity(result: ScenarioResult, fraction: float = UNIFORMITY_FRACTION) -> Optional[Assertion]:
        """The Markov-error argmax stays off the window edge when the window grows from fraction * t_max to t_max."""
        error = result.markov_error
        if error.t.size < 3:
            return None
        windows = [error.restricted(fraction * error.t[-1]), error]
        windows = [window for window in windows if window.t.size > 2 and window.supremum > 0]
        if not windows:
            return None
        detail = "; ".join(f"window {window.t[-1]:.6g}: argmax t={window.argmax_time:.6g}" for window in windows)
        return Assertion(name=f"markov_argmax_uniform[{result.lam:g}]",
                         passed=not any(window.argmax_at_edge for window in windows), detail=detail)

    @staticmethod
    def correlation_scaling(ordered: Sequence[ScenarioResult]) -> List[Assertion]:
        """lambda scaling of max|chi_hat| and of max|chi_hat - free_corr|, results ordered by decreasing |lambda|.

        max|chi_hat| must shrink by CHI_SCALING_FACTOR per halving of lambda wherever the correlation part vanishes
        (system observable or product initial state); max|chi_hat - free_corr| must decrease for every observable.
        """
        coupled = [result for result in ordered if result.lam != 0]
        if len(coupled) < 2:
            return []
        assertions = []
        lams = [abs(result.lam) for result in coupled]
        for name in coupled[0].traces:
            traces = [result.traces[name] for result in coupled if name in result.traces]
            if len(traces) != len(coupled):
                continue
            if all(trace.metadata.get("vanishing_correlation", False) for trace in traces):
                maxima = [float(np.max(np.abs(trace.chi_hat))) for trace in traces]
                required = [CHI_SCALING_FACTOR ** np.log2(a / b) for a, b in zip(lams, lams[1:])]
                passed = all(large >= factor * small
                             for large, small, factor in zip(maxima, maxima[1:], required))
                assertions.append(Assertion(name=f"chi_hat_scaling[{name}]", passed=passed,
                                            detail=", ".join(f"{lam:g}: {m:.3e}" for lam, m in zip(lams, maxima))))
            gaps = [float(np.max(np.abs(trace.chi_hat - trace.free_corr))) for trace in traces]
            assertions.append(Assertion(name=f"free_correlation_gap[{name}]",
                                        passed=all(a > b for a, b in zip(gaps, gaps[1:])),
                                        detail=", ".join(f"{lam:g}: {g:.3e}" for lam, g in zip(lams, gaps))))
        return assertions

    @staticmethod
    def assess(results: Sequence[ScenarioResult]) -> List[Assertion]:
        """Pass/fail assertions over the results of one configuration across its lambda list."""
        assertions = []
        defect = max((trace.identity_defect() for result in results for trace in result.traces.values()),
                     default=0.0)
        assertions.append(Assertion(name="decomposition_identity", passed=defect <= IDENTITY_TOLERANCE,
                                    detail=f"max defect {defect:.2e}"))
        ordered = sorted(results, key=lambda result: abs(result.lam), reverse=True)
        if len(ordered) > 1:
            suprema = [result.markov_error.supremum for result in ordered]
            assertions.append(Assertion(name="markov_error_monotone",
                                        passed=all(a > b for a, b in zip(suprema, suprema[1:])),
                                        detail=", ".join(f"{r.lam:g}: {s:.3e}" for r, s in zip(ordered, suprema))))
        for result in ordered:
            error = result.markov_error
            if error.t.size > 2 and error.supremum > 0:
                assertions.append(Assertion(name=f"markov_argmax_interior[{result.lam:g}]",
                                            passed=error.argmax_time < error.t[-1],
                                            detail=f"argmax t={error.argmax_time:.6g} of {error.t[-1]:.6g}"))
        if ordered:
            assertion = AnalysisCore.time_uniformity(ordered[-1])
            if assertion is not None:
                assertions.append(assertion)
        assertions.extend(AnalysisCore.correlation_scaling(ordered))
        if ordered:
            for fit in ordered[-1].fits:
                passed = (fit.exponent is not None and fit.exponent <= DECAY_EXPONENT
                          and fit.r_squared >= DECAY_R_SQUARED)
                detail = fit.reason or f"exponent {fit.exponent:.3f}, r^2 {fit.r_squared:.3f}"
                assertions.append(Assertion(name=f"decay_exponent[{fit.observable}]", passed=passed, detail=detail))
        for result in results:
            for gate in result.gates:
                if not gate.skipped:
                    assertions.append(Assertion(name=f"{gate.name}_gate[{result.lam:g}]", passed=bool(gate.passed),
                                                detail=f"max distance {gate.max_distance:.2e}"))
        return assertions

    # ---- outputs

    @staticmethod
    def frame(result: ScenarioResult) -> pd.DataFrame:
        rows = []
        born = result.born_distance
        for name, trace in result.traces.items():
            for i, t in enumerate(trace.t):
                chi = trace.chi_hat[i]
                rows.append([t, name, trace.exact[i].real, trace.exact[i].imag, trace.markov[i].real,
                             trace.markov[i].imag, chi.real, chi.imag, trace.free_corr[i].real,
                             trace.free_corr[i].imag, np.nan if born is None else born[i],
                             result.markov_error.distance[i]])
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def write_outputs(self, results: Sequence[ScenarioResult], assertions: Sequence[Assertion],
                      directory: Union[str, Path], extra: Optional[Dict[str, Any]] = None) -> Path:
        """One CSV per scenario plus manifest.json, each written atomically."""
        directory = Path(directory)
        scenarios = []
        for result in results:
            name = f"trajectory_{result.scenario_hash}.csv"
            text = self.frame(result).to_csv(index=False, float_format="%.17g", lineterminator="\n")
            atomic_write_text(directory / name, text)
            scenarios.append({"scenario_hash": result.scenario_hash, "lambda": result.lam, "csv": name,
                              "markov_error_sup": result.markov_error.supremum,
                              "markov_error_argmax": result.markov_error.argmax_time,
                              "gates": [gate.model_dump() for gate in result.gates],
                              "fits": [fit.model_dump() for fit in result.fits],
                              "provenance": result.provenance})
        manifest = {"scenarios": scenarios, "assertions": [assertion.model_dump() for assertion in assertions],
                    "passed": all(assertion.passed for assertion in assertions),
                    "versions": library_versions(),
                    **(extra or {})}
        target = atomic_write_text(directory / "manifest.json", dumps(manifest, indent=2, default=str))
        self.logging.info(f"Outputs written to {directory} ({len(scenarios)} scenarios)")
        return target


def get_analysis_core(logger: Optional[LoggerService] = None, max_dim: int = MAX_DIM) -> AnalysisCore:
    return AnalysisCore(logger, max_dim)
