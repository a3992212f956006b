from json import loads
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from AnalysisService import AnalysisCore, Assertion, ScenarioResult, get_analysis_core
from ConfigService import DomainError, LabError, MAX_DIM, RunConfig, ValidationError, atomic_write_text
from LoggerService import LoggerService
from templates import render_report


def analysis_core(config: RunConfig) -> AnalysisCore:
    return get_analysis_core(max_dim=config.bath.max_dim or MAX_DIM)


def simulate(config: RunConfig, core: AnalysisCore, lambdas: Optional[Sequence[float]] = None,
             fits: bool = False) -> List[ScenarioResult]:
    """One ScenarioResult per coupling constant."""
    results = []
    for lam in lambdas if lambdas is not None else config.model.lambdas:
        scenario = core.scenario_from_config(config, lam)
        results.append(core.run(scenario, gates=config.analysis.gates,
                                fit_observable=config.analysis.fit_observable if fits else None,
                                window_start=config.analysis.window_start))
    return results


def autocorrelation_fit(config: RunConfig, core: AnalysisCore) -> Tuple[Dict[str, Any], Assertion]:
    """Power-law exponent of |C(t)| for the continuum reservoir on [window_start, t_max]."""
    _, ff, beta, _ = core.model_core.load_model(config)
    window = (max(config.analysis.window_start, 1e-3), config.analysis.t_max)
    times = np.geomspace(window[0], window[1], max(config.analysis.n_times, 8))
    series = [(t, abs(core.thermal_core.reservoir_autocorrelation(ff, beta, t))) for t in times]
    try:
        exponent, r_squared = core.thermal_core.fit_power_law(series, window)
    except DomainError as e:
        return {"window": window, "reason": str(e)}, Assertion(name="autocorrelation_decay", passed=False,
                                                               detail=str(e))
    passed = exponent <= -2.5 and r_squared >= 0.9
    return ({"window": window, "exponent": exponent, "r_squared": r_squared},
            Assertion(name="autocorrelation_decay", passed=passed,
                      detail=f"exponent {exponent:.3f}, r^2 {r_squared:.3f}"))


def analyze(config: RunConfig, core: AnalysisCore, directory: Path) -> Tuple[List[Assertion], Dict[str, Any]]:
    """Every analysis operation on every lambda; writes CSVs, manifest.json and report.md."""
    logging = LoggerService().get_logger()
    results = simulate(config, core, fits=True)
    assertions = core.assess(results)
    extra: Dict[str, Any] = {"config": config.model_dump(mode="json")}

    smallest = min(config.model.lambdas, key=abs)
    scenario = core.scenario_from_config(config, smallest)
    extra["dominance"] = {name: core.dominance_profile(scenario, name).crossovers for name in scenario.observables}
    if scenario.observables and config.analysis.tau_list:
        name = next(iter(scenario.observables))
        try:
            rows = core.van_hove_check(scenario, name, config.analysis.tau_list,
                                       [lam for lam in config.model.lambdas if lam != 0])
            extra["van_hove"] = [{"tau": row.tau, "lambda": row.lam, "deviation": row.deviation} for row in rows]
        except ValidationError as e:
            logging.warning(f"van Hove check skipped: {e}")
            extra["van_hove"] = {"skipped": str(e)}

    fit, assertion = autocorrelation_fit(config, core)
    extra["autocorrelation_fit"] = fit
    assertions.append(assertion)
    target = core.write_outputs(results, assertions, directory, extra)
    manifest_text = target.read_text(encoding="utf-8")
    write_report(directory, manifest_text)
    return assertions, extra


def write_report(directory: Path, manifest_text: str) -> Path:
    return atomic_write_text(directory / "report.md", render_report(loads(manifest_text)))


def run_job(config_json: str, lam: float, directory: str) -> Dict[str, Any]:
    """Sweep worker: analysis of one (configuration, lambda) scenario into its own directory."""
    config = RunConfig.model_validate_json(config_json)
    core = analysis_core(config)
    try:
        results = simulate(config, core, lambdas=[lam], fits=True)
        assertions = core.assess(results)
        target = core.write_outputs(results, assertions, directory, {"config": config.model_dump(mode="json")})
    except LabError as e:
        LoggerService.log_exception(e, f"sweep scenario lambda={lam} failed")
        return {"lambda": lam, "directory": directory, "exit_code": e.exit_code, "message": str(e)}
    result = results[0]
    fit = result.fits[0].exponent if result.fits else None
    return {"lambda": lam, "directory": directory, "scenario_hash": result.scenario_hash,
            "exit_code": 0 if all(a.passed for a in assertions) else 1,
            "markov_error_sup": result.markov_error.supremum, "exponent": fit,
            "assertions": [a.model_dump() for a in assertions], "scenario": scenario_entry(target), "message": ""}


def scenario_entry(manifest_path: Path) -> Optional[Dict[str, Any]]:
    """The scenario record of a single-scenario manifest.json, if the file exists."""
    path = Path(manifest_path)
    if not path.exists():
        return None
    scenarios = loads(path.read_text(encoding="utf-8")).get("scenarios", [])
    return scenarios[0] if scenarios else None
