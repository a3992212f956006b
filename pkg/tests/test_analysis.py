import numpy as np
import pandas as pd
import pytest

from AnalysisService import (CSV_COLUMNS, DecompositionTrace, MarkovError, ScenarioResult, characteristic_frequency,
                             get_analysis_core)
from BathService import get_bath_core
from ConfigService import DomainError, ValidationError, load_config
from StateService import KrausSpec, OperatorFactor, OperatorWord, get_state_core
from conftest import CONFIGS, SIGMA_X, SIGMA_Z

SIGMA = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]])


@pytest.fixture
def lab():
    return get_analysis_core(max_dim=300)


@pytest.fixture
def observables(obs_function):
    return {"sz": OperatorWord(factors=(OperatorFactor.system(SIGMA_Z),)),
            "weyl": OperatorWord(factors=(OperatorFactor.weyl(obs_function),)),
            "sx_weyl": OperatorWord(factors=(OperatorFactor.system(SIGMA_X), OperatorFactor.weyl(obs_function)))}


@pytest.fixture
def product_kraus(two_level):
    return KrausSpec(words=(get_state_core().reference_change_kraus(SIGMA, two_level, 1.0),))


@pytest.fixture
def example_kraus(cor_function):
    return KrausSpec(words=(get_state_core().example_word([(0.5 * SIGMA_X, cor_function)], []),))


def scenario(lab, model, ff, bath, kraus, observables, lam, n_times=6):
    window = 0.5 * get_bath_core().recurrence_time(bath)
    trunc = get_bath_core().truncation(bath, 1.0, model.dim, cutoffs=[2] * bath.n_modes)
    return lab.scenario_for(model, ff, 1.0, lam, bath, trunc, kraus, observables,
                            np.linspace(0.0, 0.8 * window, n_times))


def test_characteristic_frequency(two_mode_bath):
    expected = (0.16 * 0.7 + 0.09 * 1.3) / 0.25
    assert characteristic_frequency(two_mode_bath) == pytest.approx(expected)


def test_scenario_window(lab, two_level, form_factor, small_bath, product_kraus, observables):
    window = 0.5 * get_bath_core().recurrence_time(small_bath)
    trunc = get_bath_core().truncation(small_bath, 1.0, 2, cutoffs=[2, 2, 2])
    with pytest.raises(ValidationError, match="recurrence"):
        lab.scenario_for(two_level, form_factor, 1.0, 0.1, small_bath, trunc, product_kraus, observables,
                         [0.0, 1.1 * window])
    with pytest.raises(ValidationError, match="sorted"):
        lab.scenario_for(two_level, form_factor, 1.0, 0.1, small_bath, trunc, product_kraus, observables,
                         [0.5, 0.0])


def test_scenario_rejects_cor_observables(lab, two_level, form_factor, small_bath, product_kraus, cor_function):
    with pytest.raises(ValidationError, match="class obs"):
        scenario(lab, two_level, form_factor, small_bath, product_kraus,
                 {"bad": OperatorWord(factors=(OperatorFactor.weyl(cor_function),))}, 0.1)


def test_scenario_from_config_clips_grid(lab):
    config = load_config(CONFIGS / "two_level.toml")
    built = lab.scenario_from_config(config, 0.1)
    assert built.t_grid[-1] <= 0.5 * built.recurrence_time * (1 + 1e-12)
    assert len(built.t_grid) == config.analysis.n_times
    assert built.labels["requested_t_max"] == 20.0
    assert set(built.observables) == {"sz", "weyl"}
    assert built.trunc.cutoffs == (2, 2, 2)


def test_fingerprint_depends_on_coupling(lab, two_level, form_factor, small_bath, product_kraus, observables):
    first = scenario(lab, two_level, form_factor, small_bath, product_kraus, observables, 0.1)
    same = scenario(lab, two_level, form_factor, small_bath, product_kraus, observables, 0.1)
    other = scenario(lab, two_level, form_factor, small_bath, product_kraus, observables, 0.2)
    assert first.fingerprint() == same.fingerprint()
    assert first.fingerprint() != other.fingerprint()
    assert len(first.fingerprint()) == 16


def test_uncoupled_product_state_is_markovian(lab, two_level, form_factor, small_bath, product_kraus, observables):
    free = scenario(lab, two_level, form_factor, small_bath, product_kraus, observables, 0.0)
    assert lab.markov_error(free).supremum <= 1e-9
    assert np.max(lab.born_distance(free)) <= 1e-9
    for name in observables:
        trace = lab.correlation_term(free, name)
        assert np.max(np.abs(trace.chi_hat)) <= 1e-9
        assert np.max(np.abs(trace.free_corr)) <= 1e-12


def test_markov_error_vanishes_initially(lab, two_level, form_factor, small_bath, example_kraus, observables):
    coupled = scenario(lab, two_level, form_factor, small_bath, example_kraus, observables, 0.2)
    error = lab.markov_error(coupled)
    assert error.distance[0] <= 1e-12
    assert error.supremum > 0


def test_correlation_term_starts_at_free_correlation(lab, two_level, form_factor, small_bath, example_kraus,
                                                     observables):
    coupled = scenario(lab, two_level, form_factor, small_bath, example_kraus, observables, 0.2)
    for name in ("weyl", "sx_weyl"):
        trace = lab.correlation_term(coupled, name)
        assert trace.identity_defect() <= 1e-12
        assert trace.chi_hat[0] == pytest.approx(trace.free_corr[0], abs=1e-12)
    assert abs(lab.correlation_term(coupled, "sx_weyl").free_corr[0]) > 1e-6
    assert lab.born_distance(coupled)[0] > 1e-6


def test_vanishing_correlation_flag(lab, two_level, form_factor, small_bath, example_kraus, product_kraus,
                                    observables):
    assert product_kraus.product and not example_kraus.product
    correlated = scenario(lab, two_level, form_factor, small_bath, example_kraus, observables, 0.2, n_times=3)
    assert lab.correlation_term(correlated, "sz").metadata["vanishing_correlation"]
    assert not lab.correlation_term(correlated, "weyl").metadata["vanishing_correlation"]
    product = scenario(lab, two_level, form_factor, small_bath, product_kraus, observables, 0.2, n_times=3)
    assert lab.correlation_term(product, "weyl").metadata["vanishing_correlation"]


def test_unknown_observable(lab, two_level, form_factor, small_bath, product_kraus, observables):
    built = scenario(lab, two_level, form_factor, small_bath, product_kraus, observables, 0.1)
    with pytest.raises(DomainError, match="unknown observable"):
        lab.correlation_term(built, "missing")


def test_van_hove_check(lab, two_level, form_factor, small_bath, product_kraus, observables):
    built = scenario(lab, two_level, form_factor, small_bath, product_kraus, observables, 0.2)
    rows = lab.van_hove_check(built, "sz", [0.0, 0.01], [0.2, 0.1])
    assert [(row.tau, row.lam) for row in rows] == [(0.0, 0.2), (0.01, 0.2), (0.0, 0.1), (0.01, 0.1)]
    assert rows[1].t == pytest.approx(0.25)
    assert rows[0].deviation <= 1e-12
    with pytest.raises(ValidationError, match="recurrence window"):
        lab.van_hove_check(built, "sz", [10.0], [0.1])
    with pytest.raises(DomainError):
        lab.van_hove_check(built, "sz", [0.0], [0.0])


def test_gates(two_level, form_factor, small_bath, example_kraus, observables):
    lab = get_analysis_core(max_dim=200)
    built = scenario(lab, two_level, form_factor, small_bath, example_kraus, observables, 0.1, n_times=3)
    truncation = lab.truncation_gate(built)
    assert not truncation.skipped
    assert truncation.max_distance >= 0.0
    convergence = lab.convergence_gate(built)
    assert convergence.name == "convergence"
    assert convergence.skipped or convergence.max_distance >= 0.0

    tight = get_analysis_core(max_dim=100)
    skipped = tight.truncation_gate(scenario(tight, two_level, form_factor, small_bath, example_kraus,
                                             observables, 0.1, n_times=3))
    assert skipped.skipped and skipped.passed is None and "128" in skipped.reason


def test_decay_fit(lab):
    t = np.geomspace(1.0, 100.0, 30)
    trace = DecompositionTrace(observable="x", t=t, exact=t ** -3 + 0j, markov=np.zeros_like(t, dtype=complex),
                               free_corr=np.zeros_like(t, dtype=complex))
    fit = lab.decay_fit(trace, (1.0, 100.0))
    assert fit.exponent == pytest.approx(-3.0)
    assert fit.r_squared == pytest.approx(1.0)
    empty = lab.decay_fit(trace, (200.0, 300.0))
    assert empty.exponent is None and "samples" in empty.reason


def _result(lam, distance, traces=None):
    t = np.linspace(0.0, 1.0, len(distance))
    return ScenarioResult(scenario_hash=f"{lam:g}", lam=lam, traces=traces or {},
                          markov_error=MarkovError(t=t, distance=np.asarray(distance)))


def test_assess_markov_error_scaling(lab):
    shrinking = lab.assess([_result(0.2, [0.0, 0.4, 0.1]), _result(0.1, [0.0, 0.1, 0.02])])
    by_name = {assertion.name: assertion for assertion in shrinking}
    assert by_name["markov_error_monotone"].passed
    assert by_name["markov_argmax_interior[0.2]"].passed
    assert by_name["decomposition_identity"].passed
    growing = lab.assess([_result(0.2, [0.0, 0.1, 0.1]), _result(0.1, [0.0, 0.1, 0.3])])
    by_name = {assertion.name: assertion for assertion in growing}
    assert not by_name["markov_error_monotone"].passed
    assert not by_name["markov_argmax_interior[0.1]"].passed


def _trace(name, chi_max, gap, vanishing):
    t = np.linspace(0.0, 1.0, 3)
    chi = np.array([0.0, chi_max, 0.5 * chi_max], dtype=complex)
    return DecompositionTrace(observable=name, t=t, exact=chi, markov=np.zeros(3, dtype=complex),
                              free_corr=chi - np.array([0.0, gap, 0.0]),
                              metadata={"vanishing_correlation": vanishing})


def _scaling_results(chi_maxima, gaps, lams=(0.2, 0.1, 0.05)):
    return [_result(lam, [0.0, 0.4 * lam, 0.1 * lam],
                    traces={"sz": _trace("sz", chi, gap, True), "weyl": _trace("weyl", 1.0, gap, False)})
            for lam, chi, gap in zip(lams, chi_maxima, gaps)]


def test_assess_correlation_scaling(lab):
    shrinking = {a.name: a for a in lab.assess(_scaling_results([0.4, 0.2, 0.1], [0.3, 0.15, 0.07]))}
    assert shrinking["chi_hat_scaling[sz]"].passed
    assert shrinking["free_correlation_gap[sz]"].passed
    assert shrinking["free_correlation_gap[weyl]"].passed
    assert "chi_hat_scaling[weyl]" not in shrinking

    stalled = {a.name: a for a in lab.assess(_scaling_results([0.3, 0.3, 0.5], [0.3, 0.3, 0.4]))}
    assert stalled["markov_error_monotone"].passed
    assert not stalled["chi_hat_scaling[sz]"].passed
    assert not stalled["free_correlation_gap[sz]"].passed

    slow = {a.name: a for a in lab.assess(_scaling_results([0.4, 0.3, 0.2], [0.3, 0.15, 0.07]))}
    assert not slow["chi_hat_scaling[sz]"].passed


def test_chi_hat_scaling_follows_the_lambda_ratio(lab):
    quartered = {a.name: a for a in lab.assess(_scaling_results([0.4, 0.2], [0.3, 0.1], lams=(0.2, 0.05)))}
    assert not quartered["chi_hat_scaling[sz]"].passed
    shuffled = {a.name: a for a in lab.assess(_scaling_results([0.1, 0.4, 0.2], [0.07, 0.3, 0.15],
                                                               lams=(0.05, 0.2, 0.1)))}
    assert shuffled["chi_hat_scaling[sz]"].passed


def test_time_uniformity(lab):
    interior = lab.time_uniformity(_result(0.05, [0.0, 0.2, 0.3, 0.2, 0.15, 0.1, 0.1, 0.05, 0.05]))
    assert interior.name == "markov_argmax_uniform[0.05]" and interior.passed
    drifting = lab.time_uniformity(_result(0.05, [0.0, 0.1, 0.2, 0.3, 0.4, 0.35, 0.3, 0.2, 0.1]))
    assert not drifting.passed
    assert lab.time_uniformity(_result(0.05, [0.0, 0.1])) is None
    names = [a.name for a in lab.assess([_result(0.2, [0.0, 0.4, 0.1]), _result(0.1, [0.0, 0.1, 0.02])])]
    assert "markov_argmax_uniform[0.1]" in names and "markov_argmax_uniform[0.2]" not in names


def test_run_and_outputs_are_reproducible(tmp_path, two_level, form_factor, small_bath, example_kraus,
                                          observables):
    texts = []
    for attempt in ("first", "second"):
        lab = get_analysis_core(max_dim=300)
        built = scenario(lab, two_level, form_factor, small_bath, example_kraus, observables, 0.1)
        result = lab.run(built, gates=False, fit_observable="weyl")
        assert result.born_distance is not None
        assert len(result.fits) == 1
        lab.write_outputs([result], lab.assess([result]), tmp_path / attempt)
        csv = tmp_path / attempt / f"trajectory_{result.scenario_hash}.csv"
        texts.append((csv.read_bytes(), (tmp_path / attempt / "manifest.json").read_bytes()))
        frame = pd.read_csv(csv)
        assert list(frame.columns) == CSV_COLUMNS
        assert len(frame) == 3 * len(built.t_grid)
    assert texts[0] == texts[1]
