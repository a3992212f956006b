from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm

from BathService import DiscretizedBath, FockTruncation, get_bath_core
from ConfigService import ComplexityError, DomainError
from ModelService import RadialProfile, TestFunction
from ThermalService import (ContinuumMeasure, PolynomialWord, bose_occupation, coth_half, get_thermal_core,
                            integrate)

BETA = 1.3


def _random_function(rng) -> TestFunction:
    return TestFunction(function_class="obs", p=0.5, q=4.0, amplitude_re=rng.uniform(-0.6, 0.6),
                        amplitude_im=rng.uniform(-0.6, 0.6),
                        profile=RadialProfile(family="gaussian", width=rng.uniform(0.7, 1.5)))


def _brute_force(word: PolynomialWord, bath: DiscretizedBath, trunc: FockTruncation) -> complex:
    core = get_bath_core()
    populations = [np.exp(-BETA * omega * np.arange(d)) for omega, d in zip(bath.frequencies, trunc.mode_dims)]
    rho = reduce(np.kron, [weights / weights.sum() for weights in populations])
    product = None
    for factor in word.factors:
        coefficients = bath.measure.coefficients(factor.function)
        operator = (core.creation(trunc, coefficients) if factor.kind == "create"
                    else core.annihilation(trunc, coefficients))
        product = operator if product is None else product @ operator
    return complex(word.scalar) * complex(np.sum(rho * product.diagonal()))


def test_occupation_and_coth():
    assert bose_occupation(1.0) == pytest.approx(1.0 / (np.e - 1.0))
    assert coth_half(2.0, 1.0) == pytest.approx(1.0 / np.tanh(1.0))


def test_count_pairings():
    core = get_thermal_core()
    f = TestFunction()
    assert core.count_pairings(PolynomialWord(factors=[("create", f), ("annihilate", f)])) == 1
    assert core.count_pairings(PolynomialWord(factors=[("create", f), ("create", f),
                                                       ("annihilate", f), ("annihilate", f)])) == 2
    assert core.count_pairings(PolynomialWord(factors=[("create", f)] * 3)) == 0


def test_word_too_long():
    f = TestFunction()
    word = PolynomialWord(factors=[("create", f), ("annihilate", f)] * 7)
    with pytest.raises(ComplexityError, match="exceeds"):
        get_thermal_core().wick_expectation(word, BETA)


def test_unbalanced_word_vanishes(obs_function):
    word = PolynomialWord(factors=[("create", obs_function), ("create", obs_function)])
    assert get_thermal_core().wick_expectation(word, BETA) == 0


def test_empty_word_is_scalar():
    assert get_thermal_core().wick_expectation(PolynomialWord(scalar=2 - 1j), BETA) == 2 - 1j


def test_two_point_is_wick_of_ordered_pair(obs_function, cor_function):
    core = get_thermal_core()
    word = PolynomialWord(factors=[("create", obs_function), ("annihilate", cor_function)])
    assert core.wick_expectation(word, BETA) == pytest.approx(core.two_point(obs_function, cor_function, BETA),
                                                              rel=1e-12)


def test_wick_matches_truncated_fock(two_mode_bath, rng):
    core = get_thermal_core()
    trunc = FockTruncation(cutoffs=(60, 60), system_dim=1)
    layouts = [("create", "annihilate"), ("annihilate", "create"),
               ("create", "create", "annihilate", "annihilate"), ("annihilate", "create", "create", "annihilate"),
               ("create", "annihilate", "annihilate", "create"), ("annihilate", "annihilate", "create", "create")]
    for index in range(12):
        kinds = layouts[index % len(layouts)]
        word = PolynomialWord(factors=[(kind, _random_function(rng)) for kind in kinds],
                              scalar=complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)))
        expected = _brute_force(word, two_mode_bath, trunc)
        value = core.wick_expectation(word, BETA, two_mode_bath.measure)
        assert abs(value - expected) <= 1e-6 * max(abs(expected), 1e-12)


def test_weyl_matches_truncated_fock(rng):
    core = get_thermal_core()
    bath = DiscretizedBath(frequencies=[0.9], couplings=[0.5], radial_weights=[0.25], scheme="uniform_midpoint",
                           omega_max=2.0)
    trunc = FockTruncation(cutoffs=(60,), system_dim=1)
    bath_core = get_bath_core()
    rho = bath_core.bath_thermal_state(bath, BETA, trunc).rho
    for _ in range(10):
        f = _random_function(rng)
        field = bath_core.field(trunc, bath.measure.coefficients(f)).toarray()
        expected = np.trace(rho @ expm(1j * field))
        value = core.weyl_expectation(f, BETA, bath.measure)
        assert value == pytest.approx(expected.real, rel=1e-6)
        assert abs(expected.imag) < 1e-10


@pytest.mark.parametrize("width", [0.6, 1.0, 1.7])
@pytest.mark.parametrize("p", [-0.5, 0.5])
def test_gluing_identity(width, p):
    core = get_thermal_core()
    f = TestFunction(p=p, q=4.0, amplitude_re=0.8, amplitude_im=0.3, profile=RadialProfile(family="gaussian",
                                                                                          width=width))
    assert core.gluing_norm(f, BETA) == pytest.approx(core.coth_form(f, BETA), rel=1e-8)


def test_glue_is_continuous_at_origin():
    core = get_thermal_core()
    f = TestFunction(p=-0.5, q=4.0, profile=RadialProfile(family="gaussian"))
    at_zero = core.glue(f, BETA, 0.0)
    near = core.glue(f, BETA, 1e-9)
    assert abs(at_zero - near) < 1e-6


def test_weyl_of_zero_function_is_one():
    f = TestFunction(amplitude_re=0.0)
    assert get_thermal_core().weyl_expectation(f, BETA) == 1.0


def test_weyl_continuum_closed_form(obs_function):
    core = get_thermal_core()
    assert core.weyl_expectation(obs_function, BETA) == pytest.approx(
        np.exp(-0.25 * core.coth_form(obs_function, BETA)), rel=1e-12)


def test_autocorrelation_at_zero_is_half_coth_form(form_factor):
    core = get_thermal_core()
    value = core.reservoir_autocorrelation(form_factor, BETA, 0.0)
    assert value.real == pytest.approx(0.5 * core.coth_form(form_factor, BETA), rel=1e-9)
    assert value.imag == 0


def test_autocorrelation_time_reversal(small_bath, form_factor):
    core = get_thermal_core()
    forward = core.reservoir_autocorrelation(form_factor, BETA, 1.7, small_bath.measure)
    backward = core.reservoir_autocorrelation(form_factor, BETA, -1.7, small_bath.measure)
    assert backward == pytest.approx(np.conj(forward), rel=1e-14)


@pytest.mark.slow
def test_discrete_autocorrelation_converges(smooth_form_factor):
    core = get_thermal_core()
    bath_core = get_bath_core()
    times = np.linspace(0.0, 5.0, 11)
    continuum = np.array([core.reservoir_autocorrelation(smooth_form_factor, BETA, t) for t in times])
    scale = abs(continuum[0])
    errors = []
    for n_modes in (100, 200):
        bath = bath_core.discretize(smooth_form_factor, n_modes, 12.0)
        assert times[-1] <= 0.5 * bath_core.recurrence_time(bath)
        discrete = np.array([core.reservoir_autocorrelation(smooth_form_factor, BETA, t, bath.measure)
                             for t in times])
        errors.append(np.max(np.abs(discrete - continuum)) / scale)
    assert errors[-1] <= 1e-3


def test_fit_power_law_recovers_exponent():
    times = np.linspace(5.0, 50.0, 20)
    slope, r_squared = get_thermal_core().fit_power_law(list(zip(times, 3.0 * times ** -3)), (5.0, 50.0))
    assert slope == pytest.approx(-3.0, abs=1e-10)
    assert r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_power_law_needs_samples():
    with pytest.raises(DomainError, match="at least"):
        get_thermal_core().fit_power_law([(1.0, 1.0), (2.0, 0.5)], (0.5, 3.0))


def test_negative_beta_rejected(obs_function):
    with pytest.raises(DomainError, match="beta"):
        get_thermal_core().coth_form(obs_function, -1.0)


def test_integrate_gaussian():
    assert integrate(lambda x: np.exp(-x * x), -np.inf, np.inf) == pytest.approx(np.sqrt(np.pi), rel=1e-12)


def test_continuum_measure_breaks_do_not_change_result(obs_function):
    core = get_thermal_core()
    default = core.coth_form(obs_function, BETA)
    custom = core.coth_form(obs_function, BETA, ContinuumMeasure(breaks=(0.0, 0.5, 2.0, 6.0)))
    assert custom == pytest.approx(default, rel=1e-9)
