import numpy as np
import pytest
from scipy.integrate import quad

from BathService import CompositeState, FockTruncation, get_bath_core, ladder, trace_distance
from ConfigService import DomainError, ResourceError
from ModelService import get_model_core, spectral_density


def test_gauss_spectral_total_weight(form_factor):
    bath = get_bath_core().discretize(form_factor, 4, 4.0)
    expected = quad(lambda w: (2.0 / np.pi) * spectral_density(form_factor, w), 0.0, 4.0, epsabs=1e-13)[0]
    assert np.sum(np.abs(bath.couplings) ** 2) == pytest.approx(expected, rel=1e-9)
    assert np.all(np.diff(bath.frequencies) > 0)
    assert 0.0 < bath.frequencies[0] and bath.frequencies[-1] < 4.0


def test_gauss_spectral_reproduces_moments(form_factor):
    bath = get_bath_core().discretize(form_factor, 3, 4.0)
    weights = np.abs(bath.couplings) ** 2
    for power in range(1, 6):
        expected = quad(lambda w: w ** power * (2.0 / np.pi) * spectral_density(form_factor, w), 0.0, 4.0,
                        epsabs=1e-13)[0]
        assert np.sum(weights * bath.frequencies ** power) == pytest.approx(expected, rel=1e-8)


def test_uniform_midpoint(form_factor):
    bath = get_bath_core().discretize(form_factor, 8, 4.0, scheme="uniform_midpoint")
    assert np.allclose(bath.frequencies, 0.25 + 0.5 * np.arange(8))
    assert np.allclose(np.abs(bath.couplings) ** 2,
                       (2.0 / np.pi) * spectral_density(form_factor, bath.frequencies) * 0.5)


@pytest.mark.parametrize("scheme", ["uniform_midpoint", "gauss_spectral"])
def test_form_factor_coefficients_match_couplings(form_factor, scheme):
    bath = get_bath_core().discretize(form_factor, 5, 4.0, scheme=scheme)
    assert np.allclose(np.abs(bath.measure.coefficients(form_factor)) ** 2, np.abs(bath.couplings) ** 2)


def test_discretize_domain(form_factor):
    with pytest.raises(DomainError):
        get_bath_core().discretize(form_factor, 0, 4.0)
    with pytest.raises(DomainError):
        get_bath_core().discretize(form_factor, 3, -1.0)


def test_recurrence_time(two_mode_bath):
    assert get_bath_core().recurrence_time(two_mode_bath) == pytest.approx(2 * np.pi / 0.6)
    single = two_mode_bath.model_copy(update={"frequencies": np.array([0.7]), "couplings": np.array([0.4]),
                                              "radial_weights": np.array([0.2])})
    with pytest.raises(DomainError):
        get_bath_core().recurrence_time(single)


def test_truncation_budget(small_bath):
    core = get_bath_core()
    trunc = core.truncation(small_bath, 1.0, 2, max_dim=100)
    assert trunc.dimension <= 100
    assert all(n >= 1 for n in trunc.cutoffs)
    explicit = core.truncation(small_bath, 1.0, 2, cutoffs=[2, 2, 2])
    assert explicit.mode_dims == (3, 3, 3)
    assert explicit.dimension == 54
    assert explicit.raised(1).cutoffs == (3, 3, 3)
    with pytest.raises(ResourceError) as info:
        core.truncation(small_bath, 1.0, 2, cutoffs=[10, 10, 10], max_dim=500)
    assert info.value.dimension == 2662
    with pytest.raises(DomainError):
        core.truncation(small_bath, 1.0, 2, cutoffs=[2, 2])


def test_ladder():
    a = ladder(4).toarray()
    number = a.conj().T @ a
    assert np.allclose(np.diag(number), np.arange(5))
    commutator = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(np.diag(commutator)[:-1], 1.0)
    assert commutator[-1, -1] == pytest.approx(-4.0)


def test_smeared_creation_on_vacuum(two_mode_bath):
    core = get_bath_core()
    trunc = FockTruncation(cutoffs=(3, 3), system_dim=1)
    coefficients = np.array([0.3 + 0.1j, -0.2j])
    up = core.creation(trunc, coefficients).toarray()
    down = core.annihilation(trunc, coefficients).toarray()
    assert np.allclose(down, up.conj().T)
    vacuum = np.zeros(trunc.bath_dim)
    vacuum[0] = 1.0
    assert np.allclose(down @ up @ vacuum, np.sum(np.abs(coefficients) ** 2) * vacuum)
    field = core.field(trunc, coefficients).toarray()
    assert np.allclose(field, (up + down) / np.sqrt(2.0))


def test_hamiltonian(two_level, two_mode_bath):
    core = get_bath_core()
    trunc = FockTruncation(cutoffs=(2, 2), system_dim=2)
    free = core.hamiltonian(two_level, two_mode_bath, 0.0, trunc)
    expected = np.add.outer(two_level.energies, core.free_bath_energies(two_mode_bath, trunc)).reshape(-1)
    assert np.allclose(free, np.diag(expected))
    coupled = core.hamiltonian(two_level, two_mode_bath, 0.3, trunc)
    assert np.allclose(coupled, coupled.conj().T)
    assert not np.allclose(coupled, free)


def test_hamiltonian_budget(two_level, two_mode_bath):
    with pytest.raises(ResourceError):
        get_bath_core(max_dim=10).hamiltonian(two_level, two_mode_bath, 0.1,
                                              FockTruncation(cutoffs=(2, 2), system_dim=2))


def test_bath_thermal_state(two_mode_bath):
    core = get_bath_core()
    state = core.bath_thermal_state(two_mode_bath, 2.0, FockTruncation(cutoffs=(40, 40), system_dim=1))
    assert np.trace(state.rho).real == pytest.approx(1.0)
    assert not state.metadata["truncation_warnings"]
    populations = np.diag(state.rho).real.reshape(41, 41)
    first = populations.sum(axis=1)
    assert first[1] / first[0] == pytest.approx(np.exp(-2.0 * 0.7))
    coarse = core.bath_thermal_state(two_mode_bath, 0.5, FockTruncation(cutoffs=(1, 1), system_dim=1))
    assert [w["mode"] for w in coarse.metadata["truncation_warnings"]] == [0, 1]
    with pytest.raises(DomainError):
        core.bath_thermal_state(two_mode_bath, 0.0, FockTruncation(cutoffs=(1, 1), system_dim=1))


def test_free_evolution_keeps_product_of_gibbs_states(two_level, two_mode_bath):
    core = get_bath_core()
    trunc = FockTruncation(cutoffs=(2, 2), system_dim=2)
    reservoir = core.bath_thermal_state(two_mode_bath, 1.0, trunc)
    state = core.product_state(get_model_core().gibbs_state(two_level, 1.0), reservoir)
    trajectory = core.evolve(core.hamiltonian(two_level, two_mode_bath, 0.0, trunc), state, [0.0, 1.0, 7.5])
    for evolved in trajectory:
        assert np.allclose(evolved.rho, state.rho, atol=1e-12)


def test_interacting_evolution_is_unitary(two_level, two_mode_bath, rng):
    core = get_bath_core()
    trunc = FockTruncation(cutoffs=(2, 2), system_dim=2)
    vector = rng.normal(size=trunc.dimension) + 1j * rng.normal(size=trunc.dimension)
    vector /= np.linalg.norm(vector)
    state = CompositeState(rho=np.outer(vector, vector.conj()), system_dim=2, mode_dims=trunc.mode_dims)
    trajectory = core.evolve(core.hamiltonian(two_level, two_mode_bath, 0.5, trunc), state, [0.0, 0.5, 3.0])
    assert np.allclose(trajectory[0].rho, state.rho, atol=1e-12)
    for evolved in trajectory:
        validity = evolved.validity()
        assert validity["trace"] <= 1e-12
        assert np.trace(evolved.rho @ evolved.rho).real == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(DomainError):
        core.evolve(np.eye(trunc.dimension), state, [1.0, 0.0])


def test_partial_traces_and_mutual_information(two_level, two_mode_bath):
    core = get_bath_core()
    trunc = FockTruncation(cutoffs=(1, 1), system_dim=2)
    reservoir = core.bath_thermal_state(two_mode_bath, 1.0, trunc)
    gibbs = get_model_core().gibbs_state(two_level, 1.0)
    product = core.product_state(gibbs, reservoir)
    assert np.allclose(core.partial_trace_system(product), gibbs)
    assert np.allclose(core.partial_trace_bath(product), reservoir.rho)
    assert core.mutual_information(product) == pytest.approx(0.0, abs=1e-10)

    bell = np.zeros(8)
    bell[0] = bell[5] = 1 / np.sqrt(2)
    entangled = CompositeState(rho=np.outer(bell, bell), system_dim=2, mode_dims=(2, 2))
    assert core.mutual_information(entangled) == pytest.approx(2 * np.log(2))


def test_trace_distance():
    up, down = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert trace_distance(up, down) == pytest.approx(1.0)
    assert trace_distance(up, 0.5 * np.eye(2)) == pytest.approx(0.5)
    assert trace_distance(up, up) == pytest.approx(0.0)
