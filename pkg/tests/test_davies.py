import numpy as np
import pytest
from scipy.integrate import quad

from ConfigService import DomainError, ValidationError
from DaviesService import PlemeljIntegrals, ThermalWeight, get_davies_core, transpose_permutation
from ModelService import get_model_core, spectral_density

BETA = 1.0


def _closed_form_rates(ff):
    density = spectral_density(ff, 1.0)
    return density, 1.0 / np.tanh(BETA / 2.0)


def test_transpose_permutation():
    x = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(x.reshape(-1)[transpose_permutation(3)], x.T.reshape(-1))


@pytest.mark.parametrize("kind", ["direct", "half", "full"])
@pytest.mark.parametrize("x0", [-1.7, -1.0, 0.0, 0.3, 1.0])
def test_principal_value_against_cauchy_quadrature(smooth_form_factor, kind, x0):
    weight = ThermalWeight(smooth_form_factor, BETA)
    integrals = PlemeljIntegrals(weight)
    expected = quad(lambda u: float(weight(kind, u)), -40.0, 40.0, weight="cauchy", wvar=x0,
                    epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    assert integrals.principal_value(kind, x0) == pytest.approx(expected, rel=1e-7, abs=1e-10)


def test_plemelj_pole_term(form_factor):
    weight = ThermalWeight(form_factor, BETA)
    integrals = PlemeljIntegrals(weight)
    value = integrals("direct", 1.0)
    assert value.imag == pytest.approx(-np.pi * float(weight("direct", 1.0)), rel=1e-14)
    assert len(integrals) == 1


def test_thermal_weight_reflection(form_factor):
    weight = ThermalWeight(form_factor, BETA)
    u = np.array([0.4, 1.0, 2.2])
    assert np.allclose(weight("full", u), weight("direct", -u))
    assert np.allclose(weight("half", u), weight("half", -u))
    assert np.allclose(weight("direct", -u), np.exp(-BETA * u) * weight("direct", u))


def test_two_level_level_shifts(two_level, form_factor):
    density, coth = _closed_form_rates(form_factor)
    occupation = 1.0 / np.expm1(BETA)
    core = get_davies_core()
    bohr = get_model_core().bohr_frequencies(two_level)
    shifts = {shift.e: shift for shift in core.level_shifts(two_level, form_factor, BETA, bohr)}
    assert shifts[1.0].matrix[0, 0].imag == pytest.approx(density * coth, rel=1e-10)
    assert shifts[-1.0].matrix[0, 0].imag == pytest.approx(density * coth, rel=1e-10)
    expected = 1j * np.array([[2 * density * occupation, -density / np.sinh(BETA / 2)],
                              [-density / np.sinh(BETA / 2), 2 * density * (occupation + 1)]])
    assert np.allclose(shifts[0.0].matrix, expected, atol=1e-7 * density)


def test_zero_coupling_is_free_commutator(three_level, form_factor):
    generator = get_davies_core().build(three_level, form_factor, BETA, 0.0)
    energies = three_level.energies
    assert np.allclose(generator.superop, np.diag(-1j * np.subtract.outer(energies, energies).reshape(-1)),
                       atol=1e-14)


@pytest.mark.parametrize("lam", [0.05, 0.1, 0.3])
def test_trace_preservation_and_gibbs_stationarity(three_level, form_factor, lam):
    core = get_davies_core()
    generator = core.build(three_level, form_factor, BETA, lam)
    assert core.trace_defect(generator) <= 1e-10
    gibbs = get_model_core().gibbs_state(three_level, BETA)
    assert np.sum(np.abs(generator.superop @ gibbs.reshape(-1))) <= 1e-8


def test_two_level_relaxation_and_decoherence_rates(two_level, form_factor):
    lam = 0.1
    density, coth = _closed_form_rates(form_factor)
    generator = get_davies_core().build(two_level, form_factor, BETA, lam)
    rates = np.sort(np.linalg.eigvals(generator.superop).real)
    expected = np.array([-2.0, -1.0, -1.0, 0.0]) * lam ** 2 * density * coth
    assert np.allclose(rates, expected, rtol=1e-8, atol=1e-12)


def test_weak_coupling_generator_is_scaled_difference(two_level, form_factor):
    core = get_davies_core()
    free = core.build(two_level, form_factor, BETA, 0.0)
    coupled = core.build(two_level, form_factor, BETA, 0.2)
    assert np.allclose(core.weak_coupling_generator(coupled), (coupled.superop - free.superop) / 0.04)


def test_complete_positivity(two_level, three_level, form_factor):
    core = get_davies_core()
    for model in (two_level, three_level):
        checks = core.check_cptp(core.build(model, form_factor, BETA, 0.2))
        assert [check.t for check in checks] == [0.01, 0.1, 1.0, 10.0, 100.0]
        assert all(check.passed for check in checks)


def test_choi_of_identity_channel(two_level, form_factor):
    core = get_davies_core()
    generator = core.build(two_level, form_factor, BETA, 0.1)
    choi = core.choi_matrix(generator, np.eye(4))
    bell = np.array([1, 0, 0, 1], dtype=complex)
    assert np.allclose(choi, np.outer(bell, bell))


def test_spectral_decomposition_two_level(two_level, form_factor):
    core = get_davies_core()
    generator = core.build(two_level, form_factor, BETA, 0.1)
    decomposition = core.spectral_decomposition(generator)
    assert decomposition.simple
    assert len(decomposition.modes) == 4
    assert len(decomposition.stationary_modes(1e-7)) == 1
    assert all(mode.a.imag >= -1e-10 for mode in decomposition.modes)
    for t in (0.5, 3.0):
        assert np.allclose(decomposition.propagator(t), core.propagator(generator, t), atol=1e-9)


def test_spectral_decomposition_three_level(three_level, form_factor):
    core = get_davies_core()
    generator = core.build(three_level, form_factor, BETA, 0.2)
    decomposition = core.spectral_decomposition(generator)
    assert sum(mode.multiplicity for mode in decomposition.modes) == 9
    assert np.allclose(decomposition.propagator(1.5), core.propagator(generator, 1.5), atol=1e-9)


def test_semigroup_relaxes_to_gibbs(two_level, form_factor):
    core = get_davies_core()
    generator = core.build(two_level, form_factor, BETA, 0.2)
    excited = np.diag([0.0, 1.0]).astype(complex)
    final = core.semigroup_apply(generator, 100.0, excited)
    assert np.allclose(final, get_model_core().gibbs_state(two_level, BETA), atol=1e-8)


def test_semigroup_input_checks(two_level, form_factor):
    core = get_davies_core()
    generator = core.build(two_level, form_factor, BETA, 0.1)
    with pytest.raises(ValidationError, match="Hermitian"):
        core.semigroup_apply(generator, 1.0, np.array([[0.5, 1.0], [0.0, 0.5]]))
    with pytest.raises(DomainError, match="nonnegative"):
        core.propagator(generator, -1.0)


def test_incomplete_sector_coverage(two_level, form_factor):
    core = get_davies_core()
    bohr = get_model_core().bohr_frequencies(two_level)
    shifts = core.level_shifts(two_level, form_factor, BETA, bohr)[:-1]
    with pytest.raises(ValidationError, match="cover"):
        core.assemble_and_dualize(two_level, shifts, BETA, 0.1)


def test_export_and_load(tmp_path, two_level, form_factor):
    core = get_davies_core()
    generator = core.build(two_level, form_factor, BETA, 0.1)
    path = core.export_generator(generator, core.spectral_decomposition(generator), tmp_path / "generator.json")
    loaded = core.load_generator(path)
    assert np.array_equal(loaded.superop, generator.superop)
    assert loaded.model_hash == two_level.model_hash()
    assert [shift.pairs for shift in loaded.shifts] == [shift.pairs for shift in generator.shifts]
    assert not list(tmp_path.glob("*.tmp"))
