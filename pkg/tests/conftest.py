import os
import tempfile
from pathlib import Path

os.environ.setdefault("LOG_DIR", tempfile.mkdtemp(prefix="lab-logs-"))

import numpy as np
import pytest

from BathService import DiscretizedBath, get_bath_core
from ModelService import FormFactor, RadialProfile, SystemModel, TestFunction

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def two_level() -> SystemModel:
    return SystemModel(energies=[0.0, 1.0], coupling=SIGMA_X)


@pytest.fixture
def three_level() -> SystemModel:
    coupling = np.array([[0.0, 1.0, 0.3], [1.0, 0.0, 0.7], [0.3, 0.7, 0.0]], dtype=complex)
    return SystemModel(energies=[0.0, 0.8, 1.9], coupling=coupling)


@pytest.fixture
def form_factor() -> FormFactor:
    return FormFactor(p=0.5, q=2.5)


@pytest.fixture
def smooth_form_factor() -> FormFactor:
    return FormFactor(p=0.5, q=2.5, profile=RadialProfile(family="gaussian", width=2.0))


@pytest.fixture
def obs_function() -> TestFunction:
    return TestFunction(function_class="obs", amplitude_re=0.5, profile=RadialProfile(family="gaussian"))


@pytest.fixture
def cor_function() -> TestFunction:
    return TestFunction(function_class="cor", amplitude_re=0.5, profile=RadialProfile(family="gaussian"))


@pytest.fixture
def small_bath(form_factor) -> DiscretizedBath:
    return get_bath_core().discretize(form_factor, 3, 4.0)


@pytest.fixture
def two_mode_bath() -> DiscretizedBath:
    """Hand-built two-mode bath for brute-force comparisons."""
    return DiscretizedBath(frequencies=[0.7, 1.3], couplings=[0.4, 0.3], radial_weights=[0.2, 0.3],
                           scheme="uniform_midpoint", omega_max=2.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
