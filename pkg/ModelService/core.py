from typing import List, Optional, Tuple

import numpy as np
from pydantic import ValidationError as PydanticValidationError
from scipy.linalg import expm

from ConfigService import ConfigError, DomainError, RunConfig
from LoggerService import LoggerService, LoggedService
from .angular import sphere_rule, sphere_integral
from .models import (AssumptionReport, BohrDecomposition, BohrSector, FormFactor, RadialProfile, SystemModel,
                     TestFunction)


def complex_matrix(pairs) -> np.ndarray:
    """Row-major (re, im) pairs -> complex ndarray."""
    array = np.asarray(pairs, dtype=float)
    return array[..., 0] + 1j * array[..., 1]


def spectral_density(ff: FormFactor, omega, angular_order: Optional[int] = None):
    """J(omega) = (pi/2) omega^2 * integral over S^2 of |g(omega, Sigma)|^2.

    Isotropic form factors use the closed angular reduction 2 pi^2 omega^2 |g(omega)|^2; anisotropic
    ones (or an explicit `angular_order`) use the Lebedev rule.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError(f"spectral density needs omega >= 0, got {omega[omega < 0].min()}")
    if ff.isotropic and angular_order is None:
        angular = 4.0 * np.pi
    else:
        nodes, _ = sphere_rule(angular_order or 26)
        angular = float(np.real(sphere_integral(np.abs(ff.angular(nodes[:, 2])) ** 2, angular_order or 26)))
    positive = omega > 0
    safe = np.where(positive, omega, 1.0)
    value = 0.5 * np.pi * safe ** 2 * np.abs(ff.amplitude) ** 2 * ff.radial(safe) ** 2 * angular
    result = np.where(positive, value, 0.0)
    return float(result) if result.ndim == 0 else result


class ModelCore(LoggedService):
    """System, coupling and form-factor level operations."""

    def spectral_density(self, ff: FormFactor, omega, angular_order: Optional[int] = None):
        return spectral_density(ff, omega, angular_order)

    def check_assumptions(self, model: SystemModel, ff: FormFactor, fgr_tolerance: float = 1e-12,
                          degeneracy_tolerance: float = 1e-9) -> AssumptionReport:
        """(A1) smoothness of the form factor and (A2a) effective coupling for every Bohr pair."""
        notes = []
        a1_ok = ff.a1_exponent_ok and ff.q > 2 and ff.profile.check_smooth(4)
        if not ff.a1_exponent_ok:
            notes.append(f"(A1) infrared exponent p={ff.p} is not one of -1/2, 1/2, 3/2 and not > 2")
        if not ff.q > 2:
            notes.append(f"(A1) ultraviolet exponent q={ff.q} is not > 2")
        if not ff.profile.check_smooth(4):
            notes.append("(A1) radial profile does not provide four bounded derivatives with h(0) != 0")

        scale = degeneracy_tolerance * max(model.energies[-1] - model.energies[0], 1.0)
        witness: List[Tuple[int, int, complex]] = []
        a2a_ok = True
        for m in range(model.dim):
            for n in range(model.dim):
                gap = model.energies[m] - model.energies[n]
                if abs(gap) <= scale:
                    continue
                value = complex(model.coupling[m, n] * spectral_density(ff, abs(gap)))
                witness.append((m, n, value))
                if not abs(value) > fgr_tolerance:
                    a2a_ok = False
                    notes.append(f"(A2a) <phi_{m}, G phi_{n}> J(|E_{m} - E_{n}|) = {value:.3e} vanishes")
        report = AssumptionReport(a1_ok=a1_ok, a2a_ok=a2a_ok, a2a_witness=witness, fgr_tolerance=fgr_tolerance,
                                  notes="; ".join(notes))
        self.logging.info(f"Assumption check: A1={a1_ok} A2a={a2a_ok} ({len(witness)} Bohr pairs)")
        return report

    def bohr_frequencies(self, model: SystemModel, degeneracy_tolerance: float = 1e-9) -> BohrDecomposition:
        """Distinct differences E_m - E_n with their index pairs, clustered by gap splitting."""
        energies = model.energies
        spread = energies[-1] - energies[0]
        tolerance = degeneracy_tolerance * (spread if spread > 0 else 1.0)
        pairs = [(m, n) for m in range(model.dim) for n in range(model.dim)]
        order = sorted(pairs, key=lambda mn: (energies[mn[0]] - energies[mn[1]], mn))
        clusters: List[List[Tuple[int, int]]] = [[order[0]]]
        for previous, current in zip(order, order[1:]):
            gap = (energies[current[0]] - energies[current[1]]) - (energies[previous[0]] - energies[previous[1]])
            if gap > tolerance:
                clusters.append([])
            clusters[-1].append(current)

        owner = {pair: index for index, cluster in enumerate(clusters) for pair in cluster}
        means = [float(np.mean([energies[m] - energies[n] for m, n in cluster])) for cluster in clusters]
        sectors = []
        for index, cluster in enumerate(clusters):
            m, n = cluster[0]
            mirror = owner[(n, m)]
            # exact antisymmetry e(-) = -e(+), and exactly 0 for the diagonal cluster
            e = (means[index] - means[mirror]) / 2.0
            sectors.append(BohrSector(e=e, pairs=tuple(sorted(cluster))))
        decomposition = BohrDecomposition(sectors=tuple(sorted(sectors, key=lambda s: s.e)), dim=model.dim)
        self.logging.info(f"Bohr frequencies: {decomposition.frequencies}")
        return decomposition

    @staticmethod
    def gibbs_state(model: SystemModel, beta: float) -> np.ndarray:
        """rho_{S,beta} = exp(-beta H_S) / Z."""
        if beta <= 0:
            raise DomainError(f"beta must be positive, got {beta}")
        weights = np.exp(-beta * (model.energies - model.energies[0]))
        return np.diag(weights / weights.sum()).astype(complex)

    @staticmethod
    def gibbs_purification(model: SystemModel, beta: float) -> np.ndarray:
        """Omega_{S,beta} in C^N (x) C^N, row-major, components exp(-beta E_j / 2) delta_mn / sqrt(Z)."""
        weights = np.exp(-beta * (model.energies - model.energies[0]) / 2.0)
        weights = weights / np.linalg.norm(weights)
        return np.diag(weights).reshape(-1).astype(complex)

    @staticmethod
    def free_propagator(model: SystemModel, t: float) -> np.ndarray:
        return expm(-1j * t * model.hamiltonian)

    def load_model(self, config: RunConfig) -> Tuple[SystemModel, FormFactor, float, List[float]]:
        """Domain objects from a validated run configuration."""
        try:
            model = SystemModel(energies=config.model.energies, coupling=complex_matrix(config.model.coupling))
            ff = FormFactor(p=config.form_factor.p, q=config.form_factor.q, anisotropy=config.form_factor.anisotropy,
                            profile=RadialProfile(**config.form_factor.profile.model_dump()))
        except PydanticValidationError as e:
            raise ConfigError(f"invalid model: {e.errors()[0]['msg']}", key="model") from e
        self.logging.info(f"Loaded model {model.model_hash()} with N={model.dim}, beta={config.model.beta}")
        return model, ff, config.model.beta, list(config.model.lambdas)

    @staticmethod
    def load_functions(config: RunConfig) -> dict:
        functions = {}
        for name, entry in config.functions.items():
            try:
                functions[name] = TestFunction(function_class=entry.function_class, p=entry.p, q=entry.q,
                                               anisotropy=entry.anisotropy, amplitude_re=entry.amplitude[0],
                                               amplitude_im=entry.amplitude[1],
                                               profile=RadialProfile(**entry.profile.model_dump()))
            except PydanticValidationError as e:
                raise ConfigError(f"invalid test function: {e.errors()[0]['msg']}", key=f"functions.{name}") from e
        return functions


def get_model_core(logger: Optional[LoggerService] = None) -> ModelCore:
    return ModelCore(logger)
