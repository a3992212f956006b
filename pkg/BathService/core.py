from functools import reduce
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh, eigh_tridiagonal, svdvals
from scipy.sparse import csr_matrix, diags, identity, kron
from scipy.special import roots_legendre
from scipy.stats import entropy

from ConfigService import DegenerateSpecError, DomainError, MAX_DIM, NumericalError, ResourceError
from LoggerService import LoggerService, LoggedService
from ModelService import FormFactor, SystemModel, spectral_density
from .models import CompositeState, DiscretizedBath, FockTruncation, Scheme

BASE_ORDER = 16
DISCARDED_WEIGHT = 1e-6


def occupation(omega, beta: float):
    return 1.0 / np.expm1(beta * np.asarray(omega, dtype=float))


def ladder(cutoff: int) -> csr_matrix:
    """Truncated annihilator on span{|0>, ..., |cutoff>}."""
    return diags(np.sqrt(np.arange(1, cutoff + 1)), 1, shape=(cutoff + 1, cutoff + 1), format="csr",
                 dtype=complex)


def _kron_all(factors) -> csr_matrix:
    return reduce(lambda left, right: kron(left, right, format="csr"), factors)


def trace_distance(first: np.ndarray, second: np.ndarray) -> float:
    """1/2 ||first - second||_1 from singular values."""
    return 0.5 * float(np.sum(svdvals(np.asarray(first) - np.asarray(second))))


def von_neumann_entropy(rho: np.ndarray) -> float:
    values = np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), 0.0, None)
    return float(entropy(values))


class BathCore(LoggedService):
    """Finite-mode reservoir: discretization, truncated Fock operators and exact dynamics."""

    def __init__(self, logger: Optional[LoggerService] = None, max_dim: int = MAX_DIM):
        super().__init__(logger)
        self.max_dim = max_dim

    # ---- discretization

    @staticmethod
    def _stieltjes(nodes: np.ndarray, weights: np.ndarray, n_modes: int):
        """Gauss rule of the discrete measure sum_i weights_i delta(x - nodes_i) by the Stieltjes procedure."""
        total = weights.sum()
        previous = np.zeros_like(nodes)
        current = np.full_like(nodes, 1.0 / np.sqrt(total))
        alpha, beta = np.zeros(n_modes), np.zeros(n_modes)
        for k in range(n_modes):
            alpha[k] = np.sum(weights * nodes * current ** 2)
            following = (nodes - alpha[k]) * current - (beta[k - 1] if k else 0.0) * previous
            beta[k] = np.sqrt(np.sum(weights * following ** 2))
            if k < n_modes - 1 and beta[k] == 0:
                raise DegenerateSpecError(f"spectral measure supports fewer than {n_modes} modes")
            previous, current = current, following / (beta[k] if beta[k] else 1.0)
        values, vectors = eigh_tridiagonal(alpha, beta[:-1])
        return values, total * vectors[0, :] ** 2

    def discretize(self, ff: FormFactor, n_modes: int, omega_max: float,
                   scheme: Scheme = "gauss_spectral") -> DiscretizedBath:
        """Modes with sum_k |g_k|^2 delta(omega - omega_k) ~ (2/pi) J(omega) on [0, omega_max]."""
        if n_modes < 1 or not omega_max > 0:
            raise DomainError(f"need n_modes >= 1 and omega_max > 0, got {n_modes}, {omega_max}")
        if scheme == "uniform_midpoint":
            step = omega_max / n_modes
            frequencies = (np.arange(n_modes) + 0.5) * step
            weights = (2.0 / np.pi) * spectral_density(ff, frequencies) * step
        elif scheme == "gauss_spectral":
            panels = max(64, 4 * n_modes)
            x, w = roots_legendre(BASE_ORDER)
            edges = np.linspace(0.0, omega_max, panels + 1)
            half = 0.5 * np.diff(edges)
            nodes = (edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)).reshape(-1)
            base = (half[:, None] * w[None, :]).reshape(-1) * (2.0 / np.pi) * spectral_density(ff, nodes)
            if not np.any(base > 0):
                raise DegenerateSpecError("spectral density vanishes on the discretization interval")
            frequencies, weights = self._stieltjes(nodes, base, n_modes)
        else:
            raise DomainError(f"unknown discretization scheme {scheme}")
        if not np.any(weights > 0):
            raise DegenerateSpecError("spectral density vanishes on the discretization interval")
        density = (2.0 / np.pi) * spectral_density(ff, frequencies)
        with np.errstate(divide="ignore", invalid="ignore"):
            radial_weights = np.where(density > 0, weights * frequencies ** 2 / density, 0.0)
        phase = ff.amplitude / abs(ff.amplitude) if ff.amplitude != 0 else 1.0
        bath = DiscretizedBath(frequencies=frequencies, couplings=phase * np.sqrt(np.clip(weights, 0.0, None)),
                               radial_weights=radial_weights, scheme=scheme, omega_max=omega_max,
                               provenance=ff.fingerprint())
        self.logging.info(f"Discretized bath: {scheme}, {n_modes} modes on [0, {omega_max}], "
                          f"total weight {weights.sum():.6e}")
        return bath

    @staticmethod
    def recurrence_time(bath: DiscretizedBath) -> float:
        """2 pi / (smallest frequency gap)."""
        if bath.n_modes < 2:
            raise DomainError("recurrence time needs at least two modes")
        return float(2.0 * np.pi / np.min(np.diff(np.sort(bath.frequencies))))

    # ---- truncation

    def truncation(self, bath: DiscretizedBath, beta: float, system_dim: int,
                   cutoffs: Optional[Sequence[int]] = None, max_dim: Optional[int] = None) -> FockTruncation:
        """Explicit cutoffs, or ceil(8 n(omega_k) + 4) lowered (largest first) until the budget is met."""
        limit = max_dim or self.max_dim
        if cutoffs is not None:
            if len(cutoffs) != bath.n_modes:
                raise DomainError(f"need {bath.n_modes} cutoffs, got {len(cutoffs)}")
            trunc = FockTruncation(cutoffs=cutoffs, system_dim=system_dim)
        else:
            chosen = [int(np.ceil(8.0 * n + 4.0)) for n in occupation(bath.frequencies, beta)]
            trunc = FockTruncation(cutoffs=chosen, system_dim=system_dim)
            while trunc.dimension > limit and max(chosen) > 1:
                chosen[int(np.argmax(chosen))] -= 1
                trunc = FockTruncation(cutoffs=chosen, system_dim=system_dim)
        if trunc.dimension > limit:
            raise ResourceError("composite space too large", dimension=trunc.dimension, limit=limit)
        return trunc

    # ---- operators

    @staticmethod
    def mode_annihilator(trunc: FockTruncation, k: int) -> csr_matrix:
        factors = [identity(d, dtype=complex, format="csr") for d in trunc.mode_dims]
        factors[k] = ladder(trunc.cutoffs[k])
        return _kron_all(factors)

    def creation(self, trunc: FockTruncation, coefficients: np.ndarray) -> csr_matrix:
        """a*(f) = sum_k f_k a_k^dagger on the reservoir factor."""
        total = csr_matrix((trunc.bath_dim, trunc.bath_dim), dtype=complex)
        for k, c in enumerate(coefficients):
            if c != 0:
                total = total + c * self.mode_annihilator(trunc, k).getH()
        return total

    def annihilation(self, trunc: FockTruncation, coefficients: np.ndarray) -> csr_matrix:
        return self.creation(trunc, coefficients).getH().tocsr()

    def field(self, trunc: FockTruncation, coefficients: np.ndarray) -> csr_matrix:
        """phi(f) = (a*(f) + a(f)) / sqrt(2)."""
        up = self.creation(trunc, coefficients)
        return (up + up.getH()) / np.sqrt(2.0)

    @staticmethod
    def free_bath_energies(bath: DiscretizedBath, trunc: FockTruncation) -> np.ndarray:
        """Diagonal of sum_k omega_k a_k^dagger a_k."""
        levels = [omega * np.arange(d) for omega, d in zip(bath.frequencies, trunc.mode_dims)]
        return reduce(lambda left, right: np.add.outer(left, right).reshape(-1), levels, np.zeros(1))

    def hamiltonian(self, model: SystemModel, bath: DiscretizedBath, lam: float, trunc: FockTruncation
                    ) -> np.ndarray:
        """H_S (x) 1 + 1 (x) sum omega_k n_k + lam G (x) phi(g)."""
        if trunc.dimension > self.max_dim:
            raise ResourceError("composite space too large", dimension=trunc.dimension, limit=self.max_dim)
        bath_identity = identity(trunc.bath_dim, dtype=complex, format="csr")
        total = kron(csr_matrix(model.hamiltonian), bath_identity, format="csr")
        total = total + kron(identity(model.dim, dtype=complex, format="csr"),
                             diags(self.free_bath_energies(bath, trunc).astype(complex)), format="csr")
        if lam != 0:
            total = total + lam * kron(csr_matrix(model.coupling), self.field(trunc, bath.couplings), format="csr")
        dense = total.toarray()
        return 0.5 * (dense + dense.conj().T)

    # ---- states

    def bath_thermal_state(self, bath: DiscretizedBath, beta: float, trunc: FockTruncation) -> CompositeState:
        """Product of truncated single-mode Gibbs states, each renormalized after truncation."""
        if not beta > 0:
            raise DomainError(f"beta must be positive, got {beta}")
        factors, warnings = [], []
        for k, (omega, cutoff) in enumerate(zip(bath.frequencies, trunc.cutoffs)):
            populations = np.exp(-beta * omega * np.arange(cutoff + 1))
            factors.append(populations / populations.sum())
            discarded = float(np.exp(-beta * omega * (cutoff + 1)))
            if discarded > DISCARDED_WEIGHT:
                warnings.append({"mode": k, "discarded_weight": discarded})
        if warnings:
            self.logging.warning(f"Fock truncation discards thermal weight above {DISCARDED_WEIGHT}: {warnings}")
        diagonal = reduce(np.kron, factors)
        return CompositeState(rho=np.diag(diagonal), system_dim=1, mode_dims=trunc.mode_dims,
                              metadata={"truncation_warnings": warnings, "beta": beta})

    @staticmethod
    def product_state(rho_system: np.ndarray, reservoir: CompositeState) -> CompositeState:
        rho_system = np.asarray(rho_system, dtype=complex)
        return CompositeState(rho=np.kron(rho_system, reservoir.rho), system_dim=rho_system.shape[0],
                              mode_dims=reservoir.mode_dims, metadata=dict(reservoir.metadata))

    # ---- dynamics

    def evolve(self, hamiltonian: np.ndarray, state: CompositeState, t_grid: Sequence[float]
               ) -> List[CompositeState]:
        """exp(-itH) rho exp(itH) on the grid from one eigendecomposition of H."""
        times = np.asarray(t_grid, dtype=float)
        if np.any(np.diff(times) < 0):
            raise DomainError("time grid must be sorted")
        with self.timed(f"evolution of dimension {hamiltonian.shape[0]} over {len(times)} times"):
            try:
                energies, vectors = eigh(hamiltonian)
            except LinAlgError as e:
                raise NumericalError(f"eigendecomposition of the Hamiltonian failed: {e}") from e
            rotated = vectors.conj().T @ state.rho @ vectors
            gaps = np.subtract.outer(energies, energies)
            trajectory, corrections = [], []
            for t in times:
                rho = vectors @ (rotated * np.exp(-1j * t * gaps)) @ vectors.conj().T
                hermitian = 0.5 * (rho + rho.conj().T)
                trace = np.trace(hermitian).real
                corrections.append(max(float(np.max(np.abs(hermitian - rho))), abs(trace - 1.0)))
                trajectory.append(CompositeState(rho=hermitian / trace, system_dim=state.system_dim,
                                                 mode_dims=state.mode_dims, metadata={**state.metadata, "t": t}))
        self.logging.info(f"Evolution corrections: max {max(corrections, default=0.0):.2e}")
        return trajectory

    # ---- reductions

    @staticmethod
    def partial_trace_system(state: CompositeState) -> np.ndarray:
        """tr_R rho."""
        n, b = state.system_dim, state.bath_dim
        return np.einsum("ibjb->ij", state.rho.reshape(n, b, n, b))

    @staticmethod
    def partial_trace_bath(state: CompositeState) -> np.ndarray:
        """tr_S rho."""
        n, b = state.system_dim, state.bath_dim
        return np.einsum("ibic->bc", state.rho.reshape(n, b, n, b))

    @staticmethod
    def trace_distance(first: np.ndarray, second: np.ndarray) -> float:
        return trace_distance(first, second)

    @staticmethod
    def von_neumann_entropy(rho: np.ndarray) -> float:
        return von_neumann_entropy(rho)

    def mutual_information(self, state: CompositeState) -> float:
        """S(rho_S) + S(rho_R) - S(rho)."""
        return (von_neumann_entropy(self.partial_trace_system(state))
                + von_neumann_entropy(self.partial_trace_bath(state)) - von_neumann_entropy(state.rho))


def get_bath_core(logger: Optional[LoggerService] = None, max_dim: int = MAX_DIM) -> BathCore:
    return BathCore(logger, max_dim)
