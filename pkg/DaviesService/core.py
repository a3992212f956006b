from json import dumps, loads
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, eig, eigvals, expm, schur, solve_sylvester

from ConfigService import (DomainError, NumericalError, QUAD_EPSREL, QUAD_LIMIT, ValidationError,
                           atomic_write_text)
from LoggerService import LoggerService, LoggedService
from ModelService import BohrDecomposition, FormFactor, SystemModel, get_model_core
from .models import CPTPCheck, DaviesGenerator, LevelShiftOperator, SpectralDecomposition, SpectralMode
from .principal_value import PlemeljIntegrals, ThermalWeight

CONDITION_LIMIT = 1e8


def transpose_permutation(dim: int) -> np.ndarray:
    """Index map taking vec(X) to vec(X^T) for row-major vectorization."""
    return np.arange(dim * dim).reshape(dim, dim).T.reshape(-1)


def gibbs_weights(energies: np.ndarray, beta: float) -> np.ndarray:
    """Diagonal of V: component (m, n) is exp(-beta E_n / 2) / sqrt(Z)."""
    half = np.exp(-0.5 * beta * (energies - energies[0]))
    half = half / np.linalg.norm(half)
    return np.tile(half, energies.shape[0])


def dualize(block: np.ndarray, energies: np.ndarray, beta: float) -> np.ndarray:
    """Schroedinger-picture superoperator T (V^-1 (i block) V)^T T."""
    weights = gibbs_weights(energies, beta)
    heisenberg = (1j * block) * weights[None, :] / weights[:, None]
    perm = transpose_permutation(energies.shape[0])
    return heisenberg.T[perm][:, perm]


def _complex_pairs(matrix: np.ndarray) -> list:
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()


def _from_pairs(pairs) -> np.ndarray:
    array = np.asarray(pairs, dtype=float)
    return array[..., 0] + 1j * array[..., 1]


class DaviesCore(LoggedService):
    """Level shift operators, the dualized Davies generator and its semigroup."""

    def __init__(self, logger: Optional[LoggerService] = None):
        super().__init__(logger)
        self._integrals: Dict[Tuple[str, float], PlemeljIntegrals] = {}

    def _plemelj(self, ff: FormFactor, beta: float) -> PlemeljIntegrals:
        key = (ff.fingerprint(), float(beta))
        if key not in self._integrals:
            self._integrals[key] = PlemeljIntegrals(ThermalWeight(ff, beta))
        return self._integrals[key]

    def level_shift(self, model: SystemModel, ff: FormFactor, beta: float, e: float,
                    pairs: Sequence[Tuple[int, int]]) -> LevelShiftOperator:
        """Lambda_e = -1/2 [AA - AB - BA + BB] on the sector e, each term a sum of Plemelj integrals."""
        if not beta > 0:
            raise DomainError(f"beta must be positive, got {beta}")
        r = self._plemelj(ff, beta)
        energies, coupling = model.energies, model.coupling
        conj = coupling.conj()
        size, dim = len(pairs), model.dim
        pv_part = np.zeros((size, size), dtype=complex)
        pole_part = np.zeros((size, size), dtype=complex)

        def add(i: int, j: int, coefficient: complex, kind: str, x0: float):
            if coefficient == 0:
                return
            pv, at_pole = r.resolve(kind, x0)
            pv_part[i, j] += coefficient * pv
            pole_part[i, j] += coefficient * at_pole

        with self.timed(f"level shift at e={e:.6g} ({size} pairs)"):
            for i, (m, n) in enumerate(pairs):
                for j, (m2, n2) in enumerate(pairs):
                    if n == n2:
                        for k in range(dim):
                            add(i, j, coupling[m, k] * coupling[k, m2], "direct", e - (energies[k] - energies[n]))
                    cross = coupling[m, m2] * conj[n, n2]
                    add(i, j, -cross, "half", e - (energies[m2] - energies[n]))
                    add(i, j, -cross, "half", e - (energies[m] - energies[n2]))
                    if m == m2:
                        for k in range(dim):
                            add(i, j, conj[n, k] * conj[k, n2], "full", e - (energies[m] - energies[k]))
        return LevelShiftOperator(e=e, pairs=tuple(pairs), hamiltonian=-0.5 * pv_part,
                                  dissipative=0.5j * np.pi * pole_part)

    def level_shifts(self, model: SystemModel, ff: FormFactor, beta: float,
                     bohr: BohrDecomposition) -> List[LevelShiftOperator]:
        return [self.level_shift(model, ff, beta, sector.e, sector.pairs) for sector in bohr.sectors]

    @staticmethod
    def embed(shifts: Sequence[LevelShiftOperator], dim: int, part: str = "matrix") -> np.ndarray:
        """Block-diagonal N^2 x N^2 operator assembled from the sector blocks."""
        full = np.zeros((dim * dim, dim * dim), dtype=complex)
        for shift in shifts:
            index = [m * dim + n for m, n in shift.pairs]
            full[np.ix_(index, index)] = getattr(shift, part)
        return full

    def assemble_and_dualize(self, model: SystemModel, shifts: Sequence[LevelShiftOperator], beta: float,
                             lam: float) -> DaviesGenerator:
        """M(lambda) = L_S + lambda^2 Lambda, dualized through the Gibbs purification."""
        dim = model.dim
        covered = sorted(pair for shift in shifts for pair in shift.pairs)
        if covered != [(m, n) for m in range(dim) for n in range(dim)]:
            raise ValidationError("level shift operators do not cover every Bohr sector exactly once")
        weights = gibbs_weights(model.energies, beta)
        if not np.all(np.isfinite(1.0 / weights)):
            raise NumericalError("purification map is singular", diagnostics={"min_weight": float(weights.min())})
        free = np.diag(np.subtract.outer(model.energies, model.energies).reshape(-1)).astype(complex)
        hamiltonian_part = dualize(self.embed(shifts, dim, "hamiltonian"), model.energies, beta)
        dissipative_part = dualize(self.embed(shifts, dim, "dissipative"), model.energies, beta)
        superop = dualize(free, model.energies, beta) + lam ** 2 * (hamiltonian_part + dissipative_part)
        generator = DaviesGenerator(lam=lam, beta=beta, energies=model.energies, superop=superop,
                                    hamiltonian_part=hamiltonian_part, dissipative_part=dissipative_part,
                                    shifts=tuple(shifts), model_hash=model.model_hash(),
                                    settings={"quad_epsrel": QUAD_EPSREL, "quad_limit": QUAD_LIMIT,
                                              "plemelj": "subtraction"})
        self.logging.info(f"Davies generator assembled: N={dim}, lambda={lam}, beta={beta}, "
                          f"trace defect {self.trace_defect(generator):.2e}")
        return generator

    def build(self, model: SystemModel, ff: FormFactor, beta: float, lam: float,
              degeneracy_tolerance: float = 1e-9) -> DaviesGenerator:
        bohr = get_model_core().bohr_frequencies(model, degeneracy_tolerance)
        return self.assemble_and_dualize(model, self.level_shifts(model, ff, beta, bohr), beta, lam)

    @staticmethod
    def weak_coupling_generator(generator: DaviesGenerator) -> np.ndarray:
        return generator.weak_coupling

    @staticmethod
    def trace_defect(generator: DaviesGenerator) -> float:
        """Norm of tr o L as a row functional."""
        identity = np.eye(generator.dim).reshape(-1)
        return float(np.linalg.norm(identity @ generator.superop))

    # ---- semigroup

    def propagator(self, generator: DaviesGenerator, t: float) -> np.ndarray:
        """exp(t L) by eigendecomposition, or scaling and squaring for ill-conditioned eigenvectors."""
        if t < 0:
            raise DomainError(f"semigroup time must be nonnegative, got {t}")
        if t == 0:
            return np.eye(generator.dim ** 2, dtype=complex)
        try:
            values, vectors = eig(generator.superop)
            condition = np.linalg.cond(vectors)
        except LinAlgError as e:
            raise NumericalError(f"eigendecomposition of the generator failed: {e}") from e
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            self.logging.warning(f"generator eigenvectors ill-conditioned ({condition:.2e}); using expm")
            return expm(t * generator.superop)
        return (vectors * np.exp(t * values)[None, :]) @ np.linalg.inv(vectors)

    def semigroup_apply(self, generator: DaviesGenerator, t: float, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10 or abs(np.trace(rho) - 1) > 1e-10:
            raise ValidationError("semigroup input must be a Hermitian unit-trace matrix")
        evolved = (self.propagator(generator, t) @ rho.reshape(-1)).reshape(rho.shape)
        hermitian = 0.5 * (evolved + evolved.conj().T)
        trace = np.trace(hermitian).real
        correction = max(np.max(np.abs(hermitian - evolved)), abs(trace - 1.0))
        if correction > 1e-12:
            self.logging.info(f"semigroup output corrected by {correction:.2e} at t={t}")
        return hermitian / trace

    # ---- spectral decomposition

    @staticmethod
    def _clusters(values: np.ndarray, tolerance: float) -> List[List[int]]:
        clusters: List[List[int]] = []
        for index in np.argsort(values.real, kind="stable"):
            for cluster in clusters:
                if abs(values[cluster[0]] - values[index]) <= tolerance:
                    cluster.append(int(index))
                    break
            else:
                clusters.append([int(index)])
        return clusters

    @staticmethod
    def _cluster_projector(block: np.ndarray, center: complex, radius: float) -> Tuple[np.ndarray, int]:
        """Riesz projector of `block` for the eigenvalues within `radius` of `center` (Schur + Sylvester)."""
        size = block.shape[0]
        form, unitary, selected = schur(block, output="complex", sort=lambda z: abs(z - center) <= radius)
        if selected == size:
            return np.eye(size, dtype=complex), selected
        top, coupling, bottom = form[:selected, :selected], form[:selected, selected:], form[selected:, selected:]
        shift = solve_sylvester(top, -bottom, -coupling)
        local = np.zeros((size, size), dtype=complex)
        local[:selected, :selected] = np.eye(selected)
        local[:selected, selected:] = -shift
        return unitary @ local @ unitary.conj().T, selected

    def spectral_decomposition(self, generator: DaviesGenerator, simplicity_tolerance: float = 1e-9
                               ) -> SpectralDecomposition:
        """Modes i (e_j + lambda^2 a_j) with projectors, sector by sector."""
        if not generator.shifts:
            raise ValidationError("spectral decomposition needs the level shift operators of the generator")
        dim, lam2 = generator.dim, generator.lam ** 2
        energies = generator.energies
        modes: List[SpectralMode] = []
        simple = True
        conditions = {}
        for shift in generator.shifts:
            index = [m * dim + n for m, n in shift.pairs]
            free = np.array([energies[m] - energies[n] for m, n in shift.pairs])
            block = np.diag(free).astype(complex) + lam2 * shift.matrix
            # sector structure is read from Lambda_e, which does not depend on lambda
            shift_values = eigvals(shift.matrix)
            clusters = self._clusters(shift_values, simplicity_tolerance * max(1.0, np.max(np.abs(shift_values))))
            simple = simple and all(len(cluster) == 1 for cluster in clusters)
            if lam2 == 0:
                clusters = [list(range(shift.size))]
            values = eigvals(block)
            for cluster in clusters:
                target = np.mean(shift_values[cluster])
                center = shift.e + lam2 * target
                others = [abs(target - np.mean(shift_values[c])) for c in clusters if c is not cluster]
                radius = 0.5 * lam2 * min(others) if others else np.inf
                local, selected = self._cluster_projector(block, center, radius)
                if selected != len(cluster):
                    raise NumericalError("spectral clusters could not be separated",
                                         diagnostics={"e": shift.e, "expected": len(cluster), "selected": selected})
                chosen = values[np.abs(values - center) <= radius] if others else values
                a = 0j if lam2 == 0 else complex((np.mean(chosen) - shift.e) / lam2)
                full = np.zeros((dim * dim, dim * dim), dtype=complex)
                full[np.ix_(index, index)] = local
                projector = dualize(full, energies, generator.beta) / 1j
                modes.append(SpectralMode(e=shift.e, a=a, projector=projector, multiplicity=len(cluster)))
            conditions[f"{shift.e:.12g}"] = float(np.linalg.cond(np.linalg.eig(shift.matrix)[1]))
        decomposition = SpectralDecomposition(modes=modes, lam=generator.lam, simple=simple,
                                              diagnostics={"eigenvector_condition": conditions})
        self.logging.info(f"Spectral decomposition: {len(modes)} modes, simple={simple}")
        return decomposition

    # ---- complete positivity

    @staticmethod
    def choi_matrix(generator: DaviesGenerator, propagator: np.ndarray) -> np.ndarray:
        """sum_ij |i><j| (x) Phi(|i><j|) for the channel with superoperator `propagator`."""
        dim = generator.dim
        blocks = propagator.reshape(dim, dim, dim, dim)  # [a, b, i, j]
        return blocks.transpose(2, 0, 3, 1).reshape(dim * dim, dim * dim)

    def check_cptp(self, generator: DaviesGenerator, times: Sequence[float] = (0.01, 0.1, 1.0, 10.0, 100.0),
                   tolerance: float = 1e-8) -> List[CPTPCheck]:
        dim = generator.dim
        checks = []
        for t in times:
            choi = self.choi_matrix(generator, self.propagator(generator, t))
            minimum = float(np.min(np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))))
            reduced = np.einsum("iaja->ij", choi.reshape(dim, dim, dim, dim))
            defect = float(np.max(np.abs(reduced - np.eye(dim))))
            checks.append(CPTPCheck(t=t, min_eigenvalue=minimum, trace_defect=defect,
                                    passed=minimum >= -tolerance and defect <= tolerance))
        failed = [check.t for check in checks if not check.passed]
        if failed:
            self.logging.warning(f"CPTP check failed at t={failed}")
        return checks

    # ---- export

    def export_generator(self, generator: DaviesGenerator, decomposition: Optional[SpectralDecomposition],
                         path: Union[str, Path]) -> Path:
        document = {
            "dim": generator.dim,
            "lambda": generator.lam,
            "beta": generator.beta,
            "energies": generator.energies.tolist(),
            "superop": _complex_pairs(generator.superop),
            "hamiltonian_part": _complex_pairs(generator.hamiltonian_part),
            "dissipative_part": _complex_pairs(generator.dissipative_part),
            "level_shifts": [{"e": shift.e, "pairs": [list(pair) for pair in shift.pairs],
                              "hamiltonian": _complex_pairs(shift.hamiltonian),
                              "dissipative": _complex_pairs(shift.dissipative)} for shift in generator.shifts],
            "modes": [] if decomposition is None else [
                {"e": mode.e, "a": [mode.a.real, mode.a.imag], "multiplicity": mode.multiplicity,
                 "projector": _complex_pairs(mode.projector)} for mode in decomposition.modes],
            "simple": None if decomposition is None else decomposition.simple,
            "provenance": {"model_hash": generator.model_hash, **generator.settings},
        }
        target = atomic_write_text(path, dumps(document, indent=1))
        self.logging.info(f"Generator exported to {target}")
        return target

    @staticmethod
    def load_generator(path: Union[str, Path]) -> DaviesGenerator:
        document = loads(Path(path).read_text(encoding="utf-8"))
        shifts = tuple(LevelShiftOperator(e=item["e"], pairs=tuple(tuple(pair) for pair in item["pairs"]),
                                          hamiltonian=_from_pairs(item["hamiltonian"]),
                                          dissipative=_from_pairs(item["dissipative"]))
                       for item in document["level_shifts"])
        provenance = dict(document["provenance"])
        return DaviesGenerator(lam=document["lambda"], beta=document["beta"], energies=document["energies"],
                               superop=_from_pairs(document["superop"]),
                               hamiltonian_part=_from_pairs(document["hamiltonian_part"]),
                               dissipative_part=_from_pairs(document["dissipative_part"]), shifts=shifts,
                               model_hash=provenance.pop("model_hash", ""), settings=provenance)


def get_davies_core(logger: Optional[LoggerService] = None) -> DaviesCore:
    return DaviesCore(logger)
