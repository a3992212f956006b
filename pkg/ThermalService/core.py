from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import linregress

from ConfigService import ComplexityError, DomainError
from LoggerService import LoggerService, LoggedService
from ModelService import FormFactor, RadialFunction, TestFunction, sphere_rule
from .models import ContinuumMeasure, DiscreteMeasure, PolynomialWord
from .quadrature import half_line, integrate

Measure = Union[ContinuumMeasure, DiscreteMeasure]
MAX_WORD_LENGTH = 12
MIN_FIT_SAMPLES = 8


def bose_occupation(u):
    """n(u) = 1 / (exp(u) - 1) for u > 0, written with expm1."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return 1.0 / np.expm1(u)


def coth_half(beta: float, u):
    """coth(beta u / 2) = 1 + 2 n(beta u)."""
    return 1.0 + 2.0 * bose_occupation(beta * np.asarray(u, dtype=float))


def _check_beta(beta: float):
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")


class ThermalCore(LoggedService):
    """Expectations in the quasi-free thermal state of the reservoir."""

    def __init__(self, logger: Optional[LoggerService] = None, max_word_length: int = MAX_WORD_LENGTH):
        super().__init__(logger)
        self.max_word_length = max_word_length

    # ---- inner products <g, h(|k|) f>

    @staticmethod
    def weighted_inner(g: RadialFunction, f: RadialFunction, weight: Callable, measure: Optional[Measure] = None
                       ) -> complex:
        """integral of conj(g(k)) h(|k|) f(k) d^3k for a radial weight h."""
        measure = measure or ContinuumMeasure()
        if isinstance(measure, DiscreteMeasure):
            return complex(np.sum(np.conj(measure.coefficients(g)) * weight(measure.frequencies)
                                  * measure.coefficients(f)))
        radial = half_line(lambda u: u * u * g.radial(u) * f.radial(u) * weight(u), measure.breaks)
        return complex(np.conj(g.amplitude) * f.amplitude * g.angular_overlap(f) * radial)

    def inner(self, g: RadialFunction, f: RadialFunction, measure: Optional[Measure] = None) -> complex:
        return self.weighted_inner(g, f, np.ones_like, measure)

    def two_point(self, f: TestFunction, g: TestFunction, beta: float, measure: Optional[Measure] = None) -> complex:
        """omega(a*(f) a(g)) = <g, n f> with n = 1 / (exp(beta |k|) - 1)."""
        _check_beta(beta)
        return self.weighted_inner(g, f, lambda u: bose_occupation(beta * u), measure)

    def coth_form(self, f: RadialFunction, beta: float, measure: Optional[Measure] = None) -> float:
        """<f, coth(beta |k| / 2) f>."""
        _check_beta(beta)
        return float(np.real(self.weighted_inner(f, f, lambda u: coth_half(beta, u), measure)))

    def weyl_expectation(self, f: RadialFunction, beta: float, measure: Optional[Measure] = None) -> float:
        """omega(W(f)) = exp(-<f, coth(beta |k| / 2) f> / 4)."""
        if f.amplitude == 0:
            return 1.0
        return float(np.exp(-0.25 * self.coth_form(f, beta, measure)))

    # ---- Wick

    @staticmethod
    def _pairings(kinds: Sequence[str], remaining: Tuple[int, ...]) -> Iterator[List[Tuple[int, int]]]:
        if not remaining:
            yield []
            return
        first, rest = remaining[0], remaining[1:]
        for position, partner in enumerate(rest):
            if kinds[partner] == kinds[first]:
                continue
            for tail in ThermalCore._pairings(kinds, rest[:position] + rest[position + 1:]):
                yield [(first, partner)] + tail

    def _check_length(self, word: PolynomialWord):
        if len(word) > self.max_word_length:
            raise ComplexityError(f"word of length {len(word)} exceeds the maximum {self.max_word_length}")

    def count_pairings(self, word: PolynomialWord) -> int:
        """Number of creator/annihilator pairings enumerated for the word."""
        self._check_length(word)
        if len(word) % 2:
            return 0
        kinds = [factor.kind for factor in word.factors]
        return sum(1 for _ in self._pairings(kinds, tuple(range(len(kinds)))))

    def wick_expectation(self, word: PolynomialWord, beta: float, measure: Optional[Measure] = None) -> complex:
        """omega of an ordered polynomial word: sum over pairings of products of ordered contractions.

        <a*(f) a(g)> = <g, n f> and <a(g) a*(f)> = <g, (1 + n) f>; a a and a* a* contractions vanish.
        """
        _check_beta(beta)
        self._check_length(word)
        if not word.factors:
            return complex(word.scalar)
        if len(word) % 2 or not word.balanced:
            return 0j

        cache = {}

        def contraction(i: int, j: int) -> complex:
            if (i, j) not in cache:
                left, right = word.factors[i], word.factors[j]
                if left.kind == "create":
                    cache[(i, j)] = self.two_point(left.function, right.function, beta, measure)
                else:
                    cache[(i, j)] = self.weighted_inner(left.function, right.function,
                                                        lambda u: coth_half(beta, u) / 2.0 + 0.5, measure)
            return cache[(i, j)]

        kinds = [factor.kind for factor in word.factors]
        total = 0j
        count = 0
        for pairing in self._pairings(kinds, tuple(range(len(kinds)))):
            term = 1.0 + 0j
            for i, j in pairing:
                term *= contraction(i, j)
            total += term
            count += 1
        self.logging.info(f"Wick expectation of a length-{len(word)} word: {count} pairings")
        return complex(word.scalar) * total

    # ---- gluing

    @staticmethod
    def glue(f: RadialFunction, beta: float, u, direction=(0.0, 0.0, 1.0)):
        """(tau_beta f)(u, Sigma) on R x S^2; u = 0 returns the continuous limit."""
        _check_beta(beta)
        u = np.asarray(u, dtype=float)
        cos_theta = np.asarray(direction, dtype=float)[..., 2]
        r = np.abs(u)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            thermal = np.sqrt(np.where(u == 0, 1.0 / beta, u / -np.expm1(-beta * u)))
            scaled = np.sqrt(r) * f.radial(r)
        if abs(f.p + 0.5) < 1e-12:
            origin = f.profile.value(0.0)
        else:
            origin = 0.0
        scaled = np.where(r == 0, origin, scaled)
        angular = f.angular(cos_theta)
        value = np.where(u >= 0, f.amplitude, -np.conj(f.amplitude)) * thermal * scaled * angular
        return value

    def gluing_norm(self, f: RadialFunction, beta: float, order: int = 26) -> float:
        """integral over R x S^2 of |tau_beta f|^2, evaluated from `glue` itself."""
        nodes, weights = sphere_rule(order)

        def integrand(u):
            return 4.0 * np.pi * float(np.sum(weights * np.abs(self.glue(f, beta, u, nodes)) ** 2))

        return half_line(integrand) + half_line(lambda u: integrand(-u))

    # ---- reservoir correlation

    def reservoir_autocorrelation(self, ff: FormFactor, beta: float, t: float, measure: Optional[Measure] = None
                                  ) -> complex:
        """C(t) = 1/2 integral |g(k)|^2 [coth(beta |k| / 2) cos(|k| t) - i sin(|k| t)] d^3k."""
        _check_beta(beta)
        if t < 0:
            return complex(np.conj(self.reservoir_autocorrelation(ff, beta, -t, measure)))
        measure = measure or ContinuumMeasure()
        if isinstance(measure, DiscreteMeasure):
            weights = np.abs(measure.coefficients(ff)) ** 2
            omega = measure.frequencies
            return complex(0.5 * np.sum(weights * (coth_half(beta, omega) * np.cos(omega * t)
                                                   - 1j * np.sin(omega * t))))
        scale = 0.5 * np.abs(ff.amplitude) ** 2 * ff.angular_overlap(ff)

        def density(u):
            return u * u * ff.radial(u) ** 2

        if t == 0:
            return complex(scale * half_line(lambda u: density(u) * coth_half(beta, u), measure.breaks))
        # Fourier-weighted quadrature over [0, inf); the coth factor is integrable at the origin
        real = integrate(lambda u: density(u) * coth_half(beta, u), 0.0, np.inf, weight="cos", wvar=t,
                         tolerance=1e-7, floor=1e-12)
        imag = integrate(density, 0.0, np.inf, weight="sin", wvar=t, tolerance=1e-7, floor=1e-12)
        return complex(scale * real, -scale * imag)

    @staticmethod
    def fit_power_law(series: Sequence[Tuple[float, float]], window: Tuple[float, float]) -> Tuple[float, float]:
        """Slope of log|value| against log t inside the window, and the r^2 of the fit."""
        points = np.array([(t, v) for t, v in series if window[0] <= t <= window[1]], dtype=float)
        if len(points) < MIN_FIT_SAMPLES:
            raise DomainError(f"power-law fit needs at least {MIN_FIT_SAMPLES} samples in {window}, "
                              f"got {len(points)}")
        if np.any(points[:, 0] <= 0) or np.any(points[:, 1] <= 0):
            raise DomainError("power-law fit needs positive times and values in the window")
        fit = linregress(np.log(points[:, 0]), np.log(points[:, 1]))
        return float(fit.slope), float(fit.rvalue ** 2)


def get_thermal_core(logger: Optional[LoggerService] = None) -> ThermalCore:
    return ThermalCore(logger)
