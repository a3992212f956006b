"""Thermally weighted spectral densities on the full line and their Plemelj integrals.

    r_v(x0) = lim int v(u) / (u - x0 + i0) du = PV int v(u) / (u - x0) du - i pi v(x0)
"""
from typing import Dict, Literal, Tuple

import numpy as np

from ModelService import FormFactor, spectral_density
from ThermalService import integrate

WeightKind = Literal["direct", "half", "full"]
PV_FLOOR = 1e-13


class ThermalWeight:
    """w(u) = (2/pi) J(|u|) / |1 - exp(-beta u)| and the variants w exp(-beta u / 2), w exp(-beta u)."""

    def __init__(self, ff: FormFactor, beta: float):
        self.ff = ff
        self.beta = beta
        # all three variants behave like (2/pi) J(|u|) / (beta |u|) at the origin
        if abs(ff.p + 0.5) < 1e-12:
            self.origin = float(np.abs(ff.amplitude) ** 2 * ff.profile.value(0.0) ** 2 * ff.angular_overlap(ff)
                                / beta)
        else:
            self.origin = 0.0

    def __call__(self, kind: WeightKind, u):
        u = np.asarray(u, dtype=float)
        r = np.abs(u)
        density = (2.0 / np.pi) * np.asarray(spectral_density(self.ff, r))
        x = self.beta * r
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            occupation = 1.0 / np.expm1(x)
            if kind == "direct":
                factor = np.where(u > 0, 1.0 + occupation, occupation)
            elif kind == "half":
                factor = 0.5 / np.sinh(0.5 * x)
            elif kind == "full":
                factor = np.where(u > 0, occupation, 1.0 + occupation)
            else:
                raise ValueError(f"unknown weight kind {kind}")
            value = density * factor
        return np.where(r == 0, self.origin, value)


class PlemeljIntegrals:
    """Cached (principal value, v(x0)) pairs for the three thermal weights."""

    def __init__(self, weight: ThermalWeight, floor: float = PV_FLOOR):
        self.weight = weight
        self.floor = floor
        self._cache: Dict[Tuple[str, float], Tuple[float, float]] = {}

    def principal_value(self, kind: WeightKind, x0: float) -> float:
        """Subtraction form on an interval enclosing x0 and the origin, plus the two tails."""
        v = lambda u: float(self.weight(kind, u))
        at_pole = v(x0)
        span = max(1.0, abs(x0))
        a, b = min(x0, 0.0) - span, max(x0, 0.0) + span
        inner = integrate(lambda u: (v(u) - at_pole) / (u - x0), a, b, points=[x0, 0.0], floor=self.floor)
        log_term = at_pole * np.log((b - x0) / (x0 - a))
        right = integrate(lambda u: v(u) / (u - x0), b, np.inf, floor=self.floor)
        left = integrate(lambda u: v(u) / (u - x0), -np.inf, a, floor=self.floor)
        return inner + log_term + right + left

    def resolve(self, kind: WeightKind, x0: float) -> Tuple[float, float]:
        key = (kind, round(float(x0), 12))
        if key not in self._cache:
            self._cache[key] = (self.principal_value(kind, x0), float(self.weight(kind, x0)))
        return self._cache[key]

    def __call__(self, kind: WeightKind, x0: float) -> complex:
        pv, at_pole = self.resolve(kind, x0)
        return complex(pv, -np.pi * at_pole)

    def __len__(self) -> int:
        return len(self._cache)
