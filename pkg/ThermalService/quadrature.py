"""Adaptive scalar quadrature with a tolerance check and a widening retry."""
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ConfigService import QUAD_EPSREL, QUAD_LIMIT, QuadratureError

REQUIRED_RELATIVE = 1e-9
ABSOLUTE_FLOOR = 1e-14
ATTEMPTS = 3


def _quad_once(fn: Callable[[float], float], a: float, b: float, limit: int, tolerance: float, floor: float,
               **kwargs) -> float:
    result = quad(fn, a, b, epsabs=floor, epsrel=QUAD_EPSREL, limit=limit, full_output=1, **kwargs)
    value, error = result[0], result[1]
    if not np.isfinite(value) or error > tolerance * abs(value) + floor:
        message = result[3] if len(result) > 3 else "error estimate above tolerance"
        raise QuadratureError("quadrature did not converge",
                              diagnostics={"interval": (a, b), "value": value, "error": error, "limit": limit,
                                           "message": str(message).splitlines()[0]})
    return value


def integrate(fn: Callable[[float], float], a: float, b: float, *, points: Optional[Sequence[float]] = None,
              weight: Optional[str] = None, wvar: Optional[float] = None,
              tolerance: float = REQUIRED_RELATIVE, floor: float = ABSOLUTE_FLOOR) -> float:
    """Integral of a real function over [a, b]; the subdivision limit doubles on every retry."""
    kwargs = {}
    if points is not None:
        inside = sorted({float(p) for p in points if a < p < b})
        if inside:
            kwargs["points"] = inside
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
    limit = QUAD_LIMIT
    for attempt in Retrying(stop=stop_after_attempt(ATTEMPTS), retry=retry_if_exception_type(QuadratureError),
                            reraise=True):
        with attempt:
            value = _quad_once(fn, a, b, limit * 2 ** (attempt.retry_state.attempt_number - 1),
                               tolerance, floor, **kwargs)
    return value


def half_line(fn: Callable[[float], float], breaks: Sequence[float] = (0.0, 1.0, 8.0)) -> float:
    """Integral over [0, inf) split into finite panels plus an infinite tail."""
    edges = list(breaks) + [np.inf]
    return sum(integrate(fn, lo, hi) for lo, hi in zip(edges, edges[1:]))


def full_line(fn: Callable[[float], float], breaks: Sequence[float] = (0.0, 1.0, 8.0)) -> float:
    return half_line(fn, breaks) + half_line(lambda u: fn(-u), breaks)
