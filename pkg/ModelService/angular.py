"""Fully symmetric quadrature rules on the unit sphere (Lebedev orders 6, 14, 26).

Weights sum to one; multiply by 4*pi for the surface integral.
"""
from functools import lru_cache
from itertools import product
from typing import Tuple

import numpy as np

_AXES = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
_CORNERS = np.array(list(product((1, -1), repeat=3)), dtype=float) / np.sqrt(3.0)
_EDGES = np.array([v for v in product((1, -1, 0), repeat=3) if sum(abs(c) for c in v) == 2], dtype=float) / np.sqrt(2.0)


@lru_cache(maxsize=None)
def sphere_rule(order: int = 26) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes (n, 3) and weights (n,) of the requested Lebedev rule."""
    if order == 6:
        return _AXES, np.full(6, 1.0 / 6.0)
    if order == 14:
        return np.vstack([_AXES, _CORNERS]), np.concatenate([np.full(6, 1.0 / 15.0), np.full(8, 3.0 / 40.0)])
    if order == 26:
        nodes = np.vstack([_AXES, _EDGES, _CORNERS])
        weights = np.concatenate([np.full(6, 1.0 / 21.0), np.full(12, 4.0 / 105.0), np.full(8, 9.0 / 280.0)])
        return nodes, weights
    raise ValueError(f"unsupported sphere rule order {order}; use 6, 14 or 26")


def sphere_integral(values: np.ndarray, order: int = 26) -> complex:
    """Surface integral over S^2 of values sampled at the nodes of `sphere_rule(order)`."""
    _, weights = sphere_rule(order)
    return 4.0 * np.pi * np.sum(weights * values)
