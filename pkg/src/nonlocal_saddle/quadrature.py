"""Gauss-Legendre rules and graded panel quadrature for weakly singular integrands."""

from functools import lru_cache

import numpy as np

from .errors import InvalidParameterError


@lru_cache(maxsize=64)
def gauss_rule(order: int):
    """Nodes and weights of the `order`-point Gauss-Legendre rule on [0, 1]."""
    if order < 1:
        raise InvalidParameterError("Gauss order must be >= 1")
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def gauss_points(a: float, b: float, order: int):
    """Gauss nodes and weights on [a, b]."""
    x, w = gauss_rule(order)
    return a + (b - a) * x, (b - a) * w


def integrate_gauss(f, a: float, b: float, order: int) -> float:
    x, w = gauss_points(a, b, order)
    return float(np.dot(w, f(x)))


def graded_panels(upper: float, levels: int = 30, ratio: float = 0.15):
    """Geometric subdivision of (0, upper], refined toward 0.

    Returns panel endpoints descending from `upper`; the leftover interval
    (0, upper * ratio**levels] is dropped, which is negligible for integrands
    vanishing algebraically at 0.
    """
    edges = upper * ratio ** np.arange(levels + 1)
    return edges


def integrate_graded_zero(f, upper: float, order: int,
                          levels: int = 30, ratio: float = 0.15) -> float:
    """Integrate f over (0, upper] with geometric grading toward the origin.

    Intended for integrands with an integrable algebraic singularity (or a
    fractional-power zero) at 0; the geometric panels give near-exponential
    convergence regardless of the exponent.
    """
    edges = graded_panels(upper, levels=levels, ratio=ratio)
    total = 0.0
    for lo, hi in zip(edges[1:], edges[:-1]):
        total += integrate_gauss(f, lo, hi, order)
    return total
