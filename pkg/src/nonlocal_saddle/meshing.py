"""Uniform 1-D meshes with hat basis functions pinned to zero on the boundary."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of (a, b) into n_elements intervals.

    Degrees of freedom are the interior nodes; the boundary values are
    pinned to zero, realizing the zero extension outside the domain.
    """

    a: float
    b: float
    n_elements: int
    nodes: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_elements

    @property
    def interior_count(self) -> int:
        return self.n_elements - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    def element(self, e: int) -> tuple[float, float]:
        return float(self.nodes[e]), float(self.nodes[e + 1])


def build_uniform_mesh(a: float, b: float, n_elements: int) -> Mesh:
    if not a < b:
        raise InvalidParameterError(f"need a < b, got a={a}, b={b}")
    if n_elements < 2:
        raise InvalidParameterError(f"need at least 2 elements, got {n_elements}")
    nodes = np.linspace(a, b, n_elements + 1)
    return Mesh(a=float(a), b=float(b), n_elements=int(n_elements), nodes=nodes)


def interpolate(mesh: Mesh, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the piecewise-linear interpolant with zero boundary values."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (mesh.interior_count,):
        raise InvalidParameterError(
            f"expected {mesh.interior_count} interior coefficients, "
            f"got shape {coeffs.shape}")
    full = np.concatenate(([0.0], coeffs, [0.0]))
    return np.interp(x, mesh.nodes, full)
