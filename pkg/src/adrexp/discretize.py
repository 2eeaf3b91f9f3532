"""Finite-difference directional operators on tensor-product grids.

Each direction gets an ``n x n`` matrix discretizing

    delta * d^2/dx^2 - alpha * d/dx

with second order centered differences on ``n`` equispaced nodes that include
both endpoints. Homogeneous Neumann conditions are imposed by eliminating the
mirrored ghost node (``u_0 = u_2``, ``u_{n+1} = u_{n-1}``), which folds the
boundary condition into the first and last rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

__all__ = ["GridSpec", "OperatorRecipe", "build_directional_operator", "build_grid",
           "grid_spacing"]


@dataclass(frozen=True)
class GridSpec:
    """Box ``[a_1, b_1] x ... x [a_d, b_d]`` sampled with ``points[mu]`` nodes per axis."""

    intervals: Tuple[Tuple[float, float], ...]
    points: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals",
                           tuple((float(a), float(b)) for a, b in self.intervals))
        object.__setattr__(self, "points", tuple(int(n) for n in self.points))
        if len(self.intervals) != len(self.points):
            raise ValueError("need one point count per interval")
        for a, b in self.intervals:
            if not b > a:
                raise ValueError(f"empty interval [{a}, {b}]")
        for n in self.points:
            if n < 2:
                raise ValueError(f"need at least 2 nodes per axis, got {n}")

    @property
    def d(self) -> int:
        return len(self.points)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @classmethod
    def uniform(cls, interval: Tuple[float, float], n: int, d: int) -> "GridSpec":
        return cls(intervals=(tuple(interval),) * d, points=(n,) * d)


@dataclass(frozen=True)
class OperatorRecipe:
    """Diffusion coefficient `delta` and advection speed `alpha` (for ``-alpha d/dx``)."""

    delta: float
    alpha: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.delta) and np.isfinite(self.alpha)):
            raise ValueError("operator coefficients must be finite")
        if self.delta < 0:
            raise ValueError(f"diffusion coefficient must be >= 0, got {self.delta}")


def grid_spacing(interval: Sequence[float], n: int) -> float:
    a, b = interval
    return (b - a) / (n - 1)


def build_directional_operator(interval: Sequence[float], n: int,
                               recipe: OperatorRecipe) -> np.ndarray:
    """Dense ``n x n`` diffusion-advection matrix with embedded Neumann rows."""
    if n < 3:
        raise ValueError(f"need at least 3 nodes, got {n}")
    if not (np.isfinite(recipe.delta) and np.isfinite(recipe.alpha)):
        raise ValueError("operator coefficients must be finite")
    h = grid_spacing(interval, n)
    dif = recipe.delta / h ** 2
    adv = recipe.alpha / (2.0 * h)
    A = np.zeros((n, n))
    i = np.arange(1, n - 1)
    A[i, i - 1] = dif + adv
    A[i, i] = -2.0 * dif
    A[i, i + 1] = dif - adv
    # ghost nodes mirrored: the centered first difference vanishes at both ends
    A[0, 0], A[0, 1] = -2.0 * dif, 2.0 * dif
    A[-1, -2], A[-1, -1] = 2.0 * dif, -2.0 * dif
    return A


def build_grid(spec: GridSpec) -> List[np.ndarray]:
    """Per-axis node coordinates, endpoints included."""
    return [np.linspace(a, b, n) for (a, b), n in zip(spec.intervals, spec.points)]
