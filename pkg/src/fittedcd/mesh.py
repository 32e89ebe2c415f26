"""Piecewise-uniform Shishkin meshes on [0, 1] and their tensor product."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Mesh1D:
    """Shishkin mesh with ``n/2`` cells on ``[0, 1-tau]`` and ``n/2`` on ``[1-tau, 1]``.

    Attributes
    ----------
    n : int
        Number of cells.
    points : ndarray, shape (n + 1,)
        Nodes ``x_0 = 0 < ... < x_n = 1``.
    tau : float
        Width of the fine region next to the outflow end ``x = 1``.
    """

    n: int
    points: np.ndarray
    tau: float
    steps: np.ndarray = field(init=False, repr=False)
    avg_steps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        points.setflags(write=False)
        steps = np.diff(points)
        # steps[0] is a dummy so that steps[i] = x_i - x_{i-1}
        steps = np.concatenate(([np.nan], steps))
        avg = np.full(self.n + 1, np.nan)
        avg[1:-1] = 0.5 * (steps[1:-1] + steps[2:])
        for arr in (steps, avg):
            arr.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "avg_steps", avg)

    @property
    def transition(self) -> float:
        return 1.0 - self.tau

    @property
    def is_uniform(self) -> bool:
        return self.tau == 0.5

    def dump(self) -> str:
        """Lines ``i x_i h_i``; ``h_0`` is written as 0."""
        lines = []
        for i, x in enumerate(self.points):
            h = 0.0 if i == 0 else self.steps[i]
            lines.append(f"{i} {float(x)!r} {float(h)!r}")
        return "\n".join(lines) + "\n"


def transition_parameter(n: int, eps: float, alpha: float) -> float:
    """``min(1/2, 2 (eps/alpha) ln n)``; ties go to the uniform branch."""
    return min(0.5, 2.0 * eps / alpha * math.log(n))


def shishkin_1d(n: int, eps: float, alpha: float) -> Mesh1D:
    """Build the piecewise-uniform Shishkin mesh with ``n`` cells.

    Parameters
    ----------
    n : int
        Even number of cells, at least 4.
    eps : float
        Singular perturbation parameter.
    alpha : float
        Lower bound of the convection coefficient in this direction.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError("n must be an integer")
    if n < 4 or n % 2:
        raise ValueError(f"n must be an even integer >= 4, got {n}")
    if not (eps > 0 and alpha > 0):
        raise ValueError("eps and alpha must be positive")
    n = int(n)
    tau = transition_parameter(n, eps, alpha)
    half = n // 2
    if tau == 0.5:
        points = np.arange(n + 1) / n
    else:
        t = 1.0 - tau
        k = np.arange(half + 1)
        coarse = t * k / half
        fine = t + tau * k[1:] / half
        fine[-1] = 1.0
        points = np.concatenate((coarse, fine))
    return Mesh1D(n=n, points=points, tau=tau)


@dataclass(frozen=True)
class TensorMesh:
    """Tensor product ``mx x my``; node ``(i, j)`` sits at ``(x_i, y_j)``."""

    mx: Mesh1D
    my: Mesh1D

    @property
    def x(self) -> np.ndarray:
        return self.mx.points

    @property
    def y(self) -> np.ndarray:
        return self.my.points

    @property
    def shape(self) -> tuple[int, int]:
        """Node counts ``(nx + 1, ny + 1)``."""
        return (self.mx.n + 1, self.my.n + 1)

    @property
    def interior_shape(self) -> tuple[int, int]:
        return (self.mx.n - 1, self.my.n - 1)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays of shape ``self.shape`` (``ij`` indexing)."""
        return np.meshgrid(self.x, self.y, indexing="ij")


def tensor(mx: Mesh1D, my: Mesh1D) -> TensorMesh:
    return TensorMesh(mx, my)


def shishkin_2d(n: int, eps: float, alpha1: float, alpha2: float, m: int | None = None) -> TensorMesh:
    """Shishkin tensor mesh with ``n`` cells in x and ``m`` (default ``n``) in y."""
    return TensorMesh(shishkin_1d(n, eps, alpha1), shishkin_1d(n if m is None else m, eps, alpha2))
