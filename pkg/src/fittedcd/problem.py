"""Convection-diffusion problems ``-eps Lap u + a.grad u + b u = f`` on the unit square.

Coefficient callables take broadcastable numpy arrays ``(x, y)`` and must be
pure. Boundary data is homogeneous Dirichlet throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .mesh import TensorMesh
from .numerics import scaled_ratio

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


def constant(value: float) -> Field:
    def field(x, y):
        return np.full(np.broadcast(x, y).shape, float(value))

    field.constant_value = float(value)
    return field


@dataclass(frozen=True)
class ProblemSpec:
    """Problem data.

    ``alpha1`` and ``alpha2`` are positive lower bounds of ``a1`` and ``a2``
    and set the Shishkin transition points. ``exact`` is optional.
    """

    eps: float
    a1: Field
    a2: Field
    b: Field
    f: Field
    alpha1: float
    alpha2: float
    exact: Optional[Field] = None
    label: str = "custom"

    def __post_init__(self):
        if not (0.0 < self.eps <= 1.0):
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise ValueError("alpha1 and alpha2 must be positive")

    def check_on_mesh(self, mesh: TensorMesh) -> None:
        """Check the pointwise assumptions at the mesh nodes.

        Raises ``ValueError`` if ``b < 0``, ``a1 < alpha1`` or ``a2 < alpha2``
        somewhere, or if the exact solution does not vanish on the boundary.
        """
        X, Y = mesh.grid()
        if np.any(self.b(X, Y) < 0):
            raise ValueError("reaction coefficient b is negative on the mesh")
        if np.any(self.a1(X, Y) < self.alpha1) or np.any(self.a2(X, Y) < self.alpha2):
            raise ValueError("convection coefficient below its stated lower bound")
        if self.exact is not None:
            u = self.exact(X, Y)
            edges = np.concatenate((u[0], u[-1], u[:, 0], u[:, -1]))
            if np.max(np.abs(edges)) > 1e-12:
                raise ValueError("exact solution does not vanish on the boundary")


@dataclass(frozen=True)
class CellData:
    """Piecewise-constant data on the cells of a tensor mesh.

    Arrays have the node shape ``(nx + 1, ny + 1)``. ``abar1[i, j]`` is the
    value of the averaged ``a1`` on the segment ``(x_{i-1}, x_i] x {y_j}``,
    ``abar2[i, j]`` the averaged ``a2`` on ``{x_i} x (y_{j-1}, y_j]`` and
    ``fbar[i, j]`` the corner mean of ``f`` on cell ``[x_{i-1}, x_i] x [y_{j-1}, y_j]``.
    Index 0 along the averaged direction copies index 1.
    """

    abar1: np.ndarray
    abar2: np.ndarray
    fbar: np.ndarray
    bnode: np.ndarray


def average_data(problem: ProblemSpec, mesh: TensorMesh) -> CellData:
    X, Y = mesh.grid()
    a1 = problem.a1(X, Y)
    a2 = problem.a2(X, Y)
    f = problem.f(X, Y)

    abar1 = np.empty_like(a1)
    abar1[1:, :] = 0.5 * (a1[:-1, :] + a1[1:, :])
    abar1[0, :] = abar1[1, :]
    abar1[:, 0] = abar1[:, 1]

    abar2 = np.empty_like(a2)
    abar2[:, 1:] = 0.5 * (a2[:, :-1] + a2[:, 1:])
    abar2[:, 0] = abar2[:, 1]
    abar2[0, :] = abar2[1, :]

    fbar = np.empty_like(f)
    fbar[1:, 1:] = 0.25 * (f[:-1, :-1] + f[:-1, 1:] + f[1:, :-1] + f[1:, 1:])
    fbar[0, :] = fbar[1, :]
    fbar[:, 0] = fbar[:, 1]

    return CellData(abar1=abar1, abar2=abar2, fbar=fbar, bnode=problem.b(X, Y))


def _check_eps(eps):
    if not (0.0 < eps <= 1.0):
        raise ValueError(f"eps must lie in (0, 1], got {eps}")


def example1(eps: float) -> ProblemSpec:
    """Constant coefficients ``2 u_x + 3 u_y`` with a known exact solution.

    ``u = g(x) h(y) + sin(pi x) sin(pi y)`` where ``g(x) = x - r(x; 2)``,
    ``h(y) = y - r(y; 3)`` and ``r(t; beta) = (e^{beta t/eps} - 1)/(e^{beta/eps} - 1)``.
    Since ``-eps g'' + 2 g' = 2`` and ``-eps h'' + 3 h' = 3`` the source
    needs no layer exponentials.
    """
    _check_eps(eps)
    pi = np.pi

    def g(x):
        return x - scaled_ratio(x, 2.0, eps)

    def h(y):
        return y - scaled_ratio(y, 3.0, eps)

    def exact(x, y):
        return g(x) * h(y) + np.sin(pi * x) * np.sin(pi * y)

    def f(x, y):
        sx, sy = np.sin(pi * x), np.sin(pi * y)
        return (
            2.0 * h(y)
            + 3.0 * g(x)
            + 2.0 * eps * pi**2 * sx * sy
            + 2.0 * pi * np.cos(pi * x) * sy
            + 3.0 * pi * sx * np.cos(pi * y)
        )

    return ProblemSpec(
        eps=eps,
        a1=constant(2.0),
        a2=constant(3.0),
        b=constant(0.0),
        f=f,
        alpha1=2.0,
        alpha2=3.0,
        exact=exact,
        label="example1",
    )


def example2(eps: float) -> ProblemSpec:
    """Variable convection, source ``16 x(1-x) y(1-y)``; no exact solution."""
    _check_eps(eps)

    def a1(x, y):
        return 2.0 + x + x**2 + 3.0 * x * y

    def a2(x, y):
        return 3.0 + y + y**2 + 2.0 * x * y

    def f(x, y):
        return 16.0 * x * (1.0 - x) * y * (1.0 - y)

    return ProblemSpec(
        eps=eps,
        a1=a1,
        a2=a2,
        b=constant(0.0),
        f=f,
        alpha1=2.0,
        alpha2=3.0,
        label="example2",
    )


def layer_test_problem(eps: float, a1c: float = 2.0, a2c: float = 3.0) -> ProblemSpec:
    """Homogeneous constant-coefficient problem used for exactness checks."""
    if not (a1c > 0 and a2c > 0):
        raise ValueError("convection constants must be positive")
    return ProblemSpec(
        eps=eps,
        a1=constant(a1c),
        a2=constant(a2c),
        b=constant(0.0),
        f=constant(0.0),
        alpha1=float(a1c),
        alpha2=float(a2c),
        label="layer-test",
    )


PROBLEMS = {
    "example1": example1,
    "example2": example2,
    "layer-test": layer_test_problem,
}


def make_problem(label: str, eps: float) -> ProblemSpec:
    try:
        factory = PROBLEMS[label]
    except KeyError:
        raise ValueError(f"unknown problem {label!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(eps)
