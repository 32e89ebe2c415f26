"""Bilinear interpolation, global errors, double-mesh differences and orders."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import TensorMesh, shishkin_2d
from .problem import ProblemSpec
from .scheme import GridFunction

log = logging.getLogger(__name__)

DEFAULT_BENCH_N = 2048

#: ``"interpolant"`` compares against the bilinear interpolant of ``u`` on
#: the computational mesh, ``"exact"`` against ``u`` itself.
REFERENCES = ("interpolant", "exact")


def locate(points: np.ndarray, q) -> tuple[np.ndarray, np.ndarray]:
    """Cell index ``i`` (right-closed cells, ``x = 0`` in cell 1) and local coordinate.

    Returns ``(i, t)`` with ``q = (1 - t) x_{i-1} + t x_i``.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q < points[0]) or np.any(q > points[-1]) or not np.all(np.isfinite(q)):
        raise ValueError("evaluation point outside [0, 1]")
    n = len(points) - 1
    i = np.clip(np.searchsorted(points, q, side="left"), 1, n)
    t = (q - points[i - 1]) / (points[i] - points[i - 1])
    return i, t


def bilinear_eval(mesh: TensorMesh, g: GridFunction | np.ndarray, x, y):
    """Bilinear interpolant of nodal values at the points ``(x, y)`` (broadcast)."""
    values = g.values if isinstance(g, GridFunction) else np.asarray(g, dtype=float)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    i, s = locate(mesh.x, x)
    j, t = locate(mesh.y, y)
    out = (
        (1 - s) * (1 - t) * values[i - 1, j - 1]
        + s * (1 - t) * values[i, j - 1]
        + (1 - s) * t * values[i - 1, j]
        + s * t * values[i, j]
    )
    return float(out) if out.ndim == 0 else out


def interpolate_to_grid(mesh: TensorMesh, values: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear interpolant on the tensor grid ``xs x ys``, shape ``(len(xs), len(ys))``.

    Uses the separable structure: interpolate along x first, then along y.
    """
    i, s = locate(mesh.x, xs)
    j, t = locate(mesh.y, ys)
    along_x = (1 - s)[:, None] * values[i - 1, :] + s[:, None] * values[i, :]
    return along_x[:, j - 1] * (1 - t) + along_x[:, j] * t


def bench_mesh(problem: ProblemSpec, bench_n: int = DEFAULT_BENCH_N) -> TensorMesh:
    """Fine Shishkin mesh for the same ``eps`` and layer constants as ``problem``."""
    return shishkin_2d(bench_n, problem.eps, problem.alpha1, problem.alpha2)


def _reference_values(problem, mesh, bench, reference):
    if reference == "exact":
        X, Y = bench.grid()
        return problem.exact(X, Y)
    X, Y = mesh.grid()
    return interpolate_to_grid(mesh, problem.exact(X, Y), bench.x, bench.y)


def global_error(
    U: GridFunction,
    mesh: TensorMesh | None = None,
    problem: ProblemSpec | None = None,
    bench_n: int = DEFAULT_BENCH_N,
    reference: str = "interpolant",
) -> float:
    """Maximum of ``|U_BL - u_ref|`` over the nodes of the benchmark Shishkin mesh.

    With ``reference="interpolant"`` (default) ``u_ref`` is the bilinear
    interpolant of the exact solution on ``mesh``, which makes the measure
    the maximum nodal error; with ``reference="exact"`` it is the exact
    solution itself, which adds the interpolation error of ``u``.
    """
    mesh = mesh or U.mesh
    problem = problem or U.problem
    if problem is None or problem.exact is None:
        raise ValueError("global_error needs a problem with an exact solution")
    if reference not in REFERENCES:
        raise ValueError(f"reference must be one of {REFERENCES}")
    bench = bench_mesh(problem, bench_n)
    approx = interpolate_to_grid(mesh, U.values, bench.x, bench.y)
    ref = _reference_values(problem, mesh, bench, reference)
    return float(np.abs(approx - ref).max())


def double_mesh_diff(
    U_N: GridFunction,
    U_2N: GridFunction,
    bench_n: int = DEFAULT_BENCH_N,
    grid: str = "union",
) -> float:
    """``max |U_N - U_2N|`` of the two bilinear interpolants.

    ``grid="union"`` takes the maximum over the nodes of both meshes,
    ``grid="bench"`` over the benchmark Shishkin mesh with ``bench_n`` cells.
    """
    p, q = U_N.problem, U_2N.problem
    if p is not None and q is not None and (p.label != q.label or p.eps != q.eps):
        raise ValueError("double-mesh difference needs solutions of the same problem and eps")
    if U_N.variant is not None and U_2N.variant is not None and U_N.variant != U_2N.variant:
        raise ValueError("double-mesh difference needs solutions of the same scheme")
    if grid == "union":
        xs = np.union1d(U_N.mesh.x, U_2N.mesh.x)
        ys = np.union1d(U_N.mesh.y, U_2N.mesh.y)
    elif grid == "bench":
        problem = p or q
        if problem is None:
            raise ValueError("the benchmark mesh needs the solutions' problem")
        bench = bench_mesh(problem, bench_n)
        xs, ys = bench.x, bench.y
    else:
        raise ValueError(f"grid must be 'union' or 'bench', got {grid!r}")
    a = interpolate_to_grid(U_N.mesh, U_N.values, xs, ys)
    b = interpolate_to_grid(U_2N.mesh, U_2N.values, xs, ys)
    return float(np.abs(a - b).max())


def orders(errors: dict[int, float]) -> dict[int, float]:
    """``p^N = log2(E^N / E^{2N})`` wherever both entries exist and are positive."""
    out = {}
    for n, e in sorted(errors.items()):
        e2 = errors.get(2 * n)
        if e2 is None:
            continue
        if not (e > 0 and e2 > 0):
            log.warning("skipping order at N=%d: non-positive entries (%r, %r)", n, e, e2)
            continue
        out[n] = math.log2(e / e2)
    return out


@dataclass
class ErrorTable:
    """Cells ``(eps_exp, N) -> value`` where ``eps = 2**-eps_exp``.

    ``kind`` is ``"error"`` for global errors and ``"diff"`` for
    double-mesh differences.
    """

    problem: str
    variant: str
    kind: str = "error"
    cells: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("error", "diff"):
            raise ValueError("kind must be 'error' or 'diff'")

    def __setitem__(self, key, value):
        if not value >= 0:
            raise ValueError(f"table entries must be non-negative, got {value!r}")
        self.cells[(int(key[0]), int(key[1]))] = float(value)

    def __getitem__(self, key):
        return self.cells[key]

    @property
    def eps_exps(self) -> list[int]:
        return sorted({k for k, _ in self.cells})

    @property
    def n_values(self) -> list[int]:
        return sorted({n for _, n in self.cells})

    def row(self, eps_exp: int) -> dict[int, float]:
        return {n: v for (k, n), v in sorted(self.cells.items()) if k == eps_exp}

    def orders(self) -> dict[tuple[int, int], float]:
        out = {}
        for k in self.eps_exps:
            for n, p in orders(self.row(k)).items():
                out[(k, n)] = p
        return out


def uniform_row(table: ErrorTable) -> tuple[dict[int, float], dict[int, float]]:
    """Per-N maximum over eps and the orders of that sequence.

    Only N values present for every eps of the table enter the row.
    """
    values = {}
    exps = table.eps_exps
    for n in table.n_values:
        col = [table.cells.get((k, n)) for k in exps]
        if all(v is not None for v in col):
            values[n] = max(col)
    return values, orders(values)
