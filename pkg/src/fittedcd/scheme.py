"""Lumped five-point stencils for the fitted Petrov-Galerkin schemes.

At an interior node ``(i, j)`` the fitted schemes read::

    aW U[i-1,j] + aE U[i+1,j] + aS U[i,j-1] + aN U[i,j+1] + aC U[i,j]
        = sum_{n,m} gamma[n,m] f(x_n, y_m)

with ``aW = Rx- QyC``, ``aE = Rx+ QyC``, ``aS = Ry- QxC``, ``aN = Ry+ QxC``,
``R-`` and ``R+`` built from the fitting factor :func:`~fittedcd.numerics.sigma`
and ``gamma = (1/4) outer(Qy, Qx)`` with ``Q = (Q-, Q- + Q+, Q+)``.
The ``Q`` integrals depend on the choice of test function.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .mesh import TensorMesh
from .numerics import kernel_a, kernel_b, sigma
from .problem import CellData, ProblemSpec, average_data


class AssemblyError(ValueError):
    """Raised when the data are not admissible for the requested scheme."""


class SchemeVariant(str, enum.Enum):
    LSTAR_TEST = "lstar"  # L*-spline test functions, bilinear trial
    L_TEST = "l"  # L-spline test functions, bilinear trial
    HAT_TEST = "hat"  # hat test functions, L-spline trial
    FITTED_FD = "fitted-fd"  # fitted finite differences, Q+- = 0
    UPWIND = "upwind"  # classical first-order upwinding

    @property
    def petrov_galerkin(self) -> bool:
        return self in (SchemeVariant.LSTAR_TEST, SchemeVariant.L_TEST, SchemeVariant.HAT_TEST)

    @property
    def fitted(self) -> bool:
        return self is not SchemeVariant.UPWIND

    @classmethod
    def parse(cls, value) -> "SchemeVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown scheme variant {value!r}; choose from {names}") from None


FITTED_VARIANTS = tuple(v for v in SchemeVariant if v.fitted)
PETROV_GALERKIN_VARIANTS = tuple(v for v in SchemeVariant if v.petrov_galerkin)


@dataclass(frozen=True)
class GridFunction:
    """Nodal values ``values[i, j] = U(x_i, y_j)`` on ``mesh``.

    ``problem`` and ``variant`` are optional provenance used to guard
    comparisons between solutions.
    """

    mesh: TensorMesh
    values: np.ndarray
    problem: Optional[ProblemSpec] = field(default=None, compare=False)
    variant: Optional[SchemeVariant] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.mesh.shape:
            raise ValueError(f"values have shape {values.shape}, mesh expects {self.mesh.shape}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, mesh: TensorMesh, func, **meta) -> "GridFunction":
        X, Y = mesh.grid()
        return cls(mesh, func(X, Y), **meta)

    @classmethod
    def zeros(cls, mesh: TensorMesh, **meta) -> "GridFunction":
        return cls(mesh, np.zeros(mesh.shape), **meta)

    @property
    def interior(self) -> np.ndarray:
        return self.values[1:-1, 1:-1]


class StencilFactors(NamedTuple):
    """Per-node one-dimensional factors, each of interior shape ``(nx-1, ny-1)``."""

    rxm: np.ndarray
    rxp: np.ndarray
    rym: np.ndarray
    ryp: np.ndarray
    qxm: np.ndarray
    qxc: np.ndarray
    qxp: np.ndarray
    qym: np.ndarray
    qyc: np.ndarray
    qyp: np.ndarray

    def gamma(self) -> dict[tuple[int, int], np.ndarray]:
        """Right-hand side weights keyed by the offset ``(di, dj)``."""
        qx = {-1: self.qxm, 0: self.qxc, 1: self.qxp}
        qy = {-1: self.qym, 0: self.qyc, 1: self.qyp}
        return {(di, dj): 0.25 * qx[di] * qy[dj] for di in qx for dj in qy}


@dataclass(frozen=True)
class StencilSystem:
    """Five-point system on the interior nodes.

    Coefficient arrays have shape ``(nx - 1, ny - 1)`` with entry
    ``[i - 1, j - 1]`` belonging to node ``(i, j)``. Couplings to boundary
    nodes are kept in ``aW``/``aE``/``aS``/``aN``; because the Dirichlet data
    are zero they drop out of the matrix. ``reaction`` is the lumped
    zero-order contribution contained in ``aC``.
    """

    aW: np.ndarray
    aE: np.ndarray
    aS: np.ndarray
    aN: np.ndarray
    aC: np.ndarray
    rhs: np.ndarray
    reaction: np.ndarray
    variant: SchemeVariant
    eps: float
    mesh: TensorMesh = field(repr=False)

    @property
    def nx(self) -> int:
        return self.aC.shape[0]

    @property
    def ny(self) -> int:
        return self.aC.shape[1]

    def row_sums(self) -> np.ndarray:
        """Full five-point row sums, boundary couplings included."""
        return self.aC + self.aW + self.aE + self.aS + self.aN

    def to_sparse(self):
        """Matrix of the interior unknowns (boundary couplings dropped), CSR."""
        import scipy.sparse as sp

        nx, ny = self.nx, self.ny
        idx = np.arange(nx * ny).reshape(nx, ny)
        rows = [idx.ravel()]
        cols = [idx.ravel()]
        vals = [self.aC.ravel()]
        for coef, sl_row, sl_col in (
            (self.aW, (slice(1, None), slice(None)), (slice(None, -1), slice(None))),
            (self.aE, (slice(None, -1), slice(None)), (slice(1, None), slice(None))),
            (self.aS, (slice(None), slice(1, None)), (slice(None), slice(None, -1))),
            (self.aN, (slice(None), slice(None, -1)), (slice(None), slice(1, None))),
        ):
            rows.append(idx[sl_row].ravel())
            cols.append(idx[sl_col].ravel())
            vals.append(coef[sl_row].ravel())
        n = nx * ny
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def _fitted_rhos(cells: CellData, mesh: TensorMesh, eps: float):
    h = mesh.mx.steps
    k = mesh.my.steps
    rho_w = cells.abar1[1:-1, 1:-1] * h[1:-1, None] / eps
    rho_e = cells.abar1[2:, 1:-1] * h[2:, None] / eps
    rho_s = cells.abar2[1:-1, 1:-1] * k[None, 1:-1] / eps
    rho_n = cells.abar2[1:-1, 2:] * k[None, 2:] / eps
    for rho in (rho_w, rho_e, rho_s, rho_n):
        if not np.all(rho > 0):
            raise AssemblyError(
                "fitted schemes need strictly positive averaged convection coefficients"
            )
    return rho_w, rho_e, rho_s, rho_n


def stencil_factors(
    problem: ProblemSpec,
    mesh: TensorMesh,
    variant: SchemeVariant | str,
    cells: CellData | None = None,
) -> StencilFactors:
    """Compute ``R`` and ``Q`` factors of a fitted variant at every interior node."""
    variant = SchemeVariant.parse(variant)
    if not variant.fitted:
        raise ValueError("upwinding has no R/Q factorisation")
    if cells is None:
        cells = average_data(problem, mesh)
    eps = problem.eps
    h = mesh.mx.steps
    k = mesh.my.steps
    hw, he = h[1:-1, None], h[2:, None]
    ks, kn = k[None, 1:-1], k[None, 2:]
    rho_w, rho_e, rho_s, rho_n = _fitted_rhos(cells, mesh, eps)

    rxm = -eps * sigma(rho_w) / hw
    rxp = -eps * sigma(-rho_e) / he
    rym = -eps * sigma(rho_s) / ks
    ryp = -eps * sigma(-rho_n) / kn

    if variant is SchemeVariant.LSTAR_TEST:
        qxm, qxp = hw * kernel_a(rho_w), he * kernel_b(rho_e)
        qym, qyp = ks * kernel_a(rho_s), kn * kernel_b(rho_n)
    elif variant is SchemeVariant.L_TEST:
        qxm, qxp = hw * kernel_b(rho_w), he * kernel_a(rho_e)
        qym, qyp = ks * kernel_b(rho_s), kn * kernel_a(rho_n)
    elif variant is SchemeVariant.HAT_TEST:
        qxm, qxp = 0.5 * hw * np.ones_like(rho_w), 0.5 * he * np.ones_like(rho_e)
        qym, qyp = 0.5 * ks * np.ones_like(rho_s), 0.5 * kn * np.ones_like(rho_n)
    else:
        qxm = qxp = np.zeros_like(rho_w)
        qym = qyp = np.zeros_like(rho_s)

    if variant is SchemeVariant.FITTED_FD:
        qxc = np.broadcast_to(mesh.mx.avg_steps[1:-1, None], rho_w.shape).copy()
        qyc = np.broadcast_to(mesh.my.avg_steps[None, 1:-1], rho_s.shape).copy()
    else:
        qxc = qxm + qxp
        qyc = qym + qyp
    return StencilFactors(rxm, rxp, rym, ryp, qxm, qxc, qxp, qym, qyc, qyp)


def _shifted(values: np.ndarray, di: int, dj: int) -> np.ndarray:
    nx, ny = values.shape
    return values[1 + di : nx - 1 + di, 1 + dj : ny - 1 + dj]


def assemble(
    problem: ProblemSpec,
    mesh: TensorMesh,
    variant: SchemeVariant | str,
    cells: CellData | None = None,
) -> StencilSystem:
    """Assemble the five-point system of ``variant`` for ``problem`` on ``mesh``."""
    variant = SchemeVariant.parse(variant)
    X, Y = mesh.grid()
    F = problem.f(X, Y)
    bnode = problem.b(X, Y)[1:-1, 1:-1]
    eps = problem.eps

    if variant is SchemeVariant.UPWIND:
        h, hbar = mesh.mx.steps, mesh.mx.avg_steps
        k, kbar = mesh.my.steps, mesh.my.avg_steps
        a1 = problem.a1(X, Y)[1:-1, 1:-1]
        a2 = problem.a2(X, Y)[1:-1, 1:-1]
        hw, he, hb = h[1:-1, None], h[2:, None], hbar[1:-1, None]
        ks, kn, kb = k[None, 1:-1], k[None, 2:], kbar[None, 1:-1]
        aW = -(eps / (hw * hb) + a1 / hw)
        aE = np.broadcast_to(-eps / (he * hb), aW.shape).copy()
        aS = -(eps / (ks * kb) + a2 / ks)
        aN = np.broadcast_to(-eps / (kn * kb), aS.shape).copy()
        reaction = bnode.copy()
        aC = -(aW + aE + aS + aN) + reaction
        rhs = F[1:-1, 1:-1].copy()
    else:
        fac = stencil_factors(problem, mesh, variant, cells)
        aW = fac.rxm * fac.qyc
        aE = fac.rxp * fac.qyc
        aS = fac.rym * fac.qxc
        aN = fac.ryp * fac.qxc
        reaction = bnode * fac.qxc * fac.qyc
        aC = -(fac.rxm + fac.rxp) * fac.qyc - (fac.rym + fac.ryp) * fac.qxc + reaction
        if variant is SchemeVariant.FITTED_FD:
            rhs = fac.qxc * fac.qyc * F[1:-1, 1:-1]
        else:
            rhs = np.zeros_like(aC)
            for (di, dj), weight in fac.gamma().items():
                rhs += weight * _shifted(F, di, dj)

    return StencilSystem(
        aW=aW, aE=aE, aS=aS, aN=aN, aC=aC, rhs=rhs, reaction=reaction,
        variant=variant, eps=eps, mesh=mesh,
    )


@dataclass
class MMatrixReport:
    passed: bool
    violations: list[tuple[str, int, int, float]]

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None

    def __str__(self) -> str:
        if self.passed:
            return "M-matrix checks passed"
        check, i, j, value = self.first_violation
        return (
            f"M-matrix checks failed ({len(self.violations)} violations); "
            f"first: {check} at node ({i}, {j}), value {value:.6g}"
        )


def verify_m_matrix(sys: StencilSystem, rtol: float = 1e-10) -> MMatrixReport:
    """Check the sign pattern and row sums of an assembled system.

    Node indices in the report are mesh indices ``(i, j)``. Checks, in order:
    strictly negative ``aW``/``aS`` (every row reaches the inflow boundary),
    non-positive ``aE``/``aN``, positive ``aC``, and full row sums equal to
    the non-negative lumped reaction term.
    """
    violations = []

    def record(name, mask, values):
        for i, j in zip(*np.nonzero(mask)):
            violations.append((name, int(i) + 1, int(j) + 1, float(values[i, j])))

    record("aW >= 0", ~(sys.aW < 0), sys.aW)
    record("aS >= 0", ~(sys.aS < 0), sys.aS)
    record("aE > 0", ~(sys.aE <= 0), sys.aE)
    record("aN > 0", ~(sys.aN <= 0), sys.aN)
    record("aC <= 0", ~(sys.aC > 0), sys.aC)
    record("reaction < 0", ~(sys.reaction >= 0), sys.reaction)
    scale = np.abs(sys.aC) + np.abs(sys.aW) + np.abs(sys.aE) + np.abs(sys.aS) + np.abs(sys.aN)
    defect = sys.row_sums() - sys.reaction
    record("row sum != reaction", ~(np.abs(defect) <= rtol * scale), defect)
    violations.sort(key=lambda v: (v[1], v[2]))
    return MMatrixReport(passed=not violations, violations=violations)


def operator_action(sys: StencilSystem, g: GridFunction | np.ndarray) -> np.ndarray:
    """Five-point action ``LHS g`` at interior nodes, using g's boundary values."""
    values = g.values if isinstance(g, GridFunction) else np.asarray(g, dtype=float)
    expected = (sys.nx + 2, sys.ny + 2)
    if values.shape != expected:
        raise ValueError(f"grid function has shape {values.shape}, system expects {expected}")
    return (
        sys.aC * values[1:-1, 1:-1]
        + sys.aW * values[:-2, 1:-1]
        + sys.aE * values[2:, 1:-1]
        + sys.aS * values[1:-1, :-2]
        + sys.aN * values[1:-1, 2:]
    )


def apply_operator(sys: StencilSystem, g: GridFunction | np.ndarray) -> np.ndarray:
    """Residual ``rhs - LHS g`` on the full node grid; zero on the boundary."""
    action = operator_action(sys, g)
    out = np.zeros((sys.nx + 2, sys.ny + 2))
    out[1:-1, 1:-1] = sys.rhs - action
    return out


def relative_action(sys: StencilSystem, g: GridFunction | np.ndarray) -> float:
    """``max |LHS g|`` relative to the largest individual stencil term."""
    values = g.values if isinstance(g, GridFunction) else np.asarray(g, dtype=float)
    action = operator_action(sys, values)
    terms = (
        np.abs(sys.aC * values[1:-1, 1:-1])
        + np.abs(sys.aW * values[:-2, 1:-1])
        + np.abs(sys.aE * values[2:, 1:-1])
        + np.abs(sys.aS * values[1:-1, :-2])
        + np.abs(sys.aN * values[1:-1, 2:])
    )
    scale = terms.max()
    return 0.0 if scale == 0 else float(np.abs(action).max() / scale)
