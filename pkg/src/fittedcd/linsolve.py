"""Solvers for the five-point systems produced by :mod:`fittedcd.scheme`."""

from __future__ import annotations

import enum
import functools
import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from .scheme import GridFunction, StencilSystem, verify_m_matrix

log = logging.getLogger(__name__)

DENSE_MAX_N = 32
# above this N the sparse LU fill no longer fits in a few GB
SPARSE_MAX_N = 1024
# residuals below this many ulps of the largest stencil term are roundoff
ROUNDOFF_ULPS = 64
GMRES_RESTART = 10
GMRES_CYCLES = 20


class SingularMatrixError(ArithmeticError):
    pass


class ConvergenceError(ArithmeticError):
    def __init__(self, message, residual, sweeps):
        super().__init__(message)
        self.residual = residual
        self.sweeps = sweeps


class SolverMethod(str, enum.Enum):
    LINE = "line"  # alternating-direction line Gauss-Seidel
    DENSE = "dense"  # dense LU, small meshes only
    SPARSE = "sparse"  # sparse LU (SuperLU)
    AMG = "amg"  # Ruge-Stuben AMG preconditioned GMRES
    AUTO = "auto"  # sparse up to SPARSE_MAX_N, AMG beyond


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-12
    max_sweeps: int = 100_000
    method: SolverMethod = SolverMethod.AUTO
    check_m_matrix: bool = False

    def __post_init__(self):
        if not (0.0 < self.tol < 1.0):
            raise ValueError("tol must lie in (0, 1)")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        object.__setattr__(self, "method", SolverMethod(self.method))


@njit(cache=True)
def _thomas(lower, diag, upper, rhs, out):
    """Thomas elimination into ``out``; returns False on a zero pivot."""
    n = rhs.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    piv = diag[0]
    if piv == 0.0:
        return False
    cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for k in range(1, n):
        piv = diag[k] - lower[k] * cp[k - 1]
        if piv == 0.0:
            return False
        cp[k] = upper[k] / piv
        dp[k] = (rhs[k] - lower[k] * dp[k - 1]) / piv
    out[n - 1] = dp[n - 1]
    for k in range(n - 2, -1, -1):
        out[k] = dp[k] - cp[k] * out[k + 1]
    return True


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution.

    All four vectors have length ``n``; row ``k`` reads
    ``lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]``, so
    ``lower[0]`` and ``upper[n-1]`` are ignored.
    """
    arrays = [np.ascontiguousarray(v, dtype=float) for v in (lower, diag, upper, rhs)]
    n = arrays[3].shape[0]
    if any(a.ndim != 1 or a.shape[0] != n for a in arrays):
        raise ValueError("lower, diag, upper and rhs must be 1-D arrays of equal length")
    if n == 0:
        return np.empty(0)
    out = np.empty(n)
    if not _thomas(*arrays, out):
        raise SingularMatrixError("zero pivot in tridiagonal elimination")
    return out


@njit(cache=True)
def _residual_norm(aW, aE, aS, aN, aC, rhs, U):
    """Residual statistics of ``U``.

    Returns ``(res, scale, res_d, scale_d, rhs_d)``: ``max |rhs - LHS U|``, the
    largest row of ``|terms|`` and the same two maxima plus ``max |rhs|`` after
    dividing each row by its diagonal.
    """
    nx, ny = aC.shape
    r = 0.0
    scale = 0.0
    r_d = 0.0
    scale_d = 0.0
    rhs_d = 0.0
    for i in range(nx):
        for j in range(ny):
            c = aC[i, j] * U[i + 1, j + 1]
            w = aW[i, j] * U[i, j + 1]
            e = aE[i, j] * U[i + 2, j + 1]
            s = aS[i, j] * U[i + 1, j]
            n = aN[i, j] * U[i + 1, j + 2]
            ri = abs(rhs[i, j] - (c + w + e + s + n))
            si = abs(rhs[i, j]) + abs(c) + abs(w) + abs(e) + abs(s) + abs(n)
            d = abs(aC[i, j])
            r = max(r, ri)
            scale = max(scale, si)
            r_d = max(r_d, ri / d)
            scale_d = max(scale_d, si / d)
            rhs_d = max(rhs_d, abs(rhs[i, j]) / d)
    return r, scale, r_d, scale_d, rhs_d


@njit(cache=True)
def _target(tol_abs, scale):
    return max(tol_abs, ROUNDOFF_ULPS * 2.220446049250313e-16 * scale)


@njit(cache=True)
def _converged(stats, tol, tol_abs):
    """Both the plain residual and the diagonally scaled one must meet their targets.

    The scaled test matters on layer-adapted meshes: rows of fine cells carry
    tiny coefficients, so a small plain residual there can hide a large error.
    """
    r, scale, r_d, scale_d, rhs_d = stats
    return r <= _target(tol_abs, scale) and r_d <= _target(tol * rhs_d, scale_d)


@njit(cache=True)
def _line_sweeps(aW, aE, aS, aN, aC, rhs, U, tol, tol_abs, max_sweeps):
    """Alternating x-line / y-line Gauss-Seidel on the padded grid ``U``.

    Returns ``(sweeps, converged)``; ``sweeps = -1`` flags a zero pivot.
    """
    nx, ny = aC.shape
    lo = np.empty(nx)
    di = np.empty(nx)
    up = np.empty(nx)
    b = np.empty(nx)
    xs = np.empty(nx)
    lo2 = np.empty(ny)
    di2 = np.empty(ny)
    up2 = np.empty(ny)
    b2 = np.empty(ny)
    ys = np.empty(ny)
    done = _converged(_residual_norm(aW, aE, aS, aN, aC, rhs, U), tol, tol_abs)
    sweeps = 0
    while not done and sweeps < max_sweeps:
        for j in range(ny):
            for i in range(nx):
                lo[i] = aW[i, j]
                di[i] = aC[i, j]
                up[i] = aE[i, j]
                b[i] = rhs[i, j] - aS[i, j] * U[i + 1, j] - aN[i, j] * U[i + 1, j + 2]
            if not _thomas(lo, di, up, b, xs):
                return -1, False
            for i in range(nx):
                U[i + 1, j + 1] = xs[i]
        for i in range(nx):
            for j in range(ny):
                lo2[j] = aS[i, j]
                di2[j] = aC[i, j]
                up2[j] = aN[i, j]
                b2[j] = rhs[i, j] - aW[i, j] * U[i, j + 1] - aE[i, j] * U[i + 2, j + 1]
            if not _thomas(lo2, di2, up2, b2, ys):
                return -1, False
            for j in range(ny):
                U[i + 1, j + 1] = ys[j]
        sweeps += 1
        done = _converged(_residual_norm(aW, aE, aS, aN, aC, rhs, U), tol, tol_abs)
    return sweeps, done


def _stats(sys, values):
    return _residual_norm(sys.aW, sys.aE, sys.aS, sys.aN, sys.aC, sys.rhs, values)


def residual_norm(sys: StencilSystem, values: np.ndarray) -> float:
    """``max |rhs - LHS U|`` over interior nodes (boundary values of U used as given)."""
    return float(_stats(sys, values)[0])


def achievable_target(sys: StencilSystem, values: np.ndarray, tol_abs: float) -> tuple[float, float]:
    """Residual of ``values`` and the target ``max(tol_abs, roundoff floor)``."""
    stats = _stats(sys, values)
    return float(stats[0]), float(_target(tol_abs, stats[1]))


def is_converged(sys: StencilSystem, values: np.ndarray, tol: float) -> bool:
    """The acceptance test applied by every solver path, with ``tol`` relative to ``max |rhs|``."""
    tol_abs = tol * float(np.abs(sys.rhs).max())
    return bool(_converged(_stats(sys, values), tol, tol_abs))


def _failure(what, sys, U, opts, sweeps):
    res, target = achievable_target(sys, U, opts.tol * float(np.abs(sys.rhs).max()))
    return ConvergenceError(
        f"{what} (residual {res:.3e}, target {target:.3e})", residual=res, sweeps=sweeps
    )


def _solve_line(sys, opts):
    U = np.zeros((sys.nx + 2, sys.ny + 2))
    tol_abs = opts.tol * float(np.abs(sys.rhs).max())
    sweeps, done = _line_sweeps(
        sys.aW, sys.aE, sys.aS, sys.aN, sys.aC, sys.rhs, U, opts.tol, tol_abs, opts.max_sweeps
    )
    if sweeps < 0:
        raise SingularMatrixError("zero pivot in line relaxation")
    if not done:
        raise _failure(f"line relaxation did not converge in {opts.max_sweeps} sweeps", sys, U, opts, sweeps)
    log.debug("line relaxation: %d sweeps", sweeps)
    return U


def _interior_residual(sys, U):
    return sys.rhs - (
        sys.aC * U[1:-1, 1:-1]
        + sys.aW * U[:-2, 1:-1]
        + sys.aE * U[2:, 1:-1]
        + sys.aS * U[1:-1, :-2]
        + sys.aN * U[1:-1, 2:]
    )


def _solve_amg(sys, opts):
    import pyamg

    # bounded restart: the Krylov basis costs (restart + 1) vectors of size nx * ny
    accel = functools.partial(pyamg.krylov.gmres, restart=GMRES_RESTART)
    A = sys.to_sparse()
    ml = pyamg.ruge_stuben_solver(A, max_coarse=500)
    U = np.zeros((sys.nx + 2, sys.ny + 2))
    iterations = 0
    # defect correction: pyamg stops on a 2-norm criterion, ours is max-norm
    while not is_converged(sys, U, opts.tol) and iterations < opts.max_sweeps:
        history = []
        r = _interior_residual(sys, U).ravel()
        dx = ml.solve(r, tol=1e-10, accel=accel, maxiter=GMRES_CYCLES, residuals=history)
        iterations += max(len(history), 1)
        U[1:-1, 1:-1] += dx.reshape(sys.nx, sys.ny)
    if not is_converged(sys, U, opts.tol):
        raise _failure(f"AMG-GMRES did not converge in {iterations} iterations", sys, U, opts, iterations)
    log.debug("AMG-GMRES: %d iterations", iterations)
    return U


def _solve_direct(sys, method, opts):
    U = np.zeros((sys.nx + 2, sys.ny + 2))
    b = sys.rhs.ravel()
    if method is SolverMethod.DENSE:
        A = sys.to_dense()
        x = np.linalg.solve(A, b)
        refine = lambda r: np.linalg.solve(A, r)  # noqa: E731
    else:
        from scipy.sparse.linalg import splu

        lu = splu(sys.to_sparse().tocsc())
        x = lu.solve(b)
        refine = lu.solve
    U[1:-1, 1:-1] = x.reshape(sys.nx, sys.ny)
    # a couple of refinement steps absorb pivot growth on stiff layers
    for _ in range(3):
        if is_converged(sys, U, opts.tol):
            break
        r = _interior_residual(sys, U)
        U[1:-1, 1:-1] += refine(r.ravel()).reshape(sys.nx, sys.ny)
    if not is_converged(sys, U, opts.tol):
        raise _failure("direct solve did not reach the residual target", sys, U, opts, 0)
    return U


def solve(sys: StencilSystem, opts: SolveOptions | None = None) -> GridFunction:
    """Solve ``sys`` for the interior values; boundary values are zero.

    On return ``max |rhs - LHS U| <= opts.tol * max|rhs|`` (the initial guess
    is zero, so this is also relative to the initial residual), unless that
    lies below the roundoff floor of ``ROUNDOFF_ULPS`` ulps of the largest
    row of stencil terms, in which case the floor is the target. The same
    test holds with every row divided by its diagonal entry.
    """
    opts = opts or SolveOptions()
    if opts.check_m_matrix:
        report = verify_m_matrix(sys)
        if not report.passed:
            raise ValueError(str(report))
    if opts.method is SolverMethod.DENSE and max(sys.nx, sys.ny) + 1 > DENSE_MAX_N:
        raise ValueError(f"dense solver is limited to N <= {DENSE_MAX_N}")
    rhs_norm = float(np.abs(sys.rhs).max()) if sys.rhs.size else 0.0
    if rhs_norm == 0.0:
        return GridFunction(sys.mesh, np.zeros(sys.mesh.shape), variant=sys.variant)
    method = opts.method
    if method is SolverMethod.AUTO:
        n = max(sys.nx, sys.ny) + 1
        method = SolverMethod.SPARSE if n <= SPARSE_MAX_N else SolverMethod.AMG
    if method is SolverMethod.LINE:
        U = _solve_line(sys, opts)
    elif method is SolverMethod.AMG:
        U = _solve_amg(sys, opts)
    else:
        U = _solve_direct(sys, method, opts)
    return GridFunction(sys.mesh, U, variant=sys.variant)
