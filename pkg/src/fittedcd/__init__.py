"""Fitted exponential-spline Petrov-Galerkin schemes for singularly perturbed
convection-diffusion problems on Shishkin meshes."""

from .linsolve import (
    ConvergenceError,
    SingularMatrixError,
    SolveOptions,
    SolverMethod,
    solve,
    solve_tridiagonal,
)
from .mesh import Mesh1D, TensorMesh, shishkin_1d, shishkin_2d, tensor, transition_parameter
from .numerics import kernel_a, kernel_b, layer_exp, scaled_ratio, sigma
from .postproc import (
    ErrorTable,
    bilinear_eval,
    double_mesh_diff,
    global_error,
    orders,
    uniform_row,
)
from .problem import CellData, ProblemSpec, average_data, example1, example2, layer_test_problem, make_problem
from .runner import ExperimentConfig, emit, run
from .scheme import (
    AssemblyError,
    GridFunction,
    SchemeVariant,
    StencilSystem,
    apply_operator,
    assemble,
    verify_m_matrix,
)

__all__ = [
    "AssemblyError",
    "CellData",
    "ConvergenceError",
    "ErrorTable",
    "ExperimentConfig",
    "GridFunction",
    "Mesh1D",
    "ProblemSpec",
    "SchemeVariant",
    "SingularMatrixError",
    "SolveOptions",
    "SolverMethod",
    "StencilSystem",
    "TensorMesh",
    "apply_operator",
    "assemble",
    "average_data",
    "bilinear_eval",
    "double_mesh_diff",
    "emit",
    "example1",
    "example2",
    "global_error",
    "kernel_a",
    "kernel_b",
    "layer_exp",
    "layer_test_problem",
    "make_problem",
    "orders",
    "run",
    "scaled_ratio",
    "shishkin_1d",
    "shishkin_2d",
    "sigma",
    "solve",
    "solve_tridiagonal",
    "tensor",
    "transition_parameter",
    "uniform_row",
    "verify_m_matrix",
]
