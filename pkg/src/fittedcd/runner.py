"""Experiment harness: single solves, error tables, order tables, structural checks."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .linsolve import SolveOptions, SolverMethod, solve
from .mesh import Mesh1D, TensorMesh, shishkin_2d
from .postproc import (
    DEFAULT_BENCH_N,
    REFERENCES,
    ErrorTable,
    double_mesh_diff,
    global_error,
    uniform_row,
)
from .problem import PROBLEMS, layer_test_problem, make_problem
from .scheme import (
    GridFunction,
    SchemeVariant,
    assemble,
    relative_action,
    verify_m_matrix,
)
from .numerics import layer_exp

log = logging.getLogger(__name__)

MODES = ("errors", "orders", "verify", "solve")
FORMATS = ("csv", "markdown", "json")
DEFAULT_EPS_EXPONENTS = [0, 4, 8, 12, 16, 20]
DEFAULT_N_VALUES = [8, 16, 32, 64, 128, 256, 512, 1024]
EXACTNESS_TOL = 1e-10


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class CellError(ArithmeticError):
    """A numerical failure in one (eps, N) cell of a sweep (CLI exit code 1)."""


@dataclass
class SolverConfig:
    tol: float = 1e-12
    max_sweeps: int = 100_000
    method: str = "auto"

    def options(self) -> SolveOptions:
        return SolveOptions(tol=self.tol, max_sweeps=self.max_sweeps, method=self.method)


@dataclass
class ExperimentConfig:
    problem: str = "example1"
    variant: str = "lstar"
    eps_exponents: list[int] = field(default_factory=lambda: list(DEFAULT_EPS_EXPONENTS))
    n_values: list[int] = field(default_factory=lambda: list(DEFAULT_N_VALUES))
    bench_n: int = DEFAULT_BENCH_N
    solver: SolverConfig = field(default_factory=SolverConfig)
    mode: str = "errors"
    output: str = "markdown"
    parallel: int = 1
    reference: str = "interpolant"
    dm_grid: str = "union"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        data = dict(data)
        if "solver" in data:
            solver = data["solver"]
            if not isinstance(solver, dict):
                raise ConfigError("'solver' must be an object with tol/max_sweeps/method")
            unknown = set(solver) - {f.name for f in fields(SolverConfig)}
            if unknown:
                raise ConfigError(f"unknown solver fields: {sorted(unknown)}")
            data["solver"] = SolverConfig(**solver)
        config = cls(**data)
        config.validate()
        return config

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def problems(self) -> list[str]:
        if self.problem == "all":
            return ["example1", "example2"]
        return [self.problem]

    def variants(self) -> list[SchemeVariant]:
        if self.variant == "all":
            return list(SchemeVariant)
        return [SchemeVariant.parse(self.variant)]

    def validate(self) -> None:
        def fail(msg):
            raise ConfigError(msg)

        if self.mode not in MODES:
            fail(f"mode must be one of {MODES}")
        if self.output not in FORMATS:
            fail(f"output must be one of {FORMATS}")
        allow_all = self.mode == "verify"
        if self.problem not in PROBLEMS and not (allow_all and self.problem == "all"):
            fail(f"unknown problem {self.problem!r}")
        if not (allow_all and self.variant == "all"):
            try:
                SchemeVariant.parse(self.variant)
            except ValueError as exc:
                fail(str(exc))
        if not self.eps_exponents or not self.n_values:
            fail("eps_exponents and n_values must be non-empty")
        if any(not isinstance(k, int) or k < 0 for k in self.eps_exponents):
            fail("eps_exponents must be non-negative integers (eps = 2**-k)")
        ns = self.n_values
        if any(not isinstance(n, int) or n < 4 or n % 2 for n in ns):
            fail("n_values must be even integers >= 4")
        if ns != sorted(set(ns)):
            fail("n_values must be strictly ascending")
        if self.mode == "orders" and any(b != 2 * a for a, b in zip(ns, ns[1:])):
            fail("orders mode needs n_values in consecutive doublings")
        if self.mode == "errors" and self.problem == "example2":
            fail("errors mode needs an exact solution; example2 has none")
        if not isinstance(self.bench_n, int) or self.bench_n < 4 or self.bench_n % 2:
            fail("bench_n must be an even integer >= 4")
        if self.parallel < 1:
            fail("parallel must be >= 1")
        if self.reference not in REFERENCES:
            fail(f"reference must be one of {REFERENCES}")
        if self.dm_grid not in ("union", "bench"):
            fail("dm_grid must be 'union' or 'bench'")
        try:
            SolverMethod(self.solver.method)
            self.solver.options()
        except ValueError as exc:
            fail(f"invalid solver options: {exc}")


def compute_solution(problem_label, eps_exp, n, variant, solver: SolverConfig) -> GridFunction:
    """Assemble and solve one configuration on its Shishkin mesh."""
    problem = make_problem(problem_label, 2.0**-eps_exp)
    mesh = shishkin_2d(n, problem.eps, problem.alpha1, problem.alpha2)
    variant = SchemeVariant.parse(variant)
    try:
        U = solve(assemble(problem, mesh, variant), solver.options())
    except (ArithmeticError, ValueError) as exc:
        raise CellError(f"cell eps=2^-{eps_exp}, N={n}: {exc}") from exc
    return GridFunction(mesh, U.values, problem=problem, variant=variant)


def _error_cell(config: ExperimentConfig, k: int, n: int):
    U = compute_solution(config.problem, k, n, config.variant, config.solver)
    value = global_error(U, bench_n=config.bench_n, reference=config.reference)
    log.info("E(2^-%d, %d) = %.6g", k, n, value)
    return [(k, n, value)]


def _diff_row(config: ExperimentConfig, k: int):
    """D^N for every N in n_values and for 2 max(n_values), so each listed N gets an order."""
    out = []
    previous = None
    top = config.n_values[-1]
    for n in config.n_values + [2 * top, 4 * top]:
        current = compute_solution(config.problem, k, n, config.variant, config.solver)
        if previous is not None:
            value = double_mesh_diff(previous, current, config.bench_n, grid=config.dm_grid)
            log.info("D(2^-%d, %d) = %.6g", k, previous.mesh.mx.n, value)
            out.append((k, previous.mesh.mx.n, value))
        previous = current
    return out


def random_mesh(n: int, rng: np.random.Generator) -> Mesh1D:
    """Strictly increasing random nodes on [0, 1] (no Shishkin structure)."""
    inner = np.sort(rng.uniform(0.02, 0.98, size=n - 1))
    points = np.concatenate(([0.0], inner, [1.0]))
    return Mesh1D(n=n, points=points, tau=0.5)


def exactness_residuals(variant, eps: float, mesh: TensorMesh, a1c=2.0, a2c=3.0) -> dict[str, float]:
    """Relative residuals of the layer functions under the homogeneous operator."""
    problem = layer_test_problem(eps, a1c, a2c)
    sys = assemble(problem, mesh, variant)
    X, Y = mesh.grid()
    ex = layer_exp(X, a1c, eps)
    ey = layer_exp(Y, a2c, eps)
    return {
        "layer-x": relative_action(sys, ex),
        "layer-y": relative_action(sys, ey),
        "corner": relative_action(sys, ex * ey),
    }


def _verify_cell(problem_label: str, variant: SchemeVariant, k: int, n: int):
    rows = []
    problem = make_problem(problem_label, 2.0**-k)
    mesh = shishkin_2d(n, problem.eps, problem.alpha1, problem.alpha2)
    report = verify_m_matrix(assemble(problem, mesh, variant))
    rows.append(("m-matrix", problem_label, variant.value, k, n, report.passed, str(report)))
    if variant.fitted:
        seed = 1000 * k + n
        rng = np.random.default_rng(seed)
        rmesh = TensorMesh(random_mesh(n, rng), random_mesh(n, rng))
        for name, value in exactness_residuals(variant, 2.0**-k, rmesh).items():
            ok = value <= EXACTNESS_TOL
            detail = f"relative residual {value:.3e} on random mesh (seed {seed})"
            rows.append((f"exact-{name}", "layer-test", variant.value, k, n, ok, detail))
    return rows


@dataclass
class RunResult:
    config: ExperimentConfig
    table: ErrorTable | None = None
    checks: list[tuple] | None = None
    solution: GridFunction | None = None

    @property
    def failed(self) -> bool:
        return bool(self.checks) and not all(row[5] for row in self.checks)


def _map(func, jobs, parallel):
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(func, *job) for job in jobs]
            return [f.result() for f in futures]
    return [func(*job) for job in jobs]


def run(config: ExperimentConfig) -> RunResult:
    """Run the experiment described by ``config``; results are order independent."""
    config.validate()
    if config.mode == "solve":
        U = compute_solution(
            config.problem, config.eps_exponents[0], config.n_values[0], config.variant, config.solver
        )
        return RunResult(config, solution=U)
    if config.mode == "verify":
        jobs = [
            (p, v, k, n)
            for p in config.problems()
            for v in config.variants()
            for k in config.eps_exponents
            for n in config.n_values
        ]
        rows = [row for chunk in _map(_verify_cell, jobs, config.parallel) for row in chunk]
        return RunResult(config, checks=rows)
    if config.mode == "errors":
        jobs = [(config, k, n) for k in config.eps_exponents for n in config.n_values]
        func, kind = _error_cell, "error"
    else:
        jobs = [(config, k) for k in config.eps_exponents]
        func, kind = _diff_row, "diff"
    table = ErrorTable(config.problem, SchemeVariant.parse(config.variant).value, kind)
    for chunk in _map(func, jobs, config.parallel):
        for k, n, value in chunk:
            table[k, n] = value
    return RunResult(config, table=table)


# ---------------------------------------------------------------- emitters

CSV_HEADER = ["problem", "variant", "eps_exp", "n", "value", "kind"]


def table_records(table: ErrorTable) -> list[list]:
    """Flat records in CSV order: values, per-eps orders, uniform values and orders."""
    records = []
    for (k, n), v in sorted(table.cells.items()):
        records.append([table.problem, table.variant, k, n, v, table.kind])
    for (k, n), p in sorted(table.orders().items()):
        records.append([table.problem, table.variant, k, n, p, "order"])
    # the eps-uniform row is only meaningful across several eps
    values, orders = uniform_row(table) if len(table.eps_exps) > 1 else ({}, {})
    for n, v in values.items():
        records.append([table.problem, table.variant, "uniform", n, v, "uniform"])
    for n, p in orders.items():
        records.append([table.problem, table.variant, "uniform", n, p, "order"])
    return records


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _markdown_grid(title, row_labels, columns, lookup) -> str:
    lines = [f"**{title}**", ""]
    lines.append("| ε \\ N | " + " | ".join(str(n) for n in columns) + " |")
    lines.append("|---|" + "---:|" * len(columns))
    for label, key in row_labels:
        cells = []
        for n in columns:
            v = lookup(key, n)
            cells.append("" if v is None else f"{v:.4f}")
        lines.append(f"| {label} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def table_to_json(table: ErrorTable) -> str:
    values, orders = uniform_row(table)
    nested = {}
    for (k, n), v in sorted(table.cells.items()):
        nested.setdefault(str(k), {})[str(n)] = v
    order_cells = {}
    for (k, n), p in sorted(table.orders().items()):
        order_cells.setdefault(str(k), {})[str(n)] = p
    payload = {
        "problem": table.problem,
        "variant": table.variant,
        "kind": table.kind,
        "values": nested,
        "orders": order_cells,
        "uniform": {
            "values": {str(n): v for n, v in values.items()},
            "orders": {str(n): p for n, p in orders.items()},
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def table_from_json(text: str) -> ErrorTable:
    data = json.loads(text)
    table = ErrorTable(data["problem"], data["variant"], data["kind"])
    for k, row in data["values"].items():
        for n, v in row.items():
            table[int(k), int(n)] = v
    return table


def emit_table(table: ErrorTable, fmt: str) -> str:
    if fmt == "csv":
        return _csv(table_records(table), CSV_HEADER)
    if fmt == "json":
        return table_to_json(table)
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")
    exps = table.eps_exps
    rows = [(f"2^-{k}" if k else "2^0", k) for k in exps]
    if table.kind == "error":
        title = f"Global errors, {table.problem}, scheme {table.variant}"
        return _markdown_grid(title, rows, table.n_values, lambda k, n: table.cells.get((k, n)))
    orders = table.orders()
    _, uniform_orders = uniform_row(table)
    columns = sorted({n for _, n in orders} | set(uniform_orders))

    def lookup(k, n):
        if k == "uniform":
            return uniform_orders.get(n)
        return orders.get((k, n))

    title = f"Orders of convergence (double mesh), {table.problem}, scheme {table.variant}"
    return _markdown_grid(title, rows + [("Uniform", "uniform")], columns, lookup)


def emit_checks(rows, fmt: str) -> str:
    header = ["check", "problem", "variant", "eps_exp", "n", "passed", "detail"]
    if fmt == "csv":
        return _csv(rows, header)
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        lines.append("| " + " | ".join(str(x) for x in r) + " |")
    return "\n".join(lines) + "\n"


def emit_solution(U: GridFunction, fmt: str) -> str:
    if fmt == "json":
        payload = {"x": U.mesh.x.tolist(), "y": U.mesh.y.tolist(), "u": U.values.tolist()}
        return json.dumps(payload) + "\n"
    if fmt != "csv":
        raise ConfigError("solution dumps support csv and json")
    rows = []
    for i, x in enumerate(U.mesh.x):
        for j, y in enumerate(U.mesh.y):
            rows.append([i, j, float(x), float(y), float(U.values[i, j])])
    return _csv(rows, ["i", "j", "x", "y", "u"])


def emit(result: RunResult, fmt: str | None = None) -> str:
    fmt = fmt or result.config.output
    if result.solution is not None:
        return emit_solution(result.solution, fmt)
    if result.checks is not None:
        return emit_checks(result.checks, fmt)
    return emit_table(result.table, fmt)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
