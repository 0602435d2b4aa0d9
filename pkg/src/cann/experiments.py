"""Experiment configuration, the data -> train -> evolve pipeline, and the published tables.

A config is a flat TOML file::

    problem = "advection-sine"
    J = 40
    dt_multiple = 1.0        # dt = dt_multiple * dx  (or: dt = 0.1)
    p = 1
    q = 0
    layer_sizes = [2, 5, 5, 1]
    K = 500000
    alpha = 0.01
    stop_tol = 1e-8
    seed = 0
    data = "exact"           # or "reference"
    m = 0
    T = "pi"                 # number or expression in pi, e.g. "8*pi", "pi/4"

Reference-data runs also accept ``refine_factor``, ``limiter`` and ``cfl``.
"""
from __future__ import annotations

import ast
import dataclasses
import logging
import math
import operator
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .evolve import (
    JumpDiagnostics,
    convergence_order,
    evolve_to,
    jump_diagnostics,
    l2_error,
    linf_error,
    steps_to,
)
from .grid import CellAverageField, Grid1D, StencilSpec
from .problems import ProblemSpec, get_problem
from .refsolve import Limiter, ReferenceSolverConfig, TrainingSet, generate_training_set
from .scheme import CannModel, TrainConfig, TrainTrace, new_model, train

log = logging.getLogger(__name__)

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(value) -> float:
    """Number, or an arithmetic expression in ``pi`` such as ``"2*pi/100"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise ConfigurationError(f"expected a number, got {value!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ConfigurationError(f"unsupported expression {value!r}")

    try:
        return ev(ast.parse(value, mode="eval"))
    except SyntaxError:
        raise ConfigurationError(f"cannot parse number {value!r}") from None


@dataclass
class ExperimentConfig:
    problem: str
    J: int
    p: int
    q: int
    layer_sizes: list
    K: int
    T: float
    dt_multiple: Optional[float] = None
    dt: Optional[float] = None
    alpha: float = 0.01
    stop_tol: float = 1e-8
    seed: int = 0
    data: str = "exact"
    m: int = 0
    refine_factor: int = 16
    limiter: str = "minmod"
    cfl: float = 0.4
    schedule: str = "per-level"
    label: str = ""

    def __post_init__(self) -> None:
        self.T = parse_number(self.T)
        if self.dt is not None:
            self.dt = parse_number(self.dt)
        if self.dt_multiple is not None:
            self.dt_multiple = parse_number(self.dt_multiple)
        self.validate()

    @property
    def problem_spec(self) -> ProblemSpec:
        return get_problem(self.problem)

    @property
    def grid(self) -> Grid1D:
        return self.problem_spec.grid(int(self.J))

    @property
    def stencil(self) -> StencilSpec:
        return StencilSpec(int(self.p), int(self.q))

    @property
    def time_step(self) -> float:
        if self.dt is not None:
            return float(self.dt)
        return float(self.dt_multiple) * self.grid.dx

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(K=int(self.K), alpha=float(self.alpha), stop_tol=float(self.stop_tol),
                           seed=int(self.seed), schedule=self.schedule)

    @property
    def reference_config(self) -> ReferenceSolverConfig:
        try:
            limiter = Limiter(self.limiter)
        except ValueError:
            raise ConfigurationError(f"unknown limiter {self.limiter!r}") from None
        return ReferenceSolverConfig(int(self.refine_factor), limiter, float(self.cfl))

    def validate(self) -> None:
        problem = self.problem_spec
        if (self.dt is None) == (self.dt_multiple is None):
            raise ConfigurationError("give exactly one of dt and dt_multiple")
        if not self.time_step > 0:
            raise ConfigurationError(f"time step must be positive, got {self.time_step}")
        self.stencil.check(self.grid)
        sizes = list(self.layer_sizes)
        if not sizes or sizes[0] != self.stencil.width:
            raise ConfigurationError(
                f"layer_sizes[0]={sizes[0] if sizes else None} must equal p+q+1={self.stencil.width}"
            )
        if len(sizes) < 3 or sizes[-1] != 1:
            raise ConfigurationError(f"layer_sizes must be [p+q+1, hidden..., 1], got {sizes}")
        self.train_config
        if self.data not in ("exact", "reference"):
            raise ConfigurationError(f"data must be 'exact' or 'reference', got {self.data!r}")
        if self.data == "exact" and problem.exact is None:
            raise ConfigurationError(f"problem {self.problem!r} has no exact solution; use data = 'reference'")
        if self.data == "reference":
            self.reference_config.check_for(problem)
        if int(self.m) < 0:
            raise ConfigurationError(f"m must be >= 0, got {self.m}")
        steps_to(self.T, self.time_step)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_toml(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None or (f.name == "label" and not v) or (f.name == "schedule" and v == "per-level"):
                continue
            if isinstance(v, str):
                lines.append(f'{f.name} = "{v}"')
            elif isinstance(v, list):
                lines.append(f"{f.name} = [{', '.join(str(int(x)) for x in v)}]")
            elif isinstance(v, float):
                lines.append(f"{f.name} = {v!r}")  # shortest round-trip form
            else:
                lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def load_config(path, **overrides) -> ExperimentConfig:
    import tomli

    with open(path, "rb") as fh:
        raw = tomli.load(fh)
    raw.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None


# -- pipeline ----------------------------------------------------------------


def make_training_set(cfg: ExperimentConfig) -> TrainingSet:
    return generate_training_set(
        cfg.problem_spec, cfg.grid, cfg.time_step, int(cfg.m), cfg.data, cfg.reference_config
    )


def make_model(cfg: ExperimentConfig) -> CannModel:
    problem = cfg.problem_spec
    return new_model(
        cfg.grid.dx, cfg.time_step, cfg.stencil, list(cfg.layer_sizes[1:-1]), problem.bc,
        int(cfg.seed), problem.key,
    )


def initial_field(problem: ProblemSpec, grid: Grid1D) -> CellAverageField:
    return CellAverageField(grid, problem.initial_averages(grid), 0.0)


def reference_field(cfg: ExperimentConfig, t: float) -> Optional[CellAverageField]:
    """Exact averages at ``t`` when available, else a fine-mesh reference solve."""
    problem, grid = cfg.problem_spec, cfg.grid
    if problem.exact is not None:
        return CellAverageField(grid, problem.exact_averages(grid, t), t)
    from .refsolve import coarsen, reference_fv_solve

    rc = cfg.reference_config
    fine = reference_fv_solve(problem, Grid1D(grid.a, grid.b, grid.J * rc.refine_factor), t, rc)
    return coarsen(fine, grid)


@dataclass
class RunResult:
    config: ExperimentConfig
    model: CannModel
    trace: TrainTrace
    errors: dict = field(default_factory=dict)  # T -> (l2, linf)
    finals: dict = field(default_factory=dict)  # T -> CellAverageField
    jump: Optional[JumpDiagnostics] = None


def run_experiment(cfg: ExperimentConfig, times=None, S: Optional[TrainingSet] = None) -> RunResult:
    """Train a fresh model and evolve it from the initial averages to each time in ``times``."""
    S = S if S is not None else make_training_set(cfg)
    model = make_model(cfg)
    trace = train(model, S, cfg.train_config)
    result = RunResult(cfg, model, trace)
    times = sorted(times or [cfg.T])
    problem, grid = cfg.problem_spec, cfg.grid
    current = initial_field(problem, grid)
    for T in times:
        current = evolve_to(model, current, T).final
        result.finals[T] = current
        ref = reference_field(cfg, T)
        result.errors[T] = (l2_error(current, ref), linf_error(current, ref))
    return result


# -- published tables ----------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    label: str
    config: ExperimentConfig
    times: tuple
    paper: tuple  # (l2, linf) per time; None where no value was published


@dataclass(frozen=True)
class TableSpec:
    table_id: str
    title: str
    rows: tuple
    orders: bool  # rows form a refinement study


_PI = math.pi

# The published runs train for their full K budget.  Stopping as soon as the
# squared training error reaches 1e-8 leaves networks that fit the pairs but
# generalise poorly (contact: odd-even oscillations; advection: errors that grow
# under refinement), so reproduction configs use a threshold that is never met.
NO_EARLY_STOP = 1e-300


def _adv(J, mult, K=500_000, **kw):
    return ExperimentConfig(problem="advection-sine", J=J, dt_multiple=mult, p=1, q=0,
                            layer_sizes=[2, 5, 5, 1], K=K, T=_PI, stop_tol=NO_EARLY_STOP, **kw)


def _heat(J, mult, p=3, K=100_000, **kw):
    return ExperimentConfig(problem="heat", J=J, dt_multiple=mult, p=p, q=p,
                            layer_sizes=[2 * p + 1, 15, 15, 1], K=K, T=0.1, stop_tol=NO_EARLY_STOP, **kw)


def _convdiff(J, mult, K=5_000_000, **kw):
    return ExperimentConfig(problem="convdiff", J=J, dt_multiple=mult, p=3, q=3,
                            layer_sizes=[7, 15, 1], K=K, T=_PI / 4, stop_tol=NO_EARLY_STOP, **kw)


def paper_tables() -> dict[str, TableSpec]:
    t1 = TableSpec("T1", "advection, dt = dx", tuple(
        TableRow(lbl, _adv(J, 1.0), (_PI,), (paper,))
        for lbl, J, paper in [
            ("pi/10", 20, (1.8756e-2, 1.0237e-2)),
            ("pi/20", 40, (8.0830e-3, 4.7403e-3)),
            ("pi/40", 80, (1.5547e-3, 9.7037e-4)),
            ("pi/80", 160, (6.3500e-4, 3.9838e-4)),
        ]), orders=True)
    t2 = TableSpec("T2", "advection, dx = pi/40, varying dt", tuple(
        TableRow(f"{k}dx", _adv(80, float(k)), (_PI,), (paper,))
        for k, paper in [(2, (7.0431e-3, 4.1544e-3)), (5, (9.2344e-3, 5.3628e-3)), (8, (6.9895e-3, 3.1796e-3))]
    ), orders=False)
    t3_cfg = ExperimentConfig(problem="advection-sine", J=100, dt_multiple=4.0, p=6, q=0,
                              layer_sizes=[7, 10, 1], K=500_000, T=8 * _PI,
                              stop_tol=NO_EARLY_STOP)
    t3 = TableSpec("T3", "advection, long time", (
        TableRow("long-time", t3_cfg, (4 * _PI / 5, 2 * _PI, 4 * _PI, 8 * _PI),
                 ((9.1869e-14, 1.2620e-13), (1.0045e-12, 1.0600e-12),
                  (1.8625e-10, 1.7158e-10), (7.1709e-6, 5.3325e-6))),
    ), orders=False)
    t4 = TableSpec("T4", "heat, dt = dx", tuple(
        TableRow(f"1/{J}", _heat(J, 1.0), (0.1,), (paper,))
        for J, paper in [(40, (8.6949e-3, 2.0873e-2)), (80, (4.5270e-3, 1.4104e-2)),
                         (160, (2.4736e-3, 7.2650e-3)), (320, (1.2894e-3, 3.7860e-3))]
    ), orders=True)
    t5 = TableSpec("T5", "heat, dx = 1/160, varying dt", tuple(
        TableRow(f"{k}dx", _heat(160, float(k)), (0.1,), (paper,))
        for k, paper in [(4, (2.1981e-3, 6.8272e-3)), (2, (2.4969e-3, 7.2399e-3)), (1, (2.4736e-3, 7.2650e-3))]
    ), orders=False)
    t6 = TableSpec("T6", "heat, dt = dx, wider stencil on finer mesh", tuple(
        TableRow(f"1/{J}", _heat(J, 1.0, p=p), (0.1,), (paper,))
        for J, p, paper in [(40, 2, (7.1179e-3, 1.8046e-2)), (80, 4, (6.3502e-3, 1.8319e-2)),
                            (160, 8, (6.4138e-3, 2.1510e-2))]
    ), orders=False)
    t7 = TableSpec("T7", "linear convection-diffusion, dt = dx", tuple(
        TableRow(f"pi/{J // 2}", _convdiff(J, 1.0), (_PI / 4,), (paper,))
        for J, paper in [(80, (5.3013e-3, 3.2397e-3)), (160, (1.3801e-3, 7.5132e-4)),
                         (320, (5.0091e-4, 2.6084e-4)), (640, (2.6771e-4, 1.5045e-4))]
    ), orders=True)
    t8 = TableSpec("T8", "linear convection-diffusion, dx = pi/160, varying dt", tuple(
        TableRow(lbl, _convdiff(320, k), (_PI / 4,), (paper,))
        for lbl, k, paper in [("4dx", 4.0, (1.0249e-3, 5.8832e-4)), ("2dx", 2.0, (8.2225e-4, 4.2640e-4)),
                              ("dx", 1.0, (5.0091e-4, 2.6084e-4)), ("dx/2", 0.5, (3.7288e-4, 2.0151e-4))]
    ), orders=False)
    return {t.table_id: t for t in (t1, t2, t3, t4, t5, t6, t7, t8)}


REPRODUCE_HEADER = (
    "table", "row", "dx", "dt", "T", "l2", "linf", "order_l2", "order_linf",
    "paper_l2", "paper_linf", "ratio_l2", "status", "sweeps", "final_sq_l2",
)


def reproduce_table(table_id: str, seed: int = 0, max_k: Optional[int] = None,
                    stop_tol: Optional[float] = None) -> list[dict]:
    """Run every row of a published table; returns one dict per (row, time)."""
    tables = paper_tables()
    if table_id not in tables:
        raise ConfigurationError(f"unknown table {table_id!r}; known: {', '.join(tables)}")
    spec = tables[table_id]
    out = []
    for row in spec.rows:
        changes = {"seed": seed}
        if max_k is not None:
            changes["K"] = min(int(row.config.K), int(max_k))
        if stop_tol is not None:
            changes["stop_tol"] = stop_tol
        cfg = row.config.replace(**changes)
        log.info("%s %s: J=%d dt=%.6g K=%d", table_id, row.label, cfg.J, cfg.time_step, cfg.K)
        res = run_experiment(cfg, times=row.times)
        for T, paper in zip(row.times, row.paper):
            l2, linf = res.errors[T]
            out.append({
                "table": table_id, "row": row.label, "dx": cfg.grid.dx, "dt": cfg.time_step, "T": T,
                "l2": l2, "linf": linf, "order_l2": None, "order_linf": None,
                "paper_l2": paper[0], "paper_linf": paper[1], "ratio_l2": l2 / paper[0],
                "status": res.trace.status.value, "sweeps": len(res.trace),
                "final_sq_l2": res.trace.final_error,
            })
    if spec.orders and len(out) > 1:
        o2 = convergence_order([(r["dx"], r["l2"]) for r in out])
        oi = convergence_order([(r["dx"], r["linf"]) for r in out])
        for r, a, b in zip(out[1:], o2, oi):
            r["order_l2"], r["order_linf"] = a, b
    return out
