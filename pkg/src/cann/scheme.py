"""The cell-average network scheme: model definition, per-pair loss and training.

A model advances cell averages by ``v_j <- v_j + N([v_{j-p}..v_{j+q}])``.
Training walks the time levels of a :class:`TrainingSet` strictly forward;
on each level it runs ``K`` sweeps over the cells in ascending order with
one SGD update per cell.  After every sweep the Δx-weighted squared error
over the level is recorded, and on the last level training stops early
once it falls to ``stop_tol``.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels, mlp
from .errors import ConfigurationError, DivergenceError, ShapeError
from .grid import BoundaryCondition, CellAverageField, StencilSpec, stencil_matrix
from .refsolve import TrainingSet

log = logging.getLogger(__name__)


@dataclass
class CannModel:
    dx: float
    dt: float
    stencil: StencilSpec
    net: mlp.MlpNetwork
    bc: BoundaryCondition
    problem_key: str = ""

    def __post_init__(self) -> None:
        if not (self.dx > 0 and self.dt > 0):
            raise ConfigurationError(f"dx and dt must be positive, got dx={self.dx}, dt={self.dt}")
        if self.net.layer_sizes[0] != self.stencil.width:
            raise ConfigurationError(
                f"network input size {self.net.layer_sizes[0]} != stencil width {self.stencil.width}"
            )


SCHEDULES = ("per-level", "epochs")


@dataclass(frozen=True)
class TrainConfig:
    K: int
    alpha: float = 0.01
    stop_tol: float = 1e-8
    seed: int = 0
    # "per-level": K sweeps on level 0, then K on level 1, ... (the default).
    # "epochs": K passes, each visiting every pair once, level by level.
    schedule: str = "per-level"

    def __post_init__(self) -> None:
        if self.schedule not in SCHEDULES:
            raise ConfigurationError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")
        if int(self.K) != self.K or self.K < 1:
            raise ConfigurationError(f"K must be a positive integer, got {self.K}")
        if not self.alpha > 0:
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if not self.stop_tol > 0:
            raise ConfigurationError(f"stop_tol must be positive, got {self.stop_tol}")


class TrainStatus(enum.Enum):
    STOPPED_AT_TOL = "stopped-at-tol"
    EXHAUSTED_K = "exhausted-k"


@dataclass
class TrainTrace:
    """Squared L2 error after each sweep, one array per time level."""

    levels: list = field(default_factory=list)
    status: TrainStatus = TrainStatus.EXHAUSTED_K
    updates: int = 0
    level_ids: Optional[list] = None  # level number of each array; default 0, 1, ...

    def __len__(self) -> int:
        return sum(len(e) for e in self.levels)

    @property
    def final_error(self) -> float:
        return float(self.levels[-1][-1])

    def rows(self):
        """``(level, iter, sq_l2_error)`` with 1-based iteration numbers."""
        ids = self.level_ids if self.level_ids is not None else range(len(self.levels))
        for n, errs in zip(ids, self.levels):
            for i, e in enumerate(errs, start=1):
                yield n, i, float(e)


def loss(model: CannModel, input_vec, target: float) -> tuple[float, float]:
    """Squared residual of one pair and its derivative w.r.t. the network output."""
    x = np.asarray(input_vec, dtype=float)
    if x.shape != (model.stencil.width,):
        raise ShapeError(f"expected input of length {model.stencil.width}, got {x.shape}")
    v_out = x[model.stencil.p] + mlp.forward(model.net, x)
    r = v_out - target
    return r * r, 2.0 * r


def _check_compatible(model: CannModel, S: TrainingSet) -> None:
    if not np.isclose(S.grid.dx, model.dx, rtol=1e-12, atol=0.0):
        raise ConfigurationError(f"training data dx={S.grid.dx} != model dx={model.dx}")
    if not np.isclose(S.dt, model.dt, rtol=1e-12, atol=0.0):
        raise ConfigurationError(f"training data dt={S.dt} != model dt={model.dt}")
    model.stencil.check(S.grid)


def level_inputs(model: CannModel, S: TrainingSet, n: int):
    """Stencil matrix, centre values and targets for time level ``n``."""
    field_n = S.level(n)
    X = stencil_matrix(field_n, model.stencil, model.bc)
    return X, np.ascontiguousarray(S.levels[n]), np.ascontiguousarray(S.levels[n + 1])


def training_error(model: CannModel, S: TrainingSet, n: int) -> float:
    if not 0 <= n <= S.m:
        raise ConfigurationError(f"time level {n} outside 0..{S.m}")
    X, centers, targets = level_inputs(model, S, n)
    out = centers + mlp.forward_batch(model.net, X)
    return float(np.sum((out - targets) ** 2) * S.grid.dx)


def _sizes(net: mlp.MlpNetwork) -> np.ndarray:
    return np.array(net.layer_sizes, dtype=np.int64)


def train(model: CannModel, S: TrainingSet, cfg: TrainConfig, engine: str = "compiled") -> TrainTrace:
    """Train ``model.net`` in place and return the error trace.

    ``engine="python"`` runs the same schedule through :func:`mlp.backward`
    and :func:`mlp.sgd_step`; it is slow and meant for cross-checking.
    """
    _check_compatible(model, S)
    if cfg.schedule == "epochs":
        if engine != "compiled":
            raise ConfigurationError("the epochs schedule is only implemented by the compiled engine")
        return _train_epochs(model, S, cfg)
    trace = TrainTrace()
    for n in range(S.m + 1):
        X, centers, targets = level_inputs(model, S, n)
        last = n == S.m
        if engine == "compiled":
            errs = np.zeros(cfg.K)
            run, status, bad_i, bad_j = _kernels.train_level(
                model.net.flat, _sizes(model.net), X, centers, targets,
                cfg.alpha, cfg.K, S.grid.dx, cfg.stop_tol, last, errs,
            )
            if status == _kernels.DIVERGED:
                raise DivergenceError(
                    f"training diverged at level {n}, iteration {bad_i + 1}, cell {bad_j + 1}",
                    n=n, i=bad_i + 1, j=bad_j + 1,
                )
            errs = errs[:run]
        elif engine == "python":
            run, status, errs = _train_level_python(model, X, centers, targets, cfg, S.grid.dx, last, n)
        else:
            raise ConfigurationError(f"unknown engine {engine!r}")
        trace.levels.append(errs)
        trace.updates += run * S.grid.J
        log.debug("level %d: %d sweeps, final sq. L2 error %.3e", n, run, errs[-1])
        if status == _kernels.STOPPED_AT_TOL:
            trace.status = TrainStatus.STOPPED_AT_TOL
    return trace


def _train_epochs(model: CannModel, S: TrainingSet, cfg: TrainConfig) -> TrainTrace:
    """K passes over all pairs; the trace records the last level's error after each pass."""
    parts = [level_inputs(model, S, n) for n in range(S.m + 1)]
    X, centers, targets = (np.ascontiguousarray(np.concatenate(a)) for a in zip(*parts))
    J = S.grid.J
    errs = np.zeros(cfg.K)
    run, status, bad_i, bad_r = _kernels.train_level(
        model.net.flat, _sizes(model.net), X, centers, targets,
        cfg.alpha, cfg.K, S.grid.dx, cfg.stop_tol, True, errs, S.m * J,
    )
    if status == _kernels.DIVERGED:
        n, j = divmod(bad_r, J) if bad_r >= 0 else (S.m, J - 1)
        raise DivergenceError(
            f"training diverged at level {n}, epoch {bad_i + 1}, cell {j + 1}", n=n, i=bad_i + 1, j=j + 1
        )
    trace = TrainTrace([errs[:run]], updates=run * X.shape[0], level_ids=[S.m])
    if status == _kernels.STOPPED_AT_TOL:
        trace.status = TrainStatus.STOPPED_AT_TOL
    return trace


def _train_level_python(model, X, centers, targets, cfg, dx, last, n):
    errs = []
    for it in range(cfg.K):
        for j in range(X.shape[0]):
            value, dL_dy = loss(model, X[j], targets[j])
            if not np.isfinite(value):
                raise DivergenceError(
                    f"training diverged at level {n}, iteration {it + 1}, cell {j + 1}",
                    n=n, i=it + 1, j=j + 1,
                )
            mlp.sgd_step(model.net, mlp.backward(model.net, X[j], dL_dy), cfg.alpha)
        out = centers + mlp.forward_batch(model.net, X)
        errs.append(float(np.sum((out - targets) ** 2) * dx))
        if last and errs[-1] <= cfg.stop_tol:
            return it + 1, _kernels.STOPPED_AT_TOL, np.array(errs)
    return cfg.K, _kernels.RUNNING, np.array(errs)


def new_model(
    dx: float,
    dt: float,
    stencil: StencilSpec,
    hidden: list,
    bc: BoundaryCondition,
    seed: int,
    problem_key: str = "",
) -> CannModel:
    """Cold-start model with randomly initialized ``[p+q+1, *hidden, 1]`` network."""
    net = mlp.init_random([stencil.width, *hidden, 1], seed)
    return CannModel(dx, dt, stencil, net, bc, problem_key)


def apply_network(model: CannModel, field_: CellAverageField) -> np.ndarray:
    """Network increments for every cell of ``field_``."""
    X = stencil_matrix(field_, model.stencil, model.bc)
    return _kernels.forward_rows(model.net.flat, _sizes(model.net), X)
