"""Running a trained model as an explicit scheme, error norms and jump diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AmbiguousJumpError,
    ConfigurationError,
    DivergenceError,
    UndefinedOrderError,
)
from .grid import CellAverageField
from .scheme import CannModel, apply_network


@dataclass(frozen=True)
class Trajectory:
    fields: tuple

    def __len__(self) -> int:
        return len(self.fields)

    @property
    def final(self) -> CellAverageField:
        return self.fields[-1]

    @property
    def times(self) -> np.ndarray:
        return np.array([f.time for f in self.fields])

    def rows(self):
        """``(t, x_center, u)`` rows in time-major order."""
        for f in self.fields:
            for x, u in zip(f.grid.centers, f.values):
                yield f.time, float(x), float(u)


def _check_grid(model: CannModel, field_: CellAverageField) -> None:
    if not np.isclose(field_.grid.dx, model.dx, rtol=1e-12, atol=0.0):
        raise ConfigurationError(f"field dx={field_.grid.dx} does not match model dx={model.dx}")


def step(model: CannModel, field_: CellAverageField) -> CellAverageField:
    """One simultaneous update of all cells from level-n values."""
    _check_grid(model, field_)
    new = field_.values + apply_network(model, field_)
    bad = np.flatnonzero(~np.isfinite(new))
    if bad.size:
        raise DivergenceError(
            f"non-finite value in cell {bad[0] + 1} at t={field_.time + model.dt}",
            j=int(bad[0]) + 1,
        )
    return CellAverageField(field_.grid, new, field_.time + model.dt)


def evolve(model: CannModel, init: CellAverageField, n_steps: int) -> Trajectory:
    if n_steps < 0:
        raise ConfigurationError(f"n_steps must be >= 0, got {n_steps}")
    fields = [init]
    for _ in range(n_steps):
        fields.append(step(model, fields[-1]))
    return Trajectory(tuple(fields))


def steps_to(T: float, dt: float, rtol: float = 1e-9) -> int:
    """Number of steps to reach ``T``; rejects ``T`` that is not a multiple of ``dt``."""
    n = round(T / dt)
    if n < 0 or abs(n * dt - T) > rtol * max(abs(T), dt):
        raise ConfigurationError(f"final time {T} is not an integer multiple of dt={dt}")
    return int(n)


def evolve_to(model: CannModel, init: CellAverageField, T: float) -> Trajectory:
    return evolve(model, init, steps_to(T - init.time, model.dt))


def _diff(v: CellAverageField, ref: CellAverageField) -> np.ndarray:
    if not v.grid.same_as(ref.grid):
        raise ConfigurationError("error norms need fields on the same grid")
    return np.asarray(v.values) - np.asarray(ref.values)


def l2_error(v: CellAverageField, ref: CellAverageField) -> float:
    d = _diff(v, ref)
    return math.sqrt(float(np.sum(d * d)) * v.grid.dx)


def linf_error(v: CellAverageField, ref: CellAverageField) -> float:
    return float(np.max(np.abs(_diff(v, ref))))


def convergence_order(errors: Sequence[tuple[float, float]]) -> list[float]:
    """Observed orders ``log(e_{k-1}/e_k) / log(dx_{k-1}/dx_k)`` between successive meshes."""
    if len(errors) < 2:
        raise ConfigurationError("need at least two (dx, error) entries")
    dxs = [float(d) for d, _ in errors]
    errs = [float(e) for _, e in errors]
    if any(b >= a for a, b in zip(dxs[:-1], dxs[1:])):
        raise ConfigurationError(f"dx values must strictly decrease, got {dxs}")
    if any(not e > 0 for e in errs):
        raise UndefinedOrderError(f"errors must be positive, got {errs}")
    return [
        math.log(errs[k - 1] / errs[k]) / math.log(dxs[k - 1] / dxs[k])
        for k in range(1, len(errs))
    ]


@dataclass(frozen=True)
class JumpDiagnostics:
    location: float
    width_cells: int
    overshoot: float


def jump_diagnostics(
    field_: CellAverageField, left_state: float, right_state: float
) -> JumpDiagnostics:
    """Locate a single monotone transition and measure its spread and overshoot.

    The location is where the piecewise-linear interpolant of cell-centre
    values crosses ``(left_state + right_state) / 2``.  Cells counted in the
    width lie strictly inside the band that excludes 5% of the jump at
    either end.
    """
    u = np.asarray(field_.values)
    x = field_.grid.centers
    mid = 0.5 * (left_state + right_state)
    s = u - mid
    crossings = []
    for k in range(len(u) - 1):
        if s[k] == 0.0:
            crossings.append(float(x[k]))
        elif s[k] * s[k + 1] < 0.0:
            theta = s[k] / (s[k] - s[k + 1])
            crossings.append(float(x[k] + theta * (x[k + 1] - x[k])))
    if s[-1] == 0.0:
        crossings.append(float(x[-1]))
    if not crossings:
        raise AmbiguousJumpError("field never crosses the mid-state", crossings)
    if len(crossings) > 1:
        raise AmbiguousJumpError(f"field crosses the mid-state {len(crossings)} times", crossings)

    lo, hi = min(left_state, right_state), max(left_state, right_state)
    delta = 0.05 * (hi - lo)
    width = int(np.count_nonzero((u > lo + delta) & (u < hi - delta)))
    overshoot = float(max(0.0, np.max(u) - hi, lo - np.min(u)))
    return JumpDiagnostics(crossings[0], width, overshoot)


def windowed(field_: CellAverageField, lo: float, hi: float) -> CellAverageField:
    """Restriction of ``field_`` to the cells whose centres lie in ``[lo, hi]``."""
    from .grid import Grid1D

    x = field_.grid.centers
    idx = np.flatnonzero((x >= lo) & (x <= hi))
    if idx.size == 0:
        raise ConfigurationError(f"no cells in window [{lo}, {hi}]")
    g = field_.grid
    sub = Grid1D(g.left_edge(idx[0] + 1), g.right_edge(idx[-1] + 1), idx.size)
    return CellAverageField(sub, field_.values[idx], field_.time)


def right_of_peak(field_: CellAverageField) -> CellAverageField:
    """Cells from the maximum rightwards: isolates a shock behind a rarefaction ramp."""
    x = field_.grid.centers
    return windowed(field_, float(x[int(np.argmax(field_.values))]), float(x[-1]))
