"""Uniform 1D finite-volume mesh, cell averages, ghost cells and stencils.

Cell indices are 1-based throughout: cell ``j`` covers
``[a + (j-1)*dx, a + j*dx]`` for ``j = 1..J``.  Indices outside ``1..J``
address ghost cells, whose values come from the boundary condition.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, EvaluationError

# 5-point Gauss-Legendre nodes/weights on [-1, 1].
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class Grid1D:
    """Uniform partition of ``[a, b]`` into ``J`` cells."""

    a: float
    b: float
    J: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ConfigurationError("grid bounds must be finite")
        if self.b <= self.a:
            raise ConfigurationError(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.J) != self.J or self.J < 1:
            raise ConfigurationError(f"J must be a positive integer, got {self.J}")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.J

    def left_edge(self, j: int) -> float:
        return self.a + (j - 1) * self.dx

    def right_edge(self, j: int) -> float:
        return self.a + j * self.dx

    def cell_center(self, j: int) -> float:
        return self.a + (j - 0.5) * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.a + np.arange(self.J + 1) * self.dx

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(1, self.J + 1) - 0.5) * self.dx

    def same_as(self, other: "Grid1D", rtol: float = 1e-12) -> bool:
        scale = max(abs(self.a), abs(self.b), 1.0)
        return (
            self.J == other.J
            and abs(self.a - other.a) <= rtol * scale
            and abs(self.b - other.b) <= rtol * scale
        )


class BCKind(enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET_EXACT = "dirichlet-exact"


@dataclass(frozen=True)
class BoundaryCondition:
    """Ghost-cell rule.

    For ``DIRICHLET_EXACT``, ``ghost_average(grid, j, t)`` returns the cell
    average of the exact (or prescribed) solution on the out-of-domain
    cell ``j`` at time ``t``.
    """

    kind: BCKind
    ghost_average: Optional[Callable[[Grid1D, int, float], float]] = field(
        default=None, compare=False
    )

    def __post_init__(self) -> None:
        if self.kind is BCKind.DIRICHLET_EXACT and self.ghost_average is None:
            raise ConfigurationError("Dirichlet boundary needs a ghost_average rule")

    @classmethod
    def periodic(cls) -> "BoundaryCondition":
        return cls(BCKind.PERIODIC)

    @classmethod
    def dirichlet(cls, ghost_average) -> "BoundaryCondition":
        return cls(BCKind.DIRICHLET_EXACT, ghost_average)


@dataclass(frozen=True)
class StencilSpec:
    """``p`` cells to the left and ``q`` to the right of the current cell."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise ConfigurationError(f"stencil widths must be >= 0, got ({self.p}, {self.q})")

    @property
    def width(self) -> int:
        return self.p + self.q + 1

    def check(self, grid: Grid1D) -> None:
        if self.width > grid.J:
            raise ConfigurationError(
                f"stencil width {self.width} exceeds cell count J={grid.J}"
            )


@dataclass(frozen=True)
class CellAverageField:
    grid: Grid1D
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.J,):
            raise ConfigurationError(
                f"expected {self.grid.J} cell values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise EvaluationError("cell averages must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _gauss_average(f, lo: float, hi: float) -> float:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = mid + half * _GL_NODES
    fx = np.array([f(x) for x in xs], dtype=float)
    if not np.all(np.isfinite(fx)):
        raise EvaluationError(f"non-finite integrand on [{lo}, {hi}]")
    return float(0.5 * np.dot(_GL_WEIGHTS, fx))


def average_on_interval(f, lo: float, hi: float, breaks: Sequence[float] = ()) -> float:
    """Mean of ``f`` over ``[lo, hi]``, splitting at interior ``breaks``.

    Splitting at known jumps/kinks makes the 5-point rule exact for the
    piecewise polynomial data used by the Riemann problems.
    """
    pts = sorted(x for x in breaks if lo < x < hi)
    nodes = [lo, *pts, hi]
    total = 0.0
    for left, right in zip(nodes[:-1], nodes[1:]):
        total += (right - left) * _gauss_average(f, left, right)
    return total / (hi - lo)


def cell_average_of(f, grid: Grid1D, j: int, breaks: Sequence[float] = ()) -> float:
    """``(1/dx) * integral of f over cell j``; ``j`` may address a ghost cell.

    Only ``1 <= j <= J`` is a real cell; indices beyond are used for ghost
    averages and are allowed here.
    """
    lo, hi = grid.left_edge(j), grid.right_edge(j)
    try:
        return average_on_interval(f, lo, hi, breaks)
    except EvaluationError as exc:
        raise EvaluationError(f"cell {j}: {exc}") from None


def cell_averages(f, grid: Grid1D, breaks: Sequence[float] = ()) -> np.ndarray:
    return np.array([cell_average_of(f, grid, j, breaks) for j in range(1, grid.J + 1)])


def ghost_values(
    field_: CellAverageField, stencil: StencilSpec, bc: BoundaryCondition
) -> tuple[np.ndarray, np.ndarray]:
    """Return (left ghosts for j=1-p..0, right ghosts for j=J+1..J+q)."""
    grid, u = field_.grid, field_.values
    J = grid.J
    if bc.kind is BCKind.PERIODIC:
        left = np.array([u[(j - 1) % J] for j in range(1 - stencil.p, 1)])
        right = np.array([u[(j - 1) % J] for j in range(J + 1, J + stencil.q + 1)])
    else:
        g = bc.ghost_average
        left = np.array([g(grid, j, field_.time) for j in range(1 - stencil.p, 1)])
        right = np.array([g(grid, j, field_.time) for j in range(J + 1, J + stencil.q + 1)])
    return left.astype(float), right.astype(float)


def padded_values(
    field_: CellAverageField, stencil: StencilSpec, bc: BoundaryCondition
) -> np.ndarray:
    """Cell values extended with ``p`` left and ``q`` right ghost cells."""
    stencil.check(field_.grid)
    left, right = ghost_values(field_, stencil, bc)
    return np.concatenate([left, field_.values, right])


def stencil_matrix(
    field_: CellAverageField, stencil: StencilSpec, bc: BoundaryCondition
) -> np.ndarray:
    """All input vectors at once, shape ``(J, p+q+1)``; row ``j-1`` is cell ``j``."""
    ext = padded_values(field_, stencil, bc)
    J, w = field_.grid.J, stencil.width
    return np.lib.stride_tricks.sliding_window_view(ext, w)[:J].copy()


def assemble_input_vector(
    field_: CellAverageField, j: int, stencil: StencilSpec, bc: BoundaryCondition
) -> np.ndarray:
    """``[u_{j-p}, ..., u_j, ..., u_{j+q}]`` with ghosts filled per ``bc``.

    For periodic boundaries any integer ``j`` is accepted and reduced
    modulo ``J``.
    """
    stencil.check(field_.grid)
    J = field_.grid.J
    if bc.kind is BCKind.PERIODIC:
        j = (j - 1) % J + 1
    elif not 1 <= j <= J:
        raise ConfigurationError(f"cell index {j} outside 1..{J}")
    ext = padded_values(field_, stencil, bc)
    start = j - 1
    return ext[start : start + stencil.width].copy()
