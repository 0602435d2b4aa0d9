"""Training data: exact-solution averages, or a fine-mesh MUSCL reference solver.

The reference solver is a second-order finite-volume scheme: minmod-limited
MUSCL reconstruction, Godunov (exact Riemann) fluxes for the convective
part, central differences for diffusion, and two-stage SSP Runge-Kutta in
time.  Its averages are coarsened onto the training mesh.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergenceError
from .grid import BCKind, CellAverageField, Grid1D
from .problems import FluxKind, PDE, ProblemSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingSet:
    """Solution averages on ``m + 2`` consecutive time levels ``t_n = n * dt``.

    Pair ``(n, j)`` is ``(levels[n, j-1], levels[n+1, j-1])`` for
    ``n = 0..m``; consecutive pairs share a level, so the consistency
    property holds by construction.
    """

    grid: Grid1D
    dt: float
    levels: np.ndarray

    def __post_init__(self) -> None:
        levels = np.asarray(self.levels, dtype=float)
        if levels.ndim != 2 or levels.shape[1] != self.grid.J or levels.shape[0] < 2:
            raise ConfigurationError(
                f"levels must have shape (m+2, {self.grid.J}), got {levels.shape}"
            )
        if not np.all(np.isfinite(levels)):
            raise ConfigurationError("training data contains non-finite values")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        levels = levels.copy()
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    @property
    def m(self) -> int:
        return self.levels.shape[0] - 2

    @property
    def n_pairs(self) -> int:
        return (self.m + 1) * self.grid.J

    @property
    def pairs(self) -> np.ndarray:
        """Array of shape ``(m+1, J, 2)``."""
        return np.stack([self.levels[:-1], self.levels[1:]], axis=-1)

    def level(self, n: int) -> CellAverageField:
        return CellAverageField(self.grid, self.levels[n], n * self.dt)


class Limiter(enum.Enum):
    NONE = "none"
    MINMOD = "minmod"


@dataclass(frozen=True)
class ReferenceSolverConfig:
    refine_factor: int = 16
    limiter: Limiter = Limiter.MINMOD
    cfl: float = 0.4

    def __post_init__(self) -> None:
        if int(self.refine_factor) != self.refine_factor or self.refine_factor < 1:
            raise ConfigurationError(f"refine_factor must be a positive integer, got {self.refine_factor}")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigurationError(f"cfl must lie in (0, 1), got {self.cfl}")

    def check_for(self, problem: ProblemSpec) -> None:
        burgers = problem.pde in (PDE.INVISCID_BURGERS, PDE.VISCOUS_BURGERS)
        if burgers and self.refine_factor < 8:
            raise ConfigurationError("Burgers problems need refine_factor >= 8")


def generate_training_set_exact(
    problem: ProblemSpec, grid: Grid1D, dt: float, m: int
) -> TrainingSet:
    if problem.exact is None:
        raise ConfigurationError(f"problem {problem.key!r} has no exact solution")
    if m < 0:
        raise ConfigurationError(f"m must be >= 0, got {m}")
    levels = [problem.exact_averages(grid, n * dt) for n in range(m + 2)]
    return TrainingSet(grid, dt, np.array(levels))


# -- reference solver -------------------------------------------------------

_NG = 2  # ghost cells per side for MUSCL


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _godunov_flux(problem: ProblemSpec, uL, uR):
    flux = problem.flux
    if flux.kind is FluxKind.LINEAR:
        return flux.speed * (uL if flux.speed >= 0 else uR)
    if flux.kind is FluxKind.BURGERS:
        fL, fR = 0.5 * uL * uL, 0.5 * uR * uR
        rarefaction = np.where(uL > 0.0, fL, np.where(uR < 0.0, fR, 0.0))
        return np.where(uL <= uR, rarefaction, np.maximum(fL, fR))
    return np.zeros_like(uL)


class _FineSolver:
    def __init__(self, problem: ProblemSpec, grid: Grid1D, cfg: ReferenceSolverConfig):
        self.problem = problem
        self.grid = grid
        self.cfg = cfg
        self.steps = 0

    def _pad(self, u, t):
        J = self.grid.J
        if self.problem.bc.kind is BCKind.PERIODIC:
            return np.concatenate([u[-_NG:], u, u[:_NG]])
        g = self.problem.bc.ghost_average
        left = [g(self.grid, j, t) for j in range(1 - _NG, 1)]
        right = [g(self.grid, j, t) for j in range(J + 1, J + _NG + 1)]
        return np.concatenate([left, u, right])

    def rhs(self, u, t):
        dx = self.grid.dx
        ext = self._pad(u, t)
        dl = ext[1:-1] - ext[:-2]
        dr = ext[2:] - ext[1:-1]
        if self.cfg.limiter is Limiter.MINMOD:
            slope = _minmod(dl, dr)
        else:
            slope = 0.5 * (dl + dr)
        # cells 0..J+1 of the padded array (one ghost each side) have slopes
        inner = ext[1:-1]
        uR_face = inner[:-1] + 0.5 * slope[:-1]  # left state at interface k+1/2
        uL_face = inner[1:] - 0.5 * slope[1:]  # right state
        F = _godunov_flux(self.problem, uR_face, uL_face)
        if self.problem.mu > 0.0:
            F = F - self.problem.mu * (inner[1:] - inner[:-1]) / dx
        return -(F[1:] - F[:-1]) / dx

    def stable_dt(self, u) -> float:
        dx = self.grid.dx
        bounds = []
        flux = self.problem.flux
        if flux.kind is not FluxKind.NONE:
            speed = float(np.max(np.abs(flux.derivative(u))))
            if speed > 0.0:
                bounds.append(dx / speed)
        if self.problem.mu > 0.0:
            bounds.append(dx * dx / (2.0 * self.problem.mu))
        if not bounds:
            return np.inf
        return self.cfg.cfl * min(bounds)

    def march(self, u, t: float, t_end: float):
        """Advance to exactly ``t_end``; the final step is shortened to land on it."""
        while t < t_end:
            dt = min(self.stable_dt(u), t_end - t)
            if t + dt >= t_end or (t_end - (t + dt)) <= 1e-14 * max(1.0, abs(t_end)):
                dt = t_end - t
            u1 = u + dt * self.rhs(u, t)
            u = 0.5 * u + 0.5 * (u1 + dt * self.rhs(u1, t + dt))
            self.steps += 1
            if not np.all(np.isfinite(u)):
                raise DivergenceError(
                    f"reference solver diverged at step {self.steps}", step=self.steps
                )
            t = t_end if dt == t_end - t else t + dt
        return u, t_end


def reference_fv_solve(
    problem: ProblemSpec,
    fine_grid: Grid1D,
    t_end: float,
    cfg: ReferenceSolverConfig = ReferenceSolverConfig(),
) -> CellAverageField:
    if t_end < 0:
        raise ConfigurationError(f"t_end must be >= 0, got {t_end}")
    solver = _FineSolver(problem, fine_grid, cfg)
    u0 = problem.initial_averages(fine_grid)
    u, t = solver.march(u0, 0.0, t_end)
    return CellAverageField(fine_grid, u, t)


def coarsen(fine: CellAverageField, coarse_grid: Grid1D) -> CellAverageField:
    fg = fine.grid
    same_domain = Grid1D(coarse_grid.a, coarse_grid.b, fg.J).same_as(fg)
    if not same_domain or fg.J % coarse_grid.J:
        raise ConfigurationError(
            f"cannot coarsen J={fg.J} on [{fg.a}, {fg.b}] to "
            f"J={coarse_grid.J} on [{coarse_grid.a}, {coarse_grid.b}]"
        )
    r = fg.J // coarse_grid.J
    return CellAverageField(coarse_grid, fine.values.reshape(coarse_grid.J, r).mean(axis=1), fine.time)


def refine_by_copy(coarse: CellAverageField, factor: int) -> CellAverageField:
    g = coarse.grid
    return CellAverageField(Grid1D(g.a, g.b, g.J * factor), np.repeat(coarse.values, factor), coarse.time)


def generate_training_set_reference(
    problem: ProblemSpec,
    grid: Grid1D,
    dt: float,
    m: int,
    cfg: ReferenceSolverConfig = ReferenceSolverConfig(),
) -> TrainingSet:
    cfg.check_for(problem)
    if m < 0:
        raise ConfigurationError(f"m must be >= 0, got {m}")
    fine_grid = Grid1D(grid.a, grid.b, grid.J * cfg.refine_factor)
    solver = _FineSolver(problem, fine_grid, cfg)
    u = problem.initial_averages(fine_grid)
    t = 0.0
    levels = [coarsen(CellAverageField(fine_grid, u, t), grid).values]
    for n in range(1, m + 2):
        u, t = solver.march(u, t, n * dt)
        levels.append(coarsen(CellAverageField(fine_grid, u, t), grid).values)
    log.info("reference data for %s: %d fine steps", problem.key, solver.steps)
    return TrainingSet(grid, dt, np.array(levels))


def generate_training_set(problem, grid, dt, m, source="exact", cfg=None) -> TrainingSet:
    """Dispatch on data source: ``"exact"`` or ``"reference"``."""
    if source == "exact":
        return generate_training_set_exact(problem, grid, dt, m)
    if source == "reference":
        return generate_training_set_reference(problem, grid, dt, m, cfg or ReferenceSolverConfig())
    raise ConfigurationError(f"unknown training data source {source!r}")
