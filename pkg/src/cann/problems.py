"""Catalog of test problems: PDE, domain, initial data, boundary rule, exact solution.

All problems are instances of ``u_t + f(u)_x = mu * u_xx`` with either a
linear flux ``f(u) = c*u`` or the Burgers flux ``f(u) = u**2 / 2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .grid import BoundaryCondition, Grid1D, average_on_interval


class PDE(enum.Enum):
    ADVECTION = "advection"
    HEAT = "heat"
    LINEAR_CONVDIFF = "linear-convdiff"
    INVISCID_BURGERS = "inviscid-burgers"
    VISCOUS_BURGERS = "viscous-burgers"


class FluxKind(enum.Enum):
    NONE = "none"
    LINEAR = "linear"
    BURGERS = "burgers"


@dataclass(frozen=True)
class Flux:
    kind: FluxKind
    speed: float = 0.0  # linear flux only

    def __call__(self, u):
        if self.kind is FluxKind.LINEAR:
            return self.speed * u
        if self.kind is FluxKind.BURGERS:
            return 0.5 * u * u
        return 0.0 * u

    def derivative(self, u):
        if self.kind is FluxKind.LINEAR:
            return self.speed + 0.0 * u
        if self.kind is FluxKind.BURGERS:
            return u
        return 0.0 * u


def _no_breaks(t: float) -> tuple:
    return ()


@dataclass(frozen=True)
class ProblemSpec:
    key: str
    pde: PDE
    flux: Flux
    mu: float
    domain: tuple[float, float]
    initial: Callable[[float], float]
    bc: BoundaryCondition
    exact: Optional[Callable[[float, float], float]] = None
    # x-locations of jumps/kinks of the exact solution at time t
    breakpoints: Callable[[float], tuple] = field(default=_no_breaks, compare=False)

    def __post_init__(self) -> None:
        if self.pde in (PDE.ADVECTION, PDE.INVISCID_BURGERS) and self.mu != 0.0:
            raise ConfigurationError(f"{self.pde.value} must have mu = 0")
        if self.pde in (PDE.HEAT, PDE.LINEAR_CONVDIFF, PDE.VISCOUS_BURGERS) and not self.mu > 0:
            raise ConfigurationError(f"{self.pde.value} must have mu > 0")

    def grid(self, J: int) -> Grid1D:
        return Grid1D(self.domain[0], self.domain[1], J)

    def exact_average(self, grid: Grid1D, j: int, t: float) -> float:
        """Cell average of the exact solution; ``j`` may be a ghost index."""
        if self.exact is None:
            raise ConfigurationError(f"problem {self.key!r} has no exact solution")
        return average_on_interval(
            lambda x: self.exact(x, t), grid.left_edge(j), grid.right_edge(j), self.breakpoints(t)
        )

    def exact_averages(self, grid: Grid1D, t: float) -> np.ndarray:
        return np.array([self.exact_average(grid, j, t) for j in range(1, grid.J + 1)])

    def initial_averages(self, grid: Grid1D) -> np.ndarray:
        breaks = self.breakpoints(0.0)
        return np.array(
            [
                average_on_interval(self.initial, grid.left_edge(j), grid.right_edge(j), breaks)
                for j in range(1, grid.J + 1)
            ]
        )


# -- exact solutions -------------------------------------------------------


def exact_advection_sine(x: float, t: float) -> float:
    return math.sin(x - t)


def exact_heat(x: float, t: float) -> float:
    return math.exp(-math.pi**2 * t) * math.sin(math.pi * x)


def exact_convdiff(x: float, t: float) -> float:
    return math.exp(-t) * math.sin(x + t)


def exact_burgers_shock(x: float, t: float) -> float:
    return 1.0 if x <= 0.5 * t else 0.0


def exact_burgers_rarefaction(x: float, t: float) -> float:
    if x < 0.0:
        return 0.0
    if t <= 0.0:
        return 1.0
    if x <= t:
        return x / t
    return 1.0


def exact_burgers_interaction(x: float, t: float) -> float:
    if x < 0.0:
        return 0.0
    if t <= 2.0:
        if t <= 0.0:
            return 1.0 if x <= 1.0 else 0.0
        if x < t:
            return x / t
        return 1.0 if x <= 1.0 + 0.5 * t else 0.0
    return x / t if x <= math.sqrt(2.0 * t) else 0.0


def interaction_shock_location(t: float) -> float:
    return 1.0 + 0.5 * t if t <= 2.0 else math.sqrt(2.0 * t)


_CONTACT_A, _CONTACT_B = -1.0, 4.0


def _contact_initial(x: float) -> float:
    return 1.0 if x <= 0.0 else 2.0


def _wrap_contact(x: float) -> float:
    # maps into (-1, 4]; the periodic image of x = -1 is x = 4 where u0 = 2
    period = _CONTACT_B - _CONTACT_A
    y = (x - _CONTACT_A) % period + _CONTACT_A
    return _CONTACT_B if y == _CONTACT_A else y


def exact_advection_contact(x: float, t: float) -> float:
    return _contact_initial(_wrap_contact(x - t))


def _contact_breaks(t: float) -> tuple:
    period = _CONTACT_B - _CONTACT_A
    out = []
    for jump in (0.0, _CONTACT_A):
        base = (jump + t - _CONTACT_A) % period + _CONTACT_A
        # images of the jump that can touch the domain or a few ghost cells
        out.extend(base + k * period for k in (-1, 0, 1))
    return tuple(out)


def _zero_ghost(grid: Grid1D, j: int, t: float) -> float:
    return 0.0


def _exact_ghost(problem_ref: list) -> Callable[[Grid1D, int, float], float]:
    def ghost(grid: Grid1D, j: int, t: float) -> float:
        return problem_ref[0].exact_average(grid, j, t)

    return ghost


def _with_exact_dirichlet(**kwargs) -> ProblemSpec:
    ref: list = []
    spec = ProblemSpec(bc=BoundaryCondition.dirichlet(_exact_ghost(ref)), **kwargs)
    ref.append(spec)
    return spec


def _build_registry() -> dict[str, ProblemSpec]:
    two_pi = 2.0 * math.pi
    periodic = BoundaryCondition.periodic()
    zero_dirichlet = BoundaryCondition.dirichlet(_zero_ghost)
    problems = [
        ProblemSpec(
            key="advection-sine",
            pde=PDE.ADVECTION,
            flux=Flux(FluxKind.LINEAR, 1.0),
            mu=0.0,
            domain=(0.0, two_pi),
            initial=math.sin,
            bc=periodic,
            exact=exact_advection_sine,
        ),
        ProblemSpec(
            key="advection-contact",
            pde=PDE.ADVECTION,
            flux=Flux(FluxKind.LINEAR, 1.0),
            mu=0.0,
            domain=(_CONTACT_A, _CONTACT_B),
            initial=_contact_initial,
            bc=periodic,
            exact=exact_advection_contact,
            breakpoints=_contact_breaks,
        ),
        ProblemSpec(
            key="heat",
            pde=PDE.HEAT,
            flux=Flux(FluxKind.NONE),
            mu=1.0,
            domain=(0.0, 1.0),
            initial=lambda x: math.sin(math.pi * x),
            bc=periodic,
            exact=exact_heat,
        ),
        # u_t = u_xx + u_x, i.e. flux f(u) = -u
        ProblemSpec(
            key="convdiff",
            pde=PDE.LINEAR_CONVDIFF,
            flux=Flux(FluxKind.LINEAR, -1.0),
            mu=1.0,
            domain=(0.0, two_pi),
            initial=math.sin,
            bc=periodic,
            exact=exact_convdiff,
        ),
        ProblemSpec(
            key="burgers-sine",
            pde=PDE.INVISCID_BURGERS,
            flux=Flux(FluxKind.BURGERS),
            mu=0.0,
            domain=(0.0, two_pi),
            initial=math.sin,
            bc=zero_dirichlet,
        ),
        _with_exact_dirichlet(
            key="burgers-shock",
            pde=PDE.INVISCID_BURGERS,
            flux=Flux(FluxKind.BURGERS),
            mu=0.0,
            domain=(-1.0, 5.0),
            initial=lambda x: 1.0 if x <= 0.0 else 0.0,
            exact=exact_burgers_shock,
            breakpoints=lambda t: (0.5 * t,),
        ),
        _with_exact_dirichlet(
            key="burgers-rarefaction",
            pde=PDE.INVISCID_BURGERS,
            flux=Flux(FluxKind.BURGERS),
            mu=0.0,
            domain=(-1.0, 5.0),
            initial=lambda x: 0.0 if x < 0.0 else 1.0,
            exact=exact_burgers_rarefaction,
            breakpoints=lambda t: (0.0, t),
        ),
        _with_exact_dirichlet(
            key="burgers-interaction",
            pde=PDE.INVISCID_BURGERS,
            flux=Flux(FluxKind.BURGERS),
            mu=0.0,
            domain=(-1.0, 5.0),
            initial=lambda x: 1.0 if 0.0 <= x <= 1.0 else 0.0,
            exact=exact_burgers_interaction,
            breakpoints=lambda t: (0.0, t, 1.0 + 0.5 * t) if t <= 2.0 else (0.0, math.sqrt(2.0 * t)),
        ),
        ProblemSpec(
            key="viscous-burgers",
            pde=PDE.VISCOUS_BURGERS,
            flux=Flux(FluxKind.BURGERS),
            mu=0.1,
            domain=(0.0, two_pi),
            initial=math.sin,
            bc=zero_dirichlet,
        ),
    ]
    return {p.key: p for p in problems}


PROBLEMS: dict[str, ProblemSpec] = _build_registry()


def get_problem(key: str) -> ProblemSpec:
    try:
        return PROBLEMS[key]
    except KeyError:
        known = ", ".join(sorted(PROBLEMS))
        raise ConfigurationError(f"unknown problem {key!r}; known: {known}") from None
