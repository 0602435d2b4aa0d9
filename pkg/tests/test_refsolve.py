import math

import numpy as np
import pytest

from cann.errors import ConfigurationError
from cann.grid import BoundaryCondition, CellAverageField, Grid1D
from cann.problems import PDE, Flux, FluxKind, ProblemSpec, get_problem
from cann.refsolve import (
    Limiter,
    ReferenceSolverConfig,
    TrainingSet,
    _FineSolver,
    coarsen,
    generate_training_set_exact,
    generate_training_set_reference,
    reference_fv_solve,
    refine_by_copy,
)


def test_exact_training_set_one_level():
    p = get_problem("advection-sine")
    g = p.grid(40)
    S = generate_training_set_exact(p, g, g.dx, 0)
    assert S.m == 0 and S.n_pairs == 40
    assert S.pairs.shape == (1, 40, 2)
    np.testing.assert_allclose(S.levels[1], p.exact_averages(g, g.dx))


def test_exact_training_set_burgers_shock():
    p = get_problem("burgers-shock")
    g = p.grid(100)
    S = generate_training_set_exact(p, g, 0.1, 19)
    assert S.n_pairs == 2000
    assert (S.m + 1) * S.dt == pytest.approx(2.0)
    # consecutive pairs share a level exactly
    pairs = S.pairs
    assert np.array_equal(pairs[:-1, :, 1], pairs[1:, :, 0])
    # total mass grows by the inflow flux 1/2 per unit time (exact, shock well inside)
    mass = S.levels.sum(axis=1) * g.dx
    np.testing.assert_allclose(np.diff(mass), 0.5 * 0.1, atol=1e-12)


def _constant_problem(c=0.3, mu=0.5):
    return ProblemSpec(
        key="const",
        pde=PDE.HEAT,
        flux=Flux(FluxKind.NONE),
        mu=mu,
        domain=(0.0, 1.0),
        initial=lambda x: c,
        bc=BoundaryCondition.periodic(),
        exact=lambda x, t: c,
    )


def test_constant_training_pairs():
    p = _constant_problem()
    S = generate_training_set_exact(p, p.grid(10), 0.05, 3)
    np.testing.assert_allclose(S.pairs, 0.3, rtol=1e-15)


def test_missing_exact_solution():
    p = get_problem("burgers-sine")
    with pytest.raises(ConfigurationError):
        generate_training_set_exact(p, p.grid(10), 0.1, 0)


def test_training_set_validation():
    with pytest.raises(ConfigurationError):
        TrainingSet(Grid1D(0, 1, 3), 0.1, np.zeros((1, 3)))
    with pytest.raises(ConfigurationError):
        TrainingSet(Grid1D(0, 1, 3), 0.1, np.full((2, 3), np.inf))


def test_constant_state_is_steady():
    p = _constant_problem()
    f = reference_fv_solve(p, p.grid(64), 0.05)
    np.testing.assert_allclose(f.values, 0.3, rtol=0, atol=1e-14)
    assert f.time == 0.05


def test_shock_speed_rankine_hugoniot():
    p = get_problem("burgers-shock")
    g = p.grid(1600)
    f = reference_fv_solve(p, g, 3.0)
    x = g.centers
    k = np.flatnonzero((f.values[:-1] - 0.5) * (f.values[1:] - 0.5) <= 0)
    assert k.size == 1
    k = k[0]
    s = (f.values[k] - 0.5) / (f.values[k] - f.values[k + 1])
    loc = x[k] + s * g.dx
    assert abs(loc - 1.5) <= 2 * g.dx


def _sine_l2(J, limiter):
    p = get_problem("advection-sine")
    g = p.grid(J)
    f = reference_fv_solve(p, g, math.pi, ReferenceSolverConfig(limiter=limiter))
    return math.sqrt(np.sum((f.values - p.exact_averages(g, math.pi)) ** 2) * g.dx)


def test_unlimited_muscl_is_second_order():
    e1, e2 = _sine_l2(320, Limiter.NONE), _sine_l2(640, Limiter.NONE)
    assert math.log2(e1 / e2) >= 1.8


def test_minmod_muscl_order():
    # clipping at the extrema costs some accuracy in L2
    e1, e2 = _sine_l2(320, Limiter.MINMOD), _sine_l2(640, Limiter.MINMOD)
    assert math.log2(e1 / e2) >= 1.5


def test_periodic_conservation_per_step():
    p = get_problem("burgers-sine")
    periodic = ProblemSpec(
        key="burgers-sine-periodic", pde=p.pde, flux=p.flux, mu=0.0, domain=p.domain,
        initial=p.initial, bc=BoundaryCondition.periodic(),
    )
    g = periodic.grid(400)
    solver = _FineSolver(periodic, g, ReferenceSolverConfig())
    u = periodic.initial_averages(g)
    mass0 = np.sum(u) * g.dx
    t = 0.0
    for k in range(30):
        dt = solver.stable_dt(u)
        u, t = solver.march(u, t, t + dt)
        assert abs(np.sum(u) * g.dx - mass0) <= 1e-12
    assert t > 0


@pytest.mark.parametrize("key", ["burgers-shock", "burgers-rarefaction", "burgers-interaction"])
def test_riemann_total_variation_does_not_grow(key):
    p = get_problem(key)
    g = p.grid(300)
    solver = _FineSolver(p, g, ReferenceSolverConfig())
    u = p.initial_averages(g)
    tv0 = np.sum(np.abs(np.diff(u)))
    t = 0.0
    for k in range(1, 31):
        u, t = solver.march(u, t, 0.1 * k)
        assert np.sum(np.abs(np.diff(u))) <= tv0 + 1e-10


def test_coarsen_examples():
    fine = CellAverageField(Grid1D(0, 1, 4), np.array([1.0, 1.0, 3.0, 3.0]))
    np.testing.assert_array_equal(coarsen(fine, Grid1D(0, 1, 2)).values, [1, 3])
    fine = CellAverageField(Grid1D(0, 1, 4), np.array([0.0, 2.0, 4.0, 6.0]))
    coarse = coarsen(fine, Grid1D(0, 1, 2))
    np.testing.assert_array_equal(coarse.values, [1, 5])
    assert 0.5 * coarse.values.sum() == pytest.approx(0.25 * fine.values.sum())


def test_coarsen_rejects_incompatible():
    fine = CellAverageField(Grid1D(0, 1, 6), np.zeros(6))
    with pytest.raises(ConfigurationError):
        coarsen(fine, Grid1D(0, 1, 4))
    with pytest.raises(ConfigurationError):
        coarsen(fine, Grid1D(0, 2, 3))


def test_coarsen_inverts_refine_by_copy():
    rng = np.random.default_rng(0)
    c = CellAverageField(Grid1D(-1, 5, 7), rng.normal(size=7), 1.5)
    back = coarsen(refine_by_copy(c, 16), c.grid)
    np.testing.assert_allclose(back.values, c.values, rtol=1e-15)


def test_reference_config_validation():
    with pytest.raises(ConfigurationError):
        ReferenceSolverConfig(cfl=1.5)
    with pytest.raises(ConfigurationError):
        ReferenceSolverConfig(refine_factor=4).check_for(get_problem("burgers-sine"))


def test_reference_matches_exact_single_level():
    p = get_problem("advection-sine")
    g = p.grid(40)
    exact = generate_training_set_exact(p, g, g.dx, 0)
    ref = generate_training_set_reference(p, g, g.dx, 0, ReferenceSolverConfig(refine_factor=16))
    assert np.max(np.abs(exact.levels - ref.levels)) <= 1e-3


def test_reference_snapshots_hit_levels():
    p = get_problem("viscous-burgers")
    g = p.grid(50)
    S = generate_training_set_reference(p, g, 0.1, 4, ReferenceSolverConfig(refine_factor=8))
    assert S.levels.shape == (6, 50)
    np.testing.assert_allclose(S.levels[0], p.initial_averages(g), rtol=0, atol=1e-14)
    # viscosity damps the wave
    assert np.max(np.abs(S.levels[-1])) < np.max(np.abs(S.levels[0]))
