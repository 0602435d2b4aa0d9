import math

import numpy as np
import pytest

from cann.errors import ConfigurationError
from cann.problems import (
    PROBLEMS,
    exact_advection_sine,
    exact_burgers_interaction,
    exact_burgers_rarefaction,
    exact_burgers_shock,
    exact_convdiff,
    exact_heat,
    get_problem,
    interaction_shock_location,
)


def test_advection_sine_values():
    assert exact_advection_sine(0, 0) == 0
    assert exact_advection_sine(math.pi / 2, 0) == pytest.approx(1.0)
    assert exact_advection_sine(1.0, 1.0) == 0.0


def test_heat_values():
    assert exact_heat(0.5, 0) == pytest.approx(1.0)
    assert exact_heat(0.5, 0.1) == pytest.approx(math.exp(-0.1 * math.pi**2))
    assert exact_heat(0.5, 0.1) == pytest.approx(0.372708, abs=5e-7)
    x = 0.3
    assert exact_heat(x, 0.07) / exact_heat(x, 0) == pytest.approx(math.exp(-0.07 * math.pi**2))


def test_convdiff_values():
    assert exact_convdiff(1.3, 0) == pytest.approx(math.sin(1.3))
    assert exact_convdiff(0.0, math.pi / 2) == pytest.approx(math.exp(-math.pi / 2))
    for t in (0.1, 0.7, 2.0):
        assert exact_convdiff(math.pi - t, t) == pytest.approx(0.0, abs=1e-15)


def test_shock_values():
    assert exact_burgers_shock(0.4, 1.0) == 1
    assert exact_burgers_shock(0.6, 1.0) == 0
    assert exact_burgers_shock(0.0, 0.0) == 1


def test_rarefaction_values():
    assert exact_burgers_rarefaction(-0.5, 1) == 0
    assert exact_burgers_rarefaction(0.5, 1) == 0.5
    assert exact_burgers_rarefaction(2, 1) == 1


def test_interaction_values():
    assert exact_burgers_interaction(1.5, 1.0) == 1
    assert exact_burgers_interaction(math.sqrt(8) - 1e-9, 4.0) == pytest.approx(math.sqrt(8) / 4, abs=1e-9)
    assert exact_burgers_interaction(3.0, 4.0) == 0


def test_interaction_shock_continuous_at_merge():
    assert interaction_shock_location(2.0) == pytest.approx(2.0)
    assert math.sqrt(2 * 2.0) == pytest.approx(2.0)
    assert interaction_shock_location(2.0 + 1e-12) == pytest.approx(2.0, abs=1e-9)


def test_rankine_hugoniot_speed():
    f = lambda u: 0.5 * u * u
    assert (f(1.0) - f(0.0)) / (1.0 - 0.0) == 0.5
    # exact shock sits at t/2
    for t in (0.5, 2.0, 6.0):
        assert exact_burgers_shock(t / 2 - 1e-12, t) == 1
        assert exact_burgers_shock(t / 2 + 1e-12, t) == 0


def test_viscosity_invariants():
    for p in PROBLEMS.values():
        if p.key.startswith("advection") or p.key in ("burgers-sine", "burgers-shock", "burgers-rarefaction", "burgers-interaction"):
            assert p.mu == 0.0
        else:
            assert p.mu > 0
    assert get_problem("heat").mu == 1.0
    assert get_problem("convdiff").mu == 1.0
    assert get_problem("viscous-burgers").mu == 0.1


@pytest.mark.parametrize("key", [k for k, p in PROBLEMS.items() if p.exact is not None])
def test_exact_matches_initial(key):
    p = PROBLEMS[key]
    rng = np.random.default_rng(1)
    a, b = p.domain
    for x in rng.uniform(a, b, 200):
        assert p.exact(x, 0.0) == pytest.approx(p.initial(x), abs=1e-12)


def _residual(p, x, t, h=1e-4):
    u = lambda x_, t_: p.exact(x_, t_)
    ut = (u(x, t + h) - u(x, t - h)) / (2 * h)
    fx = (p.flux(u(x + h, t)) - p.flux(u(x - h, t))) / (2 * h)
    uxx = (u(x + h, t) - 2 * u(x, t) + u(x - h, t)) / h**2
    return ut + fx - p.mu * uxx


def _smooth(p, x, t, margin=1e-2):
    return all(abs(x - s) > margin for s in p.breakpoints(t))


@pytest.mark.parametrize("key", [k for k, p in PROBLEMS.items() if p.exact is not None])
def test_exact_solutions_satisfy_pde(key):
    p = PROBLEMS[key]
    rng = np.random.default_rng(7)
    a, b = p.domain
    checked = 0
    while checked < 100:
        x, t = rng.uniform(a, b), rng.uniform(0.1, 3.0)
        if not _smooth(p, x, t):
            continue
        assert abs(_residual(p, x, t)) <= 1e-6
        checked += 1


def test_contact_solution_is_periodic_shift():
    p = get_problem("advection-contact")
    assert p.exact(0.5, 1.0) == 1.0  # 0.5 - 1 = -0.5 <= 0
    assert p.exact(1.5, 1.0) == 2.0
    # one full period later the profile is back
    for x in np.linspace(-0.99, 3.99, 37):
        assert p.exact(x, 5.0) == p.exact(x, 0.0)


def test_exact_averages_split_at_shock():
    p = get_problem("burgers-shock")
    g = p.grid(100)
    avgs = p.exact_averages(g, 1.0)
    # shock at 0.5 lies in cell [0.5-0.02, ...]: cells are [-1 + 0.06(j-1), ...]
    assert np.all((avgs == 0.0) | (avgs == 1.0) | ((avgs > 0) & (avgs < 1)))
    assert np.sum(avgs) * g.dx == pytest.approx(1.0 + 0.5, abs=1e-13)


def test_unknown_problem():
    with pytest.raises(ConfigurationError):
        get_problem("nope")
