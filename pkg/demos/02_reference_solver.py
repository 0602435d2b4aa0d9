# %% [markdown]
# # The finite-volume reference solver
#
# When no exact solution is available (Burgers with smooth data, viscous
# Burgers) the training pairs come from a fine-mesh MUSCL finite-volume
# solver, averaged back onto the coarse mesh.  Here we check it against the
# cases where the exact answer is known.

# %%
import math

from cann.evolve import jump_diagnostics, l2_error
from cann.grid import CellAverageField
from cann.problems import get_problem
from cann.refsolve import Limiter, ReferenceSolverConfig, reference_fv_solve

# %% [markdown]
# Unit shock for Burgers: speed 1/2 by Rankine-Hugoniot, so at t = 3 it sits
# at x = 1.5.

# %%
p = get_problem("burgers-shock")
g = p.grid(1600)
u = reference_fv_solve(p, g, 3.0)
d = jump_diagnostics(u, 1.0, 0.0)
print(f"shock at x = {d.location:.5f}  (fine cells off: {abs(d.location - 1.5) / g.dx:.2f})")
print(f"spread over {d.width_cells} cells, overshoot {d.overshoot:.1e}")

# %% [markdown]
# On smooth data the unlimited MUSCL scheme is second order.  Minmod clips
# the slopes at extrema and loses some of that in L2.

# %%
s = get_problem("advection-sine")
for limiter in (Limiter.NONE, Limiter.MINMOD):
    errs = []
    for J in (160, 320, 640):
        gs = s.grid(J)
        v = reference_fv_solve(s, gs, math.pi, ReferenceSolverConfig(limiter=limiter))
        errs.append(l2_error(v, CellAverageField(gs, s.exact_averages(gs, math.pi), math.pi)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    print(limiter.value, ["%.2e" % e for e in errs], "orders", ["%.2f" % o for o in orders])
