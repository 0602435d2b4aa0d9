# %% [markdown]
# # Time steps far beyond the CFL limit
#
# An explicit upwind scheme needs Δt ≤ Δx for advection.  Here Δx = π/40 is
# fixed and Δt = 2Δx, 5Δx and 8Δx, all with the same two-cell upwind stencil
# — so for Δt > Δx the stencil does not even contain the domain of
# dependence.  Each network is trained on its own single pair (t_0, t_1);
# the errors at T = π stay at the same level for all three time steps.

# %%
import math

from cann.evolve import evolve_to, l2_error
from cann.experiments import initial_field, load_config, make_model, make_training_set, reference_field
from cann.scheme import train

for row in (1, 2, 3):
    cfg = load_config(f"configs/t2_row{row}.toml").replace(K=100_000)
    model = make_model(cfg)
    train(model, make_training_set(cfg), cfg.train_config)
    traj = evolve_to(model, initial_field(cfg.problem_spec, cfg.grid), math.pi)
    e = l2_error(traj.final, reference_field(cfg, math.pi))
    print(f"dt = {cfg.dt_multiple:g} dx: {len(traj) - 1:>3} steps, L2 {e:.3e}")
