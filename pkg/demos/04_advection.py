# %% [markdown]
# # Learning an advection scheme from one pair of time levels
#
# u_t + u_x = 0 on [0, 2π] with periodic boundaries.  With Δt = Δx the exact
# update is a shift by one cell, so a two-cell upwind stencil suffices.  We
# train on the single pair (t_0, t_1) and then march to T = π.

# %%
import math

from cann.evolve import evolve_to, l2_error, linf_error
from cann.experiments import initial_field, load_config, make_model, make_training_set, reference_field
from cann.scheme import train

cfg = load_config("configs/t1_row2.toml").replace(K=100_000)  # Δx = π/20
S = make_training_set(cfg)
model = make_model(cfg)
trace = train(model, S, cfg.train_config)
print(f"{len(trace)} sweeps, final squared training error {trace.final_error:.2e}")

# %% [markdown]
# The trace is the Δx-weighted squared residual after each sweep.

# %%
errs = trace.levels[-1]
for i in (1, 10, 100, 1_000, 10_000, len(errs)):
    print(f"sweep {i:>7}: {errs[i - 1]:.3e}")

# %%
traj = evolve_to(model, initial_field(cfg.problem_spec, cfg.grid), math.pi)
ref = reference_field(cfg, math.pi)
print(f"T = π: L2 {l2_error(traj.final, ref):.3e}, Linf {linf_error(traj.final, ref):.3e} "
      f"after {len(traj) - 1} steps")
