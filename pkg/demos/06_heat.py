# %% [markdown]
# # Heat equation with Δt = Δx
#
# An explicit scheme for u_t = u_xx needs Δt ≲ Δx²/2.  Here Δt = Δx = 1/40,
# twenty times larger than that bound at this mesh, with a symmetric
# seven-cell stencil.

# %%
from cann.evolve import evolve_to, l2_error, linf_error
from cann.experiments import initial_field, load_config, make_model, make_training_set, reference_field
from cann.scheme import train

cfg = load_config("configs/t4_row1.toml").replace(K=20_000)
model = make_model(cfg)
trace = train(model, make_training_set(cfg), cfg.train_config)
print(f"final squared training error {trace.final_error:.2e}")
traj = evolve_to(model, initial_field(cfg.problem_spec, cfg.grid), 0.1)
ref = reference_field(cfg, 0.1)
print(f"T = 0.1 after {len(traj) - 1} steps: L2 {l2_error(traj.final, ref):.3e}, "
      f"Linf {linf_error(traj.final, ref):.3e}")
