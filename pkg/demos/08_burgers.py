# %% [markdown]
# # Burgers' equation: training on many time levels
#
# For a nonlinear problem one pair of levels does not determine the update,
# so the training set holds twenty consecutive levels up to t = 2.  Training
# visits them in order.  This script uses the interaction problem (a
# rarefaction that catches a shock after t = 2) and compares the two
# schedules the library offers:
#
# * per-level: K sweeps on level 0, then K on level 1, ... (the default);
# * epochs: K passes, each visiting every pair once.
#
# A reduced K keeps the run short; see the README for full-budget numbers.

# %%
from cann.evolve import evolve_to, jump_diagnostics, l2_error, right_of_peak
from cann.experiments import initial_field, load_config, make_model, make_training_set, reference_field
from cann.problems import interaction_shock_location
from cann.scheme import train

base = load_config("configs/ex8_burgers_interaction.toml").replace(K=5_000)
S = make_training_set(base)
print(f"{S.n_pairs} training pairs on {S.m + 1} levels")

for schedule in ("per-level", "epochs"):
    cfg = base.replace(schedule=schedule)
    model = make_model(cfg)
    train(model, S, cfg.train_config)
    f = initial_field(cfg.problem_spec, cfg.grid)
    for T in (2.0, 4.0):
        f = evolve_to(model, f, T).final
        e = l2_error(f, reference_field(cfg, T))
        try:
            loc = f"{jump_diagnostics(right_of_peak(f), 1.0, 0.0).location:.3f}"
        except ValueError as exc:
            loc = f"n/a ({exc})"
        print(f"{schedule:>9}  T={T}: L2 {e:.3e}, shock at {loc} (exact {interaction_shock_location(T):.3f})")
