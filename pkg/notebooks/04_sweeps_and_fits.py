"""
Parameter sweeps and linear fits
================================

Stationary statistics across the bifurcation parameter and the noise
strength.  Near onset ``E a^2`` grows like ``4/3 eps*gamma`` and the std of
``a`` like ``eps*sigma^2 / (6 sqrt 2)``.
"""

# %%
import math

from srde_reduce import SimConfig, example_params, linear_fit, sweep
from srde_reduce.stats import compare_models, run_ensemble

eps = 0.1
cfg = SimConfig(dt=0.01, T=100.0, stride=10)

# %%
# Mean square against eps*gamma
# -----------------------------
rows = sweep("gamma", [0.4, 0.7, 1.0], example_params(eps), cfg, n=40, base_seed=0, functional="a2")
for r in rows:
    print(f"eps*gamma = {r.covariate:.1f}: E a^2 = {r.stats.mean:.4f} +- {r.stats.stderr:.4f}")
fit = linear_fit([r.covariate for r in rows], [r.stats.mean for r in rows])
print(f"slope {fit.slope:.3f} (near-onset value 4/3), intercept {fit.intercept:.3f}")

# %%
# Std of a against eps*sigma^2
# ----------------------------
# Held at eps*gamma = 1 so every grid point stays well above onset.
rows = sweep("sigma", [0.2, 0.4, 0.6], example_params(eps, eps_gamma=1.0), cfg, n=40, base_seed=0)
fit = linear_fit([r.covariate for r in rows], [r.stats.std for r in rows])
print(f"std slope {fit.slope:.4f} (leading order 1 / (6 sqrt 2) = {1 / (6 * math.sqrt(2)):.4f}; higher-order terms lower it at eps*gamma = 1)")

# %%
# Full model against the reduced ones
# -----------------------------------
p = example_params(eps)
full = run_ensemble("full", p, cfg, 40, 0)
for model in ("averaged+deviation", "manifold"):
    c = compare_models(full, run_ensemble(model, p, cfg, 40, 0))
    print(f"{model}: mean diff {c.mean_rel_diff:.2%}, std diff {c.std_rel_diff:.2%}")
