"""
Simulating the full Galerkin model
==================================

One realisation of the stochastic reaction-diffusion equation near the
pitchfork, in the spectral and finite-difference discretisations.
"""

# %%
import math

import numpy as np

from srde_reduce import SimConfig, example_params, simulate_batch, simulate_full
from srde_reduce.fullsim import equilibrium_amplitude

eps = 0.1
p = example_params(eps)  # eps*gamma = 1, eps*sigma^2 = 1

# %%
# Spectral backend, semi-implicit Euler-Maruyama
# ----------------------------------------------
cfg = SimConfig(dt=0.005, T=50.0, stride=200, seed=0)
traj = simulate_full(p, cfg)
print("start amplitude:", equilibrium_amplitude(p))
print("a(t) / sqrt(eps) every 1 time unit:")
print(np.round(traj.amplitude / math.sqrt(eps), 3))

# %%
# Finite differences on 15 interior points
# ----------------------------------------
fd = simulate_full(p, SimConfig(dt=0.001, T=10.0, stride=1000, backend="finite-difference",
                                grid_points=15, seed=0))
print("finite-difference a(t) / sqrt(eps):", np.round(fd.amplitude / math.sqrt(eps), 3))

# %%
# A batch of independent streams
# ------------------------------
# Every stream has its own seeded generator, so any trajectory can be
# regenerated alone.
res = simulate_batch(p, SimConfig(dt=0.005, T=100.0, stride=20), range(50))
late = res.amplitude[:, res.amplitude.shape[1] // 2:]
print("ensemble mean / sqrt(eps):", late.mean() / math.sqrt(eps))
print("ensemble std / eps:", late.std() / eps)
