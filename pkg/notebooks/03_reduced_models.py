"""
Averaged amplitude, Gaussian deviation and the slow-manifold SDE
================================================================

The slow amplitude obeys a Landau equation with a noise-shifted growth
rate.  Its Gaussian deviation has an explicit covariance; the slow-manifold
SDE carries multiplicative noise instead.
"""

# %%
import math

import numpy as np

from srde_reduce import (
    averaged_drift,
    covariance_B_quadrature,
    example_params,
    integrate_averaged,
    integrate_deviation,
    landau_equilibrium,
    reconstruct,
    simulate_manifold,
)
from srde_reduce.reduced import averaged_derivative_drift

eps = 0.1
p = example_params(eps)

# %%
# Averaged equation
# -----------------
# ``A' = (gamma - sigma^2/4) A - 3/4 A^3``: noise on mode 2 delays the
# bifurcation.
print("drift at A = 0.5:", averaged_drift([0.5], p))
print("equilibrium A*:", landau_equilibrium(p))
print("Jacobian at A*:", averaged_derivative_drift([1.0], p)[0, 0])

t, U = integrate_averaged([0.2], p, T=6.0, dt=0.01)
print("A(t) every 1 slow unit:", np.round(U[::100, 0], 4))

# %%
# Deviation covariance
# --------------------
B = covariance_B_quadrature([1.0], p).B[0, 0]
print("B at A* (closed form 1/24):", B)
print("stationary deviation std, sqrt(B / 3):", math.sqrt(B / 3.0))

# %%
# Reconstructing the amplitude
# ----------------------------
ts = np.arange(0, 2001) * 0.005
Ueq = np.ones((ts.size, 1))
rho = integrate_deviation(ts, Ueq, p, range(200), seed=1)
print("deviation std over 200 paths:", rho[:, 500:, 0].std())
rec = reconstruct(ts, Ueq[:, 0], rho[0, :, 0], eps)
print("reconstructed a / sqrt(eps), first path, tail:", np.round(rec.amplitude[-5:] / math.sqrt(eps), 4))

# %%
# Slow-manifold SDE
# -----------------
times, a = simulate_manifold(p, T=200.0, dt=0.01, streams=range(100), seed=2, stride=20)
tail = a[:, a.shape[1] // 2:]
print("manifold mean / sqrt(eps):", tail.mean() / math.sqrt(eps))
print("manifold std / eps:", tail.std() / eps)
