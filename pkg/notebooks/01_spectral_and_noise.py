"""
Sine basis, cubic coupling and the forced Ornstein-Uhlenbeck mode
==================================================================

The field lives on (0, pi) with Dirichlet ends and is expanded in
``sin(k x)``.  This script shows the exact sine-product integrals behind the
cubic term and the stationary law of the one noisy mode.
"""

# %%
# Basis and projections
# ---------------------
import numpy as np

from srde_reduce import Basis, example_params, project_fast, project_slow, sine_product_integral
from srde_reduce.noise import SeededRng, ou_exact_step, ou_stationary_sample, stationary_variance
from srde_reduce.spectral import cubic_galerkin, mode

basis = Basis(6, shift=1.0)
print("decay rates alpha_k = k^2 - 1:", basis.eigenvalues)

w = np.arange(1.0, 7.0)
print("slow part:", project_slow(w, 1))
print("fast part:", project_fast(w, 1))

# %%
# Exact integrals of sine products (weight 2/pi)
# ----------------------------------------------
for idx in [(1, 1, 2, 2), (1, 1, 1, 1), (1, 1, 1, 3)]:
    print(idx, sine_product_integral(idx))

# %%
# The cubic term of a pure fundamental feeds the third harmonic:
# ``sin^3 x = (3 sin x - sin 3x) / 4``.
print("-(sin x)^3 in modes:", cubic_galerkin(mode(1, 6)))

# %%
# Noise on mode 2
# ---------------
# With unit noise on ``sin 2x`` the fast mode is an OU process whose
# stationary variance is ``sigma^2 / (2 * alpha_2) = 1/6`` for sigma = 1.
p = example_params(eps=0.1)
print("stationary variance per mode:", stationary_variance(p))

s = ou_stationary_sample(p.spectrum, p, SeededRng(0), size=50_000)
for k in range(20):
    s = ou_exact_step(s, 0.01, SeededRng(1, k))
print("sample variance after 20 exact steps:", s.values[:, 1].var())
