"""Analytic-oracle invariant suite run by ``srde-reduce verify``.

Each check compares an implementation against an independent route
(quadrature, Monte Carlo, finite differences or a closed form) and reports
the observed error next to its tolerance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .noise import OUState, SeededRng, ou_exact_step, stationary_variance
from .params import example_params
from .reduced import (
    averaged_derivative_drift,
    averaged_drift,
    covariance_B_closed_example,
    covariance_B_quadrature,
    integrate_averaged,
    landau_equilibrium,
)
from .spectral import Basis, apply_AN, project_fast, project_slow, sine_product_integral

__all__ = ["Check", "run_checks", "all_passed"]


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.error) and self.error <= self.tolerance)


def _projection_check() -> Check:
    rng = np.random.default_rng(0)
    basis = Basis(8, 1.0)
    worst = 0.0
    for N in range(1, 8):
        w = rng.standard_normal((16, 8))
        P, Q = project_slow(w, N), project_fast(w, N)
        worst = max(
            worst,
            float(np.max(np.abs(P + Q - w))),
            float(np.max(np.abs(project_slow(P, N) - P))),
            float(np.max(np.abs(project_slow(Q, N)))),
            float(np.max(np.abs(apply_AN(w, 1.0, N, basis) + basis.eigenvalues * w))),
        )
    return Check("projection algebra", worst, 0.0, "P+Q=I, P^2=P, PQ=0, A_N(eps=1)=A")


def _sine_integral_check() -> Check:
    x = np.linspace(0.0, math.pi, 40001)
    worst = 0.0
    for n in (2, 3, 4):
        for idx in itertools.combinations_with_replacement(range(1, 7), n):
            f = np.prod([np.sin(i * x) for i in idx], axis=0)
            ref = 2.0 / math.pi * simpson(f, x=x)
            worst = max(worst, abs(sine_product_integral(idx) - ref))
    return Check("sine product integral vs Simpson", worst, 1e-10)


def _ou_variance_check(samples: int = 100_000) -> Check:
    params = example_params(eps=0.1)
    v = stationary_variance(params)[1]
    state = OUState.from_params(params, np.zeros((samples, params.M)))
    rng = SeededRng(12345).generator()
    # ten relaxation times from rest: the residual transient is e^{-60}
    for _ in range(10):
        state = ou_exact_step(state, params.eps / params.alphas[1], rng)
    x = state.values[:, 1]
    se = v * math.sqrt(2.0 / (samples - 1))
    z = abs(float(np.var(x, ddof=1)) - v) / se
    return Check("OU stationary variance (z-score)", z, 3.0, f"analytic {v:.6g}")


def _covariance_check() -> Check:
    worst = 0.0
    for A, sigma in itertools.product((0.0, 0.5, 1.0, 2.0), (0.5, 1.0, 1.5)):
        p = example_params(eps=0.1, gamma=1.0, sigma=sigma)
        got = covariance_B_quadrature(np.array([A]), p).B[0, 0]
        ref = covariance_B_closed_example(A, sigma)
        err = abs(got - ref) if ref == 0 else abs(got - ref) / ref
        worst = max(worst, err)
    return Check("B quadrature vs closed form (relative)", worst, 1e-6)


def _landau_check() -> Check:
    p = example_params(eps=0.1, gamma=1.0, sigma=1.0)
    closed = landau_equilibrium(p)
    _, U = integrate_averaged(np.array([0.3]), p, 60.0, 0.01)
    err = max(abs(closed - 1.0), abs(U[-1, 0] - 1.0), abs(float(averaged_drift(np.array([1.0]), p)[0])))
    return Check("Landau equilibrium at gamma=sigma=c0=1", err, 1e-6)


def _jacobian_check() -> Check:
    worst = 0.0
    h = 1e-5
    for gamma, sigma, A in itertools.product((0.5, 1.0, 2.0), (0.0, 1.0, 1.5), (-1.2, 0.0, 0.4, 1.0)):
        p = example_params(eps=0.1, gamma=gamma, sigma=sigma)
        u = np.array([A])
        fd = (averaged_drift(u + h, p) - averaged_drift(u - h, p)) / (2 * h)
        J = averaged_derivative_drift(u, p)
        worst = max(worst, float(np.max(np.abs(np.atleast_2d(J) - fd))))
    return Check("averaged drift Jacobian vs finite differences", worst, 1e-6)


CHECKS = (
    _projection_check,
    _sine_integral_check,
    _ou_variance_check,
    _covariance_check,
    _landau_check,
    _jacobian_check,
)


def run_checks() -> list[Check]:
    """Run every oracle check; returns them in a fixed order."""
    return [fn() for fn in CHECKS]


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)
