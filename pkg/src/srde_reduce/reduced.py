"""Macroscopic reduced models for the slow modes.

Slow-time quantities (``t' = eps t``):

* averaged ODE ``u' = -alpha u + gamma u + P_N fbar(u)`` with
  ``fbar(u) = -c0 (u**3 + 3 u E[eta**2])``;
* Gaussian deviation ``d rho = J(u) rho dt' + sqrt(B(u)) dW``, where ``J`` is
  the Jacobian of the averaged drift and ``B`` the integrated autocovariance
  of the fluctuating part of ``P_N f0(u + eta)``;
* reconstruction ``a(t) = sqrt(eps) A(eps t) + eps rho(eps t)`` in fast time.

The stochastic slow-manifold model of the one-mode example lives in fast
time and is integrated directly.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import CovarianceError, DivergenceError, GridMismatchError, InvalidStepError
from .fullsim import Trajectory
from .noise import HISTORY_NOISE, REDUCED_NOISE, SeededRng, lagged_wick_integral, stationary_variance
from .params import ModelParams
from .spectral import coupling_tensor, cubic_galerkin

__all__ = [
    "AveragedState",
    "DeviationState",
    "CovarianceMatrix",
    "CovarianceModel",
    "ManifoldState",
    "eta_mean_square",
    "averaged_drift",
    "averaged_derivative_drift",
    "integrate_averaged",
    "covariance_B_quadrature",
    "covariance_B_closed_example",
    "deviation_step",
    "integrate_deviation",
    "reconstruct",
    "landau_equilibrium",
    "manifold_step",
    "simulate_manifold",
    "manifold_shape",
]


@dataclass(frozen=True)
class AveragedState:
    uN: np.ndarray
    t: float = 0.0


@dataclass(frozen=True)
class DeviationState:
    """Deviation ``rho`` on the slow modes; always starts from zero."""

    rho: np.ndarray
    t: float = 0.0

    @classmethod
    def zero(cls, N: int, t: float = 0.0) -> "DeviationState":
        return cls(np.zeros(N), t)


def eta_mean_square(params: ModelParams) -> np.ndarray:
    """``E[eta_i**2] = sigma**2 lambda_i / (2 alpha_i)`` for every mode (0 on unforced ones)."""
    return stationary_variance(params)


def _embed(uN, params: ModelParams) -> np.ndarray:
    uN = np.asarray(uN, dtype=float)
    if uN.shape[-1] != params.N:
        raise ValueError(f"slow state must have {params.N} entries, got {uN.shape[-1]}")
    out = np.zeros(uN.shape[:-1] + (params.M,))
    out[..., : params.N] = uN
    return out


@functools.lru_cache(maxsize=64)
def _noise_mass_matrix(params: ModelParams) -> np.ndarray:
    # E2[i, j] = <e_i e_j E[eta**2]> on the slow block
    T = coupling_tensor(params.M)
    v = eta_mean_square(params)
    N = params.N
    return np.einsum("ijkk,k->ij", T[:N, :N], v)


def averaged_drift(uN, params: ModelParams) -> np.ndarray:
    """Right side of the averaged equation on the slow modes.

    For the one-mode example with ``uN = [A]`` this is
    ``(gamma - sigma**2/4) A - (3/4) A**3``.
    """
    uN = np.asarray(uN, dtype=float)
    N = params.N
    lin = (params.gamma - params.alphas[:N]) * uN
    cubic = cubic_galerkin(_embed(uN, params), params.c0)[..., :N]
    noise = -3.0 * params.c0 * uN @ _noise_mass_matrix(params).T
    return lin + cubic + noise


def averaged_derivative_drift(uN, params: ModelParams) -> np.ndarray:
    """Linear drift of the deviation SDE: Jacobian of :func:`averaged_drift` at ``uN``.

    ``J = diag(gamma - alpha_i) - 3 c0 P_N[(u**2 + E[eta**2]) .]``
    """
    uN = np.asarray(uN, dtype=float)
    N = params.N
    T = coupling_tensor(params.M)[:N, :N, :N, :N]
    quad = np.einsum("ijkl,...k,...l->...ij", T, uN, uN)
    J = -3.0 * params.c0 * (quad + _noise_mass_matrix(params))
    J = J + np.diag(params.gamma - params.alphas[:N])
    return J


def landau_equilibrium(params: ModelParams) -> float:
    """Stable amplitude ``sqrt(4 (gamma - sigma**2/4) / 3)`` of the one-mode example (0 below onset)."""
    return math.sqrt(max(4.0 * (params.gamma - params.sigma**2 / 4.0) / (3.0 * params.c0), 0.0))


def integrate_averaged(u0, params: ModelParams, T: float, dt: float):
    """Classical RK4 for the averaged ODE over ``[0, T]`` in slow time.

    Returns ``(times, U)`` with ``U`` of shape ``(len(times), N)``.
    """
    if not dt > 0:
        raise InvalidStepError(f"dt must be positive, got {dt!r}")
    n = int(round(T / dt))
    u = np.asarray(u0, dtype=float).reshape(params.N)
    U = np.empty((n + 1, params.N))
    U[0] = u
    f = lambda x: averaged_drift(x, params)  # noqa: E731
    for k in range(n):
        k1 = f(u)
        k2 = f(u + 0.5 * dt * k1)
        k3 = f(u + 0.5 * dt * k2)
        k4 = f(u + dt * k3)
        u = u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise DivergenceError((k + 1) * dt)
        U[k + 1] = u
    return np.arange(n + 1) * dt, U


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric PSD ``B`` and its symmetric square root.

    Eigenvalues down to ``-tol * scale`` are clamped to zero; anything more
    negative, or an asymmetry above ``tol * scale``, raises :class:`CovarianceError`.
    """

    B: np.ndarray
    sqrt: np.ndarray

    @classmethod
    def from_matrix(cls, B, tol: float = 1e-12) -> "CovarianceMatrix":
        B = np.atleast_2d(np.asarray(B, dtype=float))
        scale = max(1.0, float(np.max(np.abs(B))) if B.size else 1.0)
        if np.max(np.abs(B - B.T), initial=0.0) > tol * scale:
            raise CovarianceError("covariance matrix is not symmetric")
        B = 0.5 * (B + B.T)
        vals, vecs = np.linalg.eigh(B)
        if vals.size and vals.min() < -tol * scale:
            raise CovarianceError(f"covariance has negative eigenvalue {vals.min():.3e}")
        vals = np.clip(vals, 0.0, None)
        root = (vecs * np.sqrt(vals)) @ vecs.T
        return cls(B, root)


def _multiset_weight(p: tuple, degree: int = 3) -> int:
    # number of ordered placements of the fast multiset p among the 3 cubic
    # slots (remaining slots are slow)
    d = len(p)
    w = math.factorial(degree) // math.factorial(degree - d)
    for m in Counter(p).values():
        w //= math.factorial(m)
    return w


class CovarianceModel:
    """Closed-form ``B(u_N)`` for one parameter set.

    ``P_N f0(u + eta)`` is a polynomial in the forced fast amplitudes with
    coefficients polynomial in ``u``. The lag integral of every pair of fast
    monomials is evaluated once (exactly, via pair partitions of OU
    autocovariances); ``B(u)`` is then ``2 C(u) W C(u)^T``.
    """

    def __init__(self, params: ModelParams):
        self.params = params
        N, M = params.N, params.M
        v = eta_mean_square(params)
        rates = params.alphas
        forced = [int(k) for k in np.flatnonzero(v > 0)]
        self.monomials = [
            p for d in (1, 2, 3) for p in itertools.combinations_with_replacement(forced, d)
        ]
        P = len(self.monomials)
        W = np.zeros((P, P))
        for a in range(P):
            for b in range(a, P):
                W[a, b] = W[b, a] = lagged_wick_integral(self.monomials[a], self.monomials[b], v, rates)
        self.W = W
        T = coupling_tensor(M)
        self._coef = []
        for p in self.monomials:
            d = len(p)
            # remaining 3 - d axes are the slow slots of the cubic
            G = T[(slice(0, N),) + p + (slice(0, N),) * (3 - d)]
            self._coef.append((3 - d, -params.c0 * _multiset_weight(p) * np.array(G)))

    def coefficients(self, uN) -> np.ndarray:
        """``C[..., i, p]``: coefficient of monomial ``p`` in ``<f0(u + eta), e_i>``."""
        uN = np.asarray(uN, dtype=float)
        batch = uN.shape[:-1]
        cols = []
        for nslow, G in self._coef:
            if nslow == 0:
                c = np.broadcast_to(G, batch + G.shape)
            elif nslow == 1:
                c = np.einsum("ij,...j->...i", G, uN)
            else:
                c = np.einsum("ijk,...j,...k->...i", G, uN, uN)
            cols.append(c)
        if not cols:
            return np.zeros(batch + (self.params.N, 0))
        return np.stack(cols, axis=-1)

    def matrix(self, uN) -> np.ndarray:
        C = self.coefficients(uN)
        return 2.0 * C @ self.W @ np.swapaxes(C, -1, -2)

    def __call__(self, uN) -> CovarianceMatrix:
        return CovarianceMatrix.from_matrix(self.matrix(uN))


@functools.lru_cache(maxsize=32)
def _covariance_model(params: ModelParams) -> CovarianceModel:
    return CovarianceModel(params)


def covariance_B_quadrature(uN, params: ModelParams) -> CovarianceMatrix:
    """Deviation covariance ``B(u_N)`` from the OU autocovariances, lag integrals in closed form."""
    return _covariance_model(params)(np.asarray(uN, dtype=float).reshape(params.N))


def covariance_B_closed_example(A: float, sigma: float) -> float:
    """``B = sigma**4 A**2 / 24`` for the example forced only in ``sin 2x``."""
    return sigma**4 * A**2 / 24.0


def deviation_step(state: DeviationState, uN, params: ModelParams, dt: float, rng) -> DeviationState:
    """Euler-Maruyama step of ``d rho = J(u_N) rho dt + sqrt(B(u_N)) dW``."""
    if not dt > 0:
        raise InvalidStepError(f"dt must be positive, got {dt!r}")
    gen = rng.generator() if isinstance(rng, SeededRng) else rng
    J = averaged_derivative_drift(uN, params)
    root = covariance_B_quadrature(uN, params).sqrt
    z = gen.standard_normal(params.N)
    rho = state.rho + dt * (J @ state.rho) + math.sqrt(dt) * (root @ z)
    if not np.all(np.isfinite(rho)):
        raise DivergenceError(state.t + dt)
    return DeviationState(rho, state.t + dt)


def integrate_deviation(times, U, params: ModelParams, streams, seed: int = 0) -> np.ndarray:
    """Deviation paths along a precomputed averaged trajectory, one per stream.

    Returns ``rho`` with shape ``(len(streams), len(times), N)``; ``rho(0) = 0``.
    """
    times = np.asarray(times, dtype=float)
    U = np.asarray(U, dtype=float).reshape(len(times), params.N)
    dts = np.diff(times)
    if np.any(dts <= 0):
        raise InvalidStepError("time grid must be strictly increasing")
    model = _covariance_model(params)
    Bs = model.matrix(U[:-1])
    Bs = 0.5 * (Bs + np.swapaxes(Bs, -1, -2))
    vals, vecs = np.linalg.eigh(Bs)
    scale = np.maximum(1.0, np.abs(Bs).max(axis=(-1, -2)))
    if np.any(vals.min(axis=-1) < -1e-12 * scale):
        raise CovarianceError("deviation covariance not PSD along the averaged path")
    roots = (vecs * np.sqrt(np.clip(vals, 0.0, None))[..., None, :]) @ np.swapaxes(vecs, -1, -2)
    Js = averaged_derivative_drift(U[:-1], params)
    # per-step linear update: rho_{n+1} = (I + dt J) rho_n + sqrt(dt) R z
    step = np.eye(params.N) + dts[:, None, None] * Js
    kick = np.sqrt(dts)[:, None, None] * roots
    streams = [int(s) for s in streams]
    z = np.stack(
        [SeededRng(seed, s, REDUCED_NOISE).generator().standard_normal((len(dts), params.N)) for s in streams],
        axis=1,
    )  # (steps, B, N)
    rho = np.zeros((len(streams), len(times), params.N))
    r = np.zeros((len(streams), params.N))
    for n in range(len(dts)):
        r = r @ step[n].T + z[n] @ kick[n].T
        rho[:, n + 1] = r
    if not np.all(np.isfinite(rho)):
        raise DivergenceError(times[-1])
    return rho


def reconstruct(slow_times, A, rho, eps: float, mode: int = 1) -> Trajectory:
    """Fast-time amplitude ``a(t) = sqrt(eps) A(eps t) + eps rho(eps t)``.

    ``A`` and ``rho`` are sampled on the shared slow grid ``slow_times``
    (scalars per time, or ``N``-vectors from which ``mode`` is taken).
    """
    slow_times = np.asarray(slow_times, dtype=float)
    A = np.asarray(A, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if A.ndim == 2:
        A = A[:, mode - 1]
    if rho.ndim == 2:
        rho = rho[:, mode - 1]
    if not (A.shape == rho.shape == slow_times.shape):
        raise GridMismatchError(
            f"grids differ: times {slow_times.shape}, A {A.shape}, rho {rho.shape}"
        )
    a = math.sqrt(eps) * A + eps * rho
    return Trajectory(slow_times / eps, a, meta={"model": "averaged+deviation", "eps": eps})


@dataclass(frozen=True)
class ManifoldState:
    """Amplitude ``a`` on the stochastic slow manifold and the two history convolutions.

    ``h1 = exp(-3t) * dbeta_2`` and ``h2 = exp(-3t) * exp(-3t) * dbeta_2``
    (convolutions over the past), so ``dh1 = -3 h1 dt + dbeta_2`` and
    ``dh2 = (h1 - 3 h2) dt``.
    """

    a: float
    h1: float = 0.0
    h2: float = 0.0
    t: float = 0.0


def _history_factors(dt: float, rate: float = 3.0):
    e = math.exp(-rate * dt)
    prop = np.array([[e, 0.0], [dt * e, e]])
    # covariance of int_0^dt exp(-rate s) [1, s] dbeta
    k = 2.0 * rate
    ek = math.exp(-k * dt)
    c11 = -math.expm1(-k * dt) / k
    c12 = (1.0 - ek * (1.0 + k * dt)) / k**2
    c22 = (2.0 - ek * ((k * dt) ** 2 + 2.0 * k * dt + 2.0)) / k**3
    cov = np.array([[c11, c12], [c12, c22]])
    chol = np.linalg.cholesky(cov + 1e-300 * np.eye(2))
    return prop, chol


def _manifold_coeffs(params: ModelParams):
    eps, g, s = params.eps, params.gamma, params.sigma
    return eps * (g - s**2 / 4.0), eps * s**2 / (2.0 * math.sqrt(6.0))


def manifold_step(state: ManifoldState, params: ModelParams, dt: float, rng) -> ManifoldState:
    """Euler-Maruyama step of the slow-manifold SDE (fast time), exact step for the histories.

    ``da = [eps (gamma - sigma**2/4) a - (3/4) a**3] dt + eps sigma**2 a / (2 sqrt 6) dbeta``
    """
    if not dt > 0:
        raise InvalidStepError(f"dt must be positive, got {dt!r}")
    gen = rng.generator() if isinstance(rng, SeededRng) else rng
    lin, amp = _manifold_coeffs(params)
    z = gen.standard_normal(3)
    a = state.a
    a_new = a + dt * (lin * a - 0.75 * a**3) + amp * a * math.sqrt(dt) * z[0]
    if not math.isfinite(a_new):
        raise DivergenceError(state.t + dt)
    prop, chol = _history_factors(dt)
    h = prop @ np.array([state.h1, state.h2]) + chol @ z[1:]
    return ManifoldState(a_new, float(h[0]), float(h[1]), state.t + dt)


def simulate_manifold(params: ModelParams, T: float, dt: float, streams, *, seed: int = 0, a0=None,
                      stride: int = 1, with_history: bool = False):
    """Ensemble of slow-manifold paths in fast time.

    ``a0`` defaults to the stochastic equilibrium ``sqrt(eps) * landau_equilibrium``.
    Returns ``(times, a)`` with ``a`` of shape ``(len(streams), n_samples)``; with
    ``with_history`` also ``(h1, h2)`` arrays of the same shape.
    """
    if not dt > 0:
        raise InvalidStepError(f"dt must be positive, got {dt!r}")
    streams = [int(s) for s in streams]
    n = int(round(T / dt))
    lin, amp = _manifold_coeffs(params)
    if a0 is None:
        a0 = math.sqrt(params.eps) * landau_equilibrium(params)
    B = len(streams)
    a = np.full(B, float(a0))
    rec = list(range(0, n + 1, stride))
    out = np.empty((B, len(rec)))
    out[:, 0] = a
    gens = [SeededRng(seed, s, REDUCED_NOISE).generator() for s in streams]
    z = np.stack([g.standard_normal(n) for g in gens], axis=1) if n else np.zeros((0, B))
    if with_history:
        hg = [SeededRng(seed, s, HISTORY_NOISE).generator() for s in streams]
        zh = np.stack([g.standard_normal((n, 2)) for g in hg], axis=1) if n else np.zeros((0, B, 2))
        prop, chol = _history_factors(dt)
        h = np.zeros((B, 2))
        hout = np.zeros((B, len(rec), 2))
    sq = math.sqrt(dt)
    k = 1
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(n):
            a = a + dt * (lin * a - 0.75 * a * a * a) + amp * sq * a * z[step]
            if with_history:
                h = h @ prop.T + zh[step] @ chol.T
            if (step + 1) % stride == 0:
                out[:, k] = a
                if with_history:
                    hout[:, k] = h
                k += 1
    times = np.array(rec, dtype=float) * dt
    if with_history:
        return times, out, (hout[..., 0], hout[..., 1])
    return times, out


def manifold_shape(state: ManifoldState, params: ModelParams, t: float | None = None) -> np.ndarray:
    """Field on the stochastic slow manifold, truncated at the displayed order.

    ``a e1 + (a**3/32) e3 + sqrt(eps) sigma h1 e2 + eps**1.5 gamma sigma h2 e2``
    """
    if params.M < 3:
        raise ValueError("manifold shape needs at least 3 modes")
    eps, g, s = params.eps, params.gamma, params.sigma
    w = np.zeros(params.M)
    w[0] = state.a
    w[2] = state.a**3 / 32.0
    w[1] = math.sqrt(eps) * s * state.h1 + eps**1.5 * g * s * state.h2
    return w
