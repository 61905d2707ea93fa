"""Q-Wiener increments, exact Ornstein-Uhlenbeck sampling and Gaussian moments.

The fast-mode process solves ``d eta = (1/eps) A eta dt + (sigma/sqrt(eps)) dW``
in slow time. Mode ``i`` is an independent OU process with rate
``alpha_i/eps`` and stationary variance ``sigma**2 lambda_i / (2 alpha_i)``,
which does not depend on ``eps``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateDecayError, InvalidStepError, NotForcedError
from .params import ModelParams, NoiseSpectrum

__all__ = [
    "FULL_NOISE",
    "REDUCED_NOISE",
    "HISTORY_NOISE",
    "SeededRng",
    "stream_rng",
    "wiener_increment",
    "OUState",
    "ou_exact_step",
    "ou_stationary_sample",
    "stationary_variance",
    "ou_autocovariance",
    "stochastic_convolution_variance",
    "pair_partitions",
    "isserlis_moment",
    "lagged_wick_integral",
]

# process ids: keep the SPDE noise, the reduced-model noise and the manifold
# history noise on disjoint streams
FULL_NOISE = 0
REDUCED_NOISE = 1
HISTORY_NOISE = 2


@dataclass(frozen=True)
class SeededRng:
    """Reproducible generator address: ``(seed, stream, process)``."""

    seed: int
    stream: int = 0
    process: int = FULL_NOISE

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream), int(self.process)))
        return np.random.Generator(np.random.PCG64(ss))


def stream_rng(seed: int, stream: int = 0, process: int = FULL_NOISE) -> np.random.Generator:
    return SeededRng(seed, stream, process).generator()


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def wiener_increment(spec: NoiseSpectrum, dt: float, rng, size=None) -> np.ndarray:
    """Increment of ``W`` over ``dt``: mode ``i`` gets ``sqrt(lambda_i) N(0, dt)``.

    ``size`` prepends batch dimensions. Only forced modes consume random numbers.
    """
    if not dt > 0:
        raise InvalidStepError(f"dt must be positive, got {dt!r}")
    rng = _as_generator(rng)
    shape = () if size is None else tuple(np.atleast_1d(size))
    out = np.zeros(shape + (spec.total_modes,))
    idx = spec.forced
    if idx.size:
        z = rng.standard_normal(shape + (idx.size,))
        out[..., idx] = z * np.sqrt(spec.array[idx] * dt)
    return out


def stationary_variance(params: ModelParams) -> np.ndarray:
    """Per-mode stationary variance ``sigma**2 lambda_i / (2 alpha_i)`` of the fast process.

    Unforced modes get 0. Raises :class:`DegenerateDecayError` when a forced
    mode has ``alpha_i <= 0``.
    """
    lam = params.spectrum.array
    alpha = params.alphas
    forced = lam > 0
    if np.any(alpha[forced] <= 0):
        bad = np.flatnonzero(forced & (alpha <= 0)) + 1
        raise DegenerateDecayError(f"forced modes {bad.tolist()} have no decay")
    out = np.zeros_like(lam)
    out[forced] = params.sigma**2 * lam[forced] / (2.0 * alpha[forced])
    return out


@dataclass(frozen=True)
class OUState:
    """Fast-mode OU process in slow time ``t``.

    ``rates`` are ``alpha_i/eps`` and ``diffusion`` is ``sigma*sqrt(lambda_i/eps)``;
    both vanish on unforced modes, which stay at zero.
    """

    values: np.ndarray
    rates: np.ndarray
    diffusion: np.ndarray
    t: float = 0.0

    @classmethod
    def from_params(cls, params: ModelParams, values=None, t: float = 0.0) -> "OUState":
        stationary_variance(params)  # validates decay on forced modes
        lam = params.spectrum.array
        forced = lam > 0
        rates = np.where(forced, params.alphas / params.eps, 0.0)
        diffusion = params.sigma * np.sqrt(lam / params.eps)
        if values is None:
            values = np.zeros(params.M)
        return cls(np.asarray(values, dtype=float), rates, diffusion, float(t))

    @property
    def stationary_variance(self) -> np.ndarray:
        out = np.zeros_like(self.rates)
        m = self.rates > 0
        out[m] = self.diffusion[m] ** 2 / (2.0 * self.rates[m])
        return out


def _ou_factors(rates, diffusion, dt):
    decay = np.exp(-rates * dt)
    var = np.zeros_like(rates)
    m = rates > 0
    var[m] = diffusion[m] ** 2 / (2.0 * rates[m]) * -np.expm1(-2.0 * rates[m] * dt)
    var[~m] = diffusion[~m] ** 2 * dt
    return decay, np.sqrt(var)


def ou_exact_step(state: OUState, dt: float, rng) -> OUState:
    """Exact Gaussian OU transition over ``dt`` (no discretisation bias).

    ``state.values`` may carry leading batch axes.
    """
    if not dt > 0:
        raise InvalidStepError(f"dt must be positive, got {dt!r}")
    if np.any((state.rates <= 0) & (state.diffusion > 0)):
        raise DegenerateDecayError("forced mode without decay has no stationary law")
    rng = _as_generator(rng)
    decay, sd = _ou_factors(state.rates, state.diffusion, dt)
    vals = np.asarray(state.values)
    z = rng.standard_normal(vals.shape)
    return replace(state, values=vals * decay + sd * z, t=state.t + dt)


def ou_stationary_sample(spec: NoiseSpectrum, params: ModelParams, rng, size=None) -> OUState:
    """Draw from the stationary law ``N(0, sigma**2 (-A)^{-1} Q / 2)``."""
    if spec != params.spectrum:
        params = params.with_(spectrum=spec)
    var = stationary_variance(params)
    rng = _as_generator(rng)
    shape = () if size is None else tuple(np.atleast_1d(size))
    values = rng.standard_normal(shape + (params.M,)) * np.sqrt(var)
    return OUState.from_params(params, values)


def ou_autocovariance(mode: int, lag: float, params: ModelParams) -> float:
    """Stationary autocovariance ``v_i exp(-alpha_i lag)`` in unscaled fast time."""
    if lag < 0:
        raise ValueError("lag must be nonnegative")
    v = stationary_variance(params)[mode - 1]
    return float(v * math.exp(-params.alphas[mode - 1] * lag))


def stochastic_convolution_variance(mode: int, params: ModelParams) -> float:
    """Stationary variance of the linear stochastic convolution on a fast mode."""
    if mode <= params.N:
        raise NotForcedError(f"mode {mode} is slow (N={params.N})")
    return float(stationary_variance(params)[mode - 1])


@functools.lru_cache(maxsize=None)
def _pair_partitions(n: int):
    if n == 0:
        return ((),)
    if n % 2:
        return ()
    out = []
    for k in range(1, n):
        for rest in _pair_partitions(n - 2):
            # relabel the remaining n-2 positions
            remaining = [j for j in range(1, n) if j != k]
            out.append(((0, k),) + tuple((remaining[a], remaining[b]) for a, b in rest))
    return tuple(out)


def pair_partitions(n: int):
    """All perfect matchings of ``range(n)`` as tuples of index pairs ((n-1)!! of them)."""
    return _pair_partitions(int(n))


def isserlis_moment(cov, powers) -> float:
    """``E[prod_k X_k**powers[k]]`` for a centred Gaussian vector with covariance ``cov``.

    Sums products of covariances over all pair partitions; odd total degree
    gives 0.

    >>> isserlis_moment([[1.0]], [4])
    3.0
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    labels = [k for k, p in enumerate(powers) for _ in range(int(p))]
    if len(labels) % 2:
        return 0.0
    total = 0.0
    for matching in pair_partitions(len(labels)):
        prod = 1.0
        for a, b in matching:
            prod *= cov[labels[a], labels[b]]
            if prod == 0.0:
                break
        total += prod
    return float(total)


def lagged_wick_integral(left, right, variances, rates) -> float:
    """``int_0^inf Cov(prod eta_k(t) for k in left, prod eta_k(0) for k in right) dt``.

    The ``eta_k`` are independent stationary OU processes with variance
    ``variances[k]`` and autocovariance ``variances[k] exp(-rates[k] t)``.
    By Isserlis the covariance is the sum over pair partitions that contain at
    least one pair linking the two times; each such term is a product of
    constants times ``exp(-t * sum of linked rates)``, integrated exactly.
    """
    labels = list(left) + list(right)
    n_left = len(left)
    if len(labels) % 2 or not left or not right:
        return 0.0
    total = 0.0
    for matching in pair_partitions(len(labels)):
        prod = 1.0
        rate = 0.0
        crossed = False
        for a, b in matching:
            ka, kb = labels[a], labels[b]
            if ka != kb:
                prod = 0.0
                break
            prod *= variances[ka]
            if (a < n_left) != (b < n_left):
                crossed = True
                rate += rates[ka]
        if crossed and prod != 0.0:
            total += prod / rate
    return float(total)
