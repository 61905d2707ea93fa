"""Time integration of the full stochastic reaction-diffusion equation.

Two systems are integrated in fast time ``t``:

* the physical equation ``w_t = A w + eps*gamma*w - c0*w**3 + sigma*sqrt(eps) W_t``;
* the separated system where ``A`` is replaced by the high-pass filter
  ``A_N = (Q_N + eps P_N) A`` (identical to the first at ``eps = 1``).

The default scheme is semi-implicit Euler-Maruyama: the linear part is
implicit per mode, the cubic explicit, the additive noise Euler-Maruyama.
An exponential-Euler variant (exact linear propagator and exact OU noise
convolution) is available as ``scheme="exponential"``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InvalidStepError
from .noise import FULL_NOISE, SeededRng, wiener_increment
from .params import ModelParams
from .spectral import an_diagonal, cubic_galerkin, collocation_grid

__all__ = [
    "SimConfig",
    "Trajectory",
    "BatchResult",
    "equilibrium_amplitude",
    "initial_field",
    "step_full",
    "simulate_batch",
    "simulate_full",
    "simulate_coupled",
    "slow_amplitude",
]

BACKENDS = ("spectral", "finite-difference")
SCHEMES = ("semi-implicit", "exponential")


@dataclass(frozen=True)
class SimConfig:
    """Integration settings, all in fast time.

    ``a0`` is the initial amplitude of ``sin x`` (other modes start at 0);
    ``None`` starts on the deterministic pitchfork equilibrium
    ``sqrt(4 eps*gamma / 3)``. ``cubic=False`` drops the nonlinearity (linear
    test problem). ``monitor_mode`` picks which sine coefficient is recorded
    as the trajectory's amplitude (1 = fundamental). ``slow_dt`` is the
    slow-time step used when the same config drives a reduced model.
    """

    dt: float = 1e-3
    T: float = 10.0
    backend: str = "spectral"
    grid_points: int = 15
    stride: int = 100
    seed: int = 0
    stream: int = 0
    scheme: str = "semi-implicit"
    a0: float | None = None
    cubic: bool = True
    keep_fields: bool = False
    monitor_mode: int = 1
    slow_dt: float = 0.01
    chunk_steps: int = 2048

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidStepError(f"dt must be positive, got {self.dt!r}")
        if not self.T >= 0:
            raise ValueError(f"T must be nonnegative, got {self.T!r}")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.grid_points < 3:
            raise ValueError("finite-difference backend needs at least 3 grid points")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.monitor_mode < 1:
            raise ValueError("monitor_mode must be a positive mode index")
        if not self.slow_dt > 0:
            raise InvalidStepError(f"slow_dt must be positive, got {self.slow_dt!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass
class Trajectory:
    """Sampled amplitude of the fundamental, plus optional field snapshots.

    ``fields`` has one row per entry of ``times``: mode coefficients
    (``field_kind="modes"``) or grid values (``"grid"``).
    """

    times: np.ndarray
    amplitude: np.ndarray
    fields: np.ndarray | None = None
    field_kind: str = "modes"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.amplitude = np.asarray(self.amplitude, dtype=float)
        if self.times.shape != self.amplitude.shape:
            raise ValueError("times and amplitude lengths differ")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.fields is not None and len(self.fields) != len(self.times):
            raise ValueError("snapshot count differs from time samples")

    def __len__(self):
        return self.times.size

    def columns(self) -> list[str]:
        cols = ["t", "a"]
        if self.fields is not None:
            prefix = "c" if self.field_kind == "modes" else "u"
            cols += [f"{prefix}{k + 1}" for k in range(self.fields.shape[1])]
        return cols

    def to_csv(self, path) -> None:
        """Write ``t, a[, c1..cM | u1..uJ]`` with round-trip float precision."""
        rows = np.column_stack([self.times, self.amplitude] + ([self.fields] if self.fields is not None else []))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns())
            for row in rows:
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            data = np.array([[float(x) for x in row] for row in r]).reshape(-1, len(header))
        fields = data[:, 2:] if len(header) > 2 else None
        kind = "grid" if len(header) > 2 and header[2].startswith("u") else "modes"
        return cls(data[:, 0], data[:, 1], fields, kind)


def equilibrium_amplitude(params: ModelParams) -> float:
    """Deterministic pitchfork amplitude ``sqrt(4 eps*gamma / (3 c0))`` (0 below onset)."""
    return math.sqrt(max(4.0 * params.eps_gamma / (3.0 * params.c0), 0.0))


def initial_field(params: ModelParams, a0: float | None = None) -> np.ndarray:
    a = equilibrium_amplitude(params) if a0 is None else float(a0)
    w = np.zeros(params.M)
    w[0] = a
    return w


def slow_amplitude(w) -> np.ndarray:
    """Amplitude of ``sin x``: ``<w, e_1>``."""
    return np.asarray(w, dtype=float)[..., 0]


def _linear_diagonal(params: ModelParams, coupled: bool) -> np.ndarray:
    eps = params.eps if coupled else 1.0
    return an_diagonal(eps, params.N, params.basis) + params.eps_gamma


class _SpectralStepper:
    """Vectorised Galerkin update; ``z`` holds standard normals for the forced modes."""

    def __init__(self, params: ModelParams, dt: float, coupled: bool, cubic: bool, scheme: str,
                 monitor: int = 1):
        if monitor > params.M:
            raise ValueError(f"monitor_mode {monitor} exceeds M={params.M}")
        self.k = monitor - 1
        self.params = params
        self.dt = dt
        self.cubic = cubic
        self.c0 = params.c0
        lin = _linear_diagonal(params, coupled)
        self.forced = params.spectrum.forced
        lam = params.spectrum.array[self.forced]
        amp = params.sigma * math.sqrt(params.eps) * np.sqrt(lam)
        _, self.to_grid, self.to_modes = collocation_grid(params.M)
        if scheme == "semi-implicit":
            self.prop = 1.0 / (1.0 - dt * lin)
            self.nl = dt * self.prop
            self.noise = amp * math.sqrt(dt) * self.prop[self.forced]
        else:
            self.prop = np.exp(lin * dt)
            with np.errstate(divide="ignore", invalid="ignore"):
                self.nl = np.where(lin != 0, np.expm1(lin * dt) / lin, dt)
                lf = lin[self.forced]
                var = np.where(lf != 0, np.expm1(2 * lf * dt) / (2 * lf), dt)
            self.noise = amp * np.sqrt(var)

    def step(self, w: np.ndarray, z: np.ndarray) -> np.ndarray:
        new = w * self.prop
        if self.cubic:
            g = w @ self.to_grid
            new += self.nl * (-self.c0 * ((g * g * g) @ self.to_modes))
        new[..., self.forced] += self.noise * z
        return new

    def amplitude(self, w):
        return w[..., self.k]

class _FDStepper:
    """Second-order finite differences on ``J`` interior points, Dirichlet zeros."""

    def __init__(self, params: ModelParams, dt: float, J: int, cubic: bool, scheme: str,
                 monitor: int = 1):
        self.dt = dt
        self.cubic = cubic
        self.c0 = params.c0
        h = math.pi / (J + 1)
        self.x = np.arange(1, J + 1) * h
        lap = (np.diag(-2.0 * np.ones(J)) + np.diag(np.ones(J - 1), 1) + np.diag(np.ones(J - 1), -1)) / h**2
        L = lap + (params.basis.shift + params.eps_gamma) * np.eye(J)
        forced = params.spectrum.forced
        lam = params.spectrum.array[forced]
        # rows: forced modes; columns: grid points
        shape = np.sin(np.multiply.outer(forced + 1, self.x)) * np.sqrt(lam)[:, None]
        amp = params.sigma * math.sqrt(params.eps)
        if scheme != "semi-implicit":
            raise ValueError("the finite-difference backend only supports the semi-implicit scheme")
        R = np.linalg.inv(np.eye(J) - dt * L)
        self.propT = R.T.copy()
        self.nlT = dt * self.propT
        self.noise = amp * math.sqrt(dt) * (shape @ self.propT)
        self.dst = (2.0 / (J + 1)) * np.sin(monitor * self.x)

    def step(self, u: np.ndarray, z: np.ndarray) -> np.ndarray:
        new = u @ self.propT
        if self.cubic:
            new += (-self.c0 * u * u * u) @ self.nlT
        new += z @ self.noise
        return new

    def amplitude(self, u):
        return u @ self.dst


@dataclass
class BatchResult:
    """Output of :func:`simulate_batch`; rows of ``amplitude`` follow ``streams``."""

    times: np.ndarray
    amplitude: np.ndarray
    diverged: np.ndarray
    divergence_time: np.ndarray
    fields: np.ndarray | None = None
    field_kind: str = "modes"
    streams: tuple = ()


def _normals(generators, n_steps: int, nf: int) -> np.ndarray:
    # each trajectory consumes its own stream in step order, so the draws do
    # not depend on how trajectories are batched
    return np.stack([g.standard_normal((n_steps, nf)) for g in generators], axis=1)


def simulate_batch(
    params: ModelParams,
    config: SimConfig,
    streams,
    *,
    coupled: bool = False,
    w0=None,
) -> BatchResult:
    """Integrate one trajectory per stream id, vectorised over the batch.

    Divergent trajectories are flagged (and their time of blow-up recorded)
    rather than raising, so the rest of the batch is unaffected.
    """
    streams = tuple(int(s) for s in streams)
    B = len(streams)
    if config.backend == "finite-difference":
        if coupled:
            raise ValueError("the separated (A_N) system is only available with the spectral backend")
        stepper = _FDStepper(params, config.dt, config.grid_points, config.cubic, config.scheme,
                             config.monitor_mode)
        if w0 is None:
            a = equilibrium_amplitude(params) if config.a0 is None else config.a0
            state = np.tile(a * np.sin(stepper.x), (B, 1))
        else:
            w0 = np.asarray(w0, dtype=float)
            state = np.tile(w0, (B, 1)) if w0.ndim == 1 else w0.copy()
            if state.shape[1] != config.grid_points:
                state = state @ np.sin(np.multiply.outer(np.arange(1, state.shape[1] + 1), stepper.x))
        kind = "grid"
    else:
        stepper = _SpectralStepper(params, config.dt, coupled, config.cubic, config.scheme,
                                   config.monitor_mode)
        if w0 is None:
            state = np.tile(initial_field(params, config.a0), (B, 1))
        else:
            w0 = np.asarray(w0, dtype=float)
            state = np.tile(w0, (B, 1)) if w0.ndim == 1 else w0.copy()
        kind = "modes"

    gens = [SeededRng(config.seed, s, FULL_NOISE).generator() for s in streams]
    nf = params.spectrum.forced.size
    n_steps = config.n_steps
    stride = config.stride
    rec_steps = list(range(0, n_steps + 1, stride))
    times = np.array(rec_steps, dtype=float) * config.dt
    amps = np.empty((B, len(rec_steps)))
    fields = np.empty((len(rec_steps), B, state.shape[1])) if config.keep_fields else None
    amps[:, 0] = stepper.amplitude(state)
    if fields is not None:
        fields[0] = state
    diverged = ~np.all(np.isfinite(state), axis=1)
    div_time = np.where(diverged, 0.0, np.nan)

    k = 1
    step = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while step < n_steps:
            chunk = min(config.chunk_steps, n_steps - step)
            z = _normals(gens, chunk, nf)
            for c in range(chunk):
                state = stepper.step(state, z[c])
                step += 1
                if step % stride == 0:
                    amps[:, k] = stepper.amplitude(state)
                    if fields is not None:
                        fields[k] = state
                    bad = ~np.isfinite(amps[:, k]) & ~diverged
                    if bad.any():
                        diverged |= bad
                        div_time[bad] = step * config.dt
                    k += 1
    final_bad = ~np.all(np.isfinite(state), axis=1) & ~diverged
    if final_bad.any():
        diverged |= final_bad
        div_time[final_bad] = n_steps * config.dt
    return BatchResult(times, amps, diverged, div_time, fields, kind, streams)


def _single(params, config, coupled, w0) -> Trajectory:
    res = simulate_batch(params, config, [config.stream], coupled=coupled, w0=w0)
    if res.diverged[0]:
        raise DivergenceError(res.divergence_time[0])
    fields = res.fields[:, 0, :] if res.fields is not None else None
    meta = {"model": "coupled" if coupled else "full", "seed": config.seed, "stream": config.stream}
    return Trajectory(res.times, res.amplitude[0], fields, res.field_kind, meta)


def simulate_full(params: ModelParams, config: SimConfig, w0=None) -> Trajectory:
    """One realisation of the physical SPDE over ``[0, config.T]``.

    Raises :class:`DivergenceError` on blow-up.
    """
    return _single(params, config, False, w0)


def simulate_coupled(params: ModelParams, config: SimConfig, w0=None) -> Trajectory:
    """One realisation of the separated slow/fast system driven by ``A_N``.

    Shares the noise stream layout with :func:`simulate_full`, so at
    ``eps = 1`` the two give the same path for the same seed.
    """
    return _single(params, config, True, w0)


def step_full(state, params: ModelParams, dt: float, rng, *, cubic: bool = True) -> np.ndarray:
    """Single semi-implicit Euler-Maruyama step of the physical SPDE (spectral).

    Raises :class:`DivergenceError` (carrying ``dt``) if the result is not finite.
    """
    if not dt > 0:
        raise InvalidStepError(f"dt must be positive, got {dt!r}")
    w = np.asarray(state, dtype=float)
    if not np.all(np.isfinite(w)):
        raise DivergenceError(0.0, "non-finite input state")
    lin = _linear_diagonal(params, coupled=False)
    dW = wiener_increment(params.spectrum, dt, rng)
    rhs = w + params.sigma * math.sqrt(params.eps) * dW
    if cubic:
        rhs = rhs + dt * cubic_galerkin(w, params.c0)
    out = rhs / (1.0 - dt * lin)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(dt)
    return out
