"""Monte Carlo ensembles, stationary statistics, fits and model comparison.

Ensembles are split into fixed-size blocks of trajectories. Each trajectory
draws from its own ``(base_seed, stream)`` generator, blocks run on a thread
pool, and results are reassembled in stream order, so the statistics are
bit-identical whatever the number of threads.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DivergenceError, EnsembleFailureError
from .fullsim import SimConfig, Trajectory, equilibrium_amplitude, simulate_batch
from .params import ModelParams
from .reduced import integrate_averaged, integrate_deviation, simulate_manifold

__all__ = [
    "MODELS",
    "EnsembleStats",
    "FitResult",
    "Comparison",
    "SweepRow",
    "ensemble_paths",
    "summarize",
    "run_ensemble",
    "run_ensemble_functionals",
    "stationary_mean_var",
    "linear_fit",
    "multilinear_fit",
    "fitnum_fit",
    "sweep",
    "sweep_table",
    "write_sweep_csv",
    "compare_models",
    "convergence_order",
]

MODELS = ("full", "coupled", "averaged+deviation", "manifold")
MAX_DIVERGENT_FRACTION = 0.01
Z95 = 1.959963984540054


@dataclass(frozen=True)
class EnsembleStats:
    """Stationary summary of a monitored functional over an ensemble.

    ``stderr`` is the standard error of ``mean`` from batch means (one batch
    per trajectory once there are enough trajectories), which absorbs the
    autocorrelation of the time series. ``std_stderr`` is the delta-method
    standard error of ``std``.
    """

    n: int
    burn_in: float
    mean: float
    var: float
    stderr: float
    std_stderr: float
    divergences: int = 0
    n_batches: int = 0
    functional: str = "a"
    model: str = "full"

    @property
    def std(self) -> float:
        return math.sqrt(max(self.var, 0.0))

    def ci(self, z: float = Z95):
        return self.mean - z * self.stderr, self.mean + z * self.stderr

    def std_ci(self, z: float = Z95):
        return self.std - z * self.std_stderr, self.std + z * self.std_stderr


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    covariate_range: tuple
    n: int


@dataclass(frozen=True)
class Comparison:
    mean_rel_diff: float
    std_rel_diff: float
    mean_z: float
    std_z: float
    mean_overlap: bool
    std_overlap: bool

    @property
    def agree(self) -> bool:
        return self.mean_overlap and self.std_overlap


@dataclass
class SweepRow:
    covariate: float
    stats: EnsembleStats | None
    error: str | None = None


def _retained(n_samples: int, burn_in: float) -> slice:
    if not 0.0 <= burn_in < 1.0:
        raise ValueError("burn_in must be a fraction in [0, 1)")
    start = int(math.floor(burn_in * n_samples))
    if start >= n_samples:
        raise ValueError("empty post-burn-in window")
    return slice(start, n_samples)


def stationary_mean_var(traj, burn_in: float = 0.5):
    """Time-average mean and variance of a trajectory after discarding ``burn_in``.

    ``burn_in`` is a fraction of the samples; ``traj`` may be a
    :class:`Trajectory` or a 1-D array.
    """
    x = traj.amplitude if isinstance(traj, Trajectory) else np.asarray(traj, dtype=float)
    if x.size == 0:
        raise ValueError("empty trajectory")
    w = x[_retained(x.size, burn_in)]
    m = math.fsum(w) / w.size
    v = math.fsum((w - m) ** 2) / w.size
    return m, v


def summarize(samples, burn_in: float = 0.5, *, divergences: int = 0, functional: str = "a",
              model: str = "full", min_batches: int = 20) -> EnsembleStats:
    """Ensemble statistics from an array of sampled paths (rows = trajectories).

    ``functional="a2"`` monitors the square of the samples.
    """
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if functional == "a2":
        X = X * X
    elif functional != "a":
        raise ValueError(f"unknown functional {functional!r}")
    n = X.shape[0]
    if n == 0:
        raise ValueError("no trajectories to summarise")
    W = X[:, _retained(X.shape[1], burn_in)]
    per = max(1, -(-min_batches // n)) if n < min_batches else 1
    per = min(per, W.shape[1])
    L = W.shape[1] // per
    batches = W[:, : L * per].reshape(n * per, L)
    bm = batches.mean(axis=1)
    mean = math.fsum(bm) / bm.size
    dev = ((batches - mean) ** 2).mean(axis=1)
    var = math.fsum(dev) / dev.size
    nb = bm.size
    if nb > 1:
        stderr = math.sqrt(math.fsum((bm - mean) ** 2) / (nb - 1) / nb)
        dbar = var
        var_se = math.sqrt(math.fsum((dev - dbar) ** 2) / (nb - 1) / nb)
    else:
        stderr = var_se = float("nan")
    std = math.sqrt(max(var, 0.0))
    std_se = var_se / (2.0 * std) if std > 0 else 0.0
    return EnsembleStats(n, burn_in, mean, var, stderr, std_se, divergences, nb, functional, model)


def _start_amplitude(params, config) -> float:
    # every model starts where the full simulation does
    return equilibrium_amplitude(params) if config.a0 is None else float(config.a0)


def _block_paths(model, params, config, streams, base_seed):
    """Sampled amplitude paths for one block of streams: ``(times, paths, diverged)``."""
    if model in ("full", "coupled"):
        cfg = replace(config, seed=base_seed)
        res = simulate_batch(params, cfg, streams, coupled=(model == "coupled"))
        return res.times, res.amplitude, res.diverged
    if model == "averaged+deviation":
        eps = params.eps
        slow_T = config.T * eps
        dts = min(config.slow_dt, slow_T) if slow_T > 0 else config.slow_dt
        A0 = _start_amplitude(params, config) / math.sqrt(eps)
        ts, U = integrate_averaged(np.eye(params.N)[0] * A0, params, slow_T, dts)
        rho = integrate_deviation(ts, U, params, streams, seed=base_seed)
        stride = max(1, int(round(config.dt * config.stride * eps / dts)))
        a = math.sqrt(eps) * U[None, ::stride, 0] + eps * rho[:, ::stride, 0]
        return ts[::stride] / eps, a, ~np.all(np.isfinite(a), axis=1)
    if model == "manifold":
        times, a = simulate_manifold(params, config.T, config.dt, streams, seed=base_seed,
                                     a0=_start_amplitude(params, config),
                                     stride=config.stride)
        return times, a, ~np.all(np.isfinite(a), axis=1)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def ensemble_paths(model: str, params: ModelParams, config: SimConfig, n: int, base_seed: int = 0, *,
                   threads: int = 1, block_size: int = 50):
    """Run ``n`` trajectories on streams ``0..n-1``; returns ``(times, paths, diverged)``.

    Blocks of ``block_size`` streams are the unit of parallel work; the block
    layout does not depend on ``threads``.
    """
    if n < 1:
        raise ValueError("ensemble size must be >= 1")
    blocks = [list(range(s, min(s + block_size, n))) for s in range(0, n, block_size)]
    if threads <= 1 or len(blocks) == 1:
        results = [_block_paths(model, params, config, b, base_seed) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda b: _block_paths(model, params, config, b, base_seed), blocks))
    times = results[0][0]
    paths = np.concatenate([r[1] for r in results], axis=0)
    diverged = np.concatenate([r[2] for r in results])
    return times, paths, diverged


def run_ensemble_functionals(model: str, params: ModelParams, config: SimConfig, n: int, base_seed: int = 0,
                             *, functionals=("a", "a2"), burn_in: float = 0.5, threads: int = 1,
                             block_size: int = 50) -> dict:
    """Like :func:`run_ensemble` but summarising several functionals of the same paths."""
    _, paths, diverged = ensemble_paths(model, params, config, n, base_seed, threads=threads,
                                        block_size=block_size)
    n_div = int(diverged.sum())
    if n_div == n:
        raise EnsembleFailureError(f"all {n} trajectories diverged")
    if n_div > MAX_DIVERGENT_FRACTION * n:
        raise EnsembleFailureError(f"{n_div} of {n} trajectories diverged")
    kept = paths[~diverged]
    return {f: summarize(kept, burn_in, divergences=n_div, functional=f, model=model) for f in functionals}


def run_ensemble(model: str, params: ModelParams, config: SimConfig, n: int, base_seed: int = 0, *,
                 functional: str = "a", burn_in: float = 0.5, threads: int = 1,
                 block_size: int = 50) -> EnsembleStats:
    """Stationary statistics of ``a`` (or ``a**2``) over ``n`` independent trajectories.

    Divergent trajectories are dropped and counted; more than 1% divergent
    (or all) raises :class:`EnsembleFailureError`.
    """
    return run_ensemble_functionals(model, params, config, n, base_seed, functionals=(functional,),
                                    burn_in=burn_in, threads=threads, block_size=block_size)[functional]


def linear_fit(xs, ys) -> FitResult:
    """Ordinary least-squares line; invariant under reordering of the points."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-D arrays of equal length")
    if np.unique(x).size < 2:
        raise ValueError("need at least two distinct covariate values")
    order = np.lexsort((y, x))
    x, y = x[order], y[order]
    xm = math.fsum(x) / x.size
    ym = math.fsum(y) / y.size
    sxx = math.fsum((x - xm) ** 2)
    sxy = math.fsum((x - xm) * (y - ym))
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    rms = math.sqrt(math.fsum(resid**2) / x.size)
    return FitResult(slope, intercept, rms, (float(x.min()), float(x.max())), int(x.size))


def multilinear_fit(design, ys):
    """Least-squares coefficients for ``ys ~ design @ coef``; returns ``(coef, residual_rms)``."""
    X = np.asarray(design, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise ValueError("design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return coef, math.sqrt(float(np.mean(resid**2)))


def fitnum_fit(eps_gamma, eps_sigma2, a2, *, second_order: bool = True) -> dict:
    """Fit ``a2 ~ c_g x + c_s y [+ c_gg x**2 + c_gs x y + c_ss y**2]`` with ``x = eps*gamma``, ``y = eps*sigma**2``.

    No intercept, matching the form of the empirical amplitude law.
    """
    x = np.asarray(eps_gamma, dtype=float)
    y = np.asarray(eps_sigma2, dtype=float)
    cols = [x, y]
    names = ["gamma", "sigma2"]
    if second_order:
        cols += [x * x, x * y, y * y]
        names += ["gamma2", "gamma_sigma2", "sigma4"]
    coef, rms = multilinear_fit(np.column_stack(cols), a2)
    out = dict(zip(names, (float(c) for c in coef)))
    out["residual_rms"] = rms
    return out


def sweep(axis: str, grid, params: ModelParams, config: SimConfig, n: int, base_seed: int = 0, *,
          model: str = "full", functional: str | None = None, burn_in: float = 0.5,
          threads: int = 1) -> list[SweepRow]:
    """One ensemble per grid value of ``eps*gamma`` (``axis="gamma"``) or ``eps*sigma**2`` (``axis="sigma"``).

    Failures at a grid point are recorded in the row and do not stop the sweep.
    """
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("empty sweep grid")
    if functional is None:
        functional = "a2" if axis == "gamma" else "a"
    rows = []
    for g in grid:
        if axis == "gamma":
            p = params.with_(gamma=g / params.eps)
        elif axis == "sigma":
            if g < 0:
                raise ValueError("eps*sigma**2 must be nonnegative")
            p = params.with_(sigma=math.sqrt(g / params.eps))
        else:
            raise ValueError(f"axis must be 'gamma' or 'sigma', got {axis!r}")
        try:
            st = run_ensemble(model, p, config, n, base_seed, functional=functional, burn_in=burn_in,
                              threads=threads)
            rows.append(SweepRow(g, st))
        except (EnsembleFailureError, DivergenceError) as exc:
            rows.append(SweepRow(g, None, str(exc)))
    return rows


SWEEP_HEADER = ("covariate", "mean", "var", "stderr", "n", "divergences")


def sweep_table(rows: list[SweepRow]) -> list[tuple]:
    out = []
    for r in rows:
        if r.stats is None:
            out.append((r.covariate, math.nan, math.nan, math.nan, 0, -1))
        else:
            s = r.stats
            out.append((r.covariate, s.mean, s.var, s.stderr, s.n, s.divergences))
    return out


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_HEADER)
        for row in sweep_table(rows):
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def compare_models(a: EnsembleStats, b: EnsembleStats, z: float = Z95) -> Comparison:
    """Relative differences of mean and std and whether the 95% intervals overlap."""
    def rel(x, y):
        scale = max(abs(x), abs(y))
        return 0.0 if scale == 0 else abs(x - y) / scale

    def zscore(d, s1, s2):
        se = math.hypot(s1, s2)
        return 0.0 if d == 0 else (math.inf if se == 0 else d / se)

    dm = abs(a.mean - b.mean)
    ds = abs(a.std - b.std)
    mean_overlap = dm <= z * (a.stderr + b.stderr)
    std_overlap = ds <= z * (a.std_stderr + b.std_stderr)
    return Comparison(rel(a.mean, b.mean), rel(a.std, b.std), zscore(dm, a.stderr, b.stderr),
                      zscore(ds, a.std_stderr, b.std_stderr), bool(mean_overlap), bool(std_overlap))


def convergence_order(epsilons, errors) -> float:
    """Log-log least-squares slope of ``errors`` against ``epsilons``."""
    e = np.asarray(epsilons, dtype=float)
    r = np.asarray(errors, dtype=float)
    if e.size < 3 or e.shape != r.shape:
        raise ValueError("need at least three (eps, error) pairs")
    if np.any(e <= 0) or np.any(r <= 0):
        raise ValueError("epsilons and errors must be positive")
    return linear_fit(np.log(e), np.log(r)).slope
