"""Command-line front end: ``srde-reduce {simulate,reduce,sweep,compare,verify}``.

A scenario is a YAML tree with the sections ``model``, ``sim``, ``ensemble``,
``sweep``, ``compare`` and ``output``. Unknown keys are rejected with their
field path. Presets ``fig1`` to ``fig4`` hold fixed reference parameter choices;
keys in a scenario file override the preset named by its ``preset`` key or
by ``--preset``. Every run writes the fully resolved scenario to
``scenario.yaml`` next to its outputs; re-parsing that file reproduces the
scenario exactly.
"""

from __future__ import annotations

import argparse
import copy
import csv
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .errors import DivergenceError, EnsembleFailureError, ScenarioError, SRDEError
from .fullsim import SimConfig, equilibrium_amplitude, simulate_batch
from .params import ModelParams, NoiseSpectrum
from .reduced import integrate_averaged, integrate_deviation, reconstruct, simulate_manifold
from .spectral import Basis
from .stats import MODELS, compare_models, linear_fit, run_ensemble_functionals, sweep, write_sweep_csv
from .verify import all_passed, run_checks

__all__ = [
    "THREADS_ENV",
    "PRESETS",
    "ModelSection",
    "SimSection",
    "EnsembleSection",
    "SweepSection",
    "CompareSection",
    "OutputSection",
    "Scenario",
    "parse_scenario",
    "scenario_from_dict",
    "dump_scenario",
    "cmd_simulate",
    "cmd_reduce",
    "cmd_sweep",
    "cmd_compare",
    "cmd_verify",
    "main",
]

THREADS_ENV = "SRDE_THREADS"


@dataclass(frozen=True)
class ModelSection:
    """Physical parameters, stated through the combinations the field depends on."""

    eps: float = 0.1
    eps_gamma: float = 1.0
    eps_sigma2: float = 1.0
    c0: float = 1.0
    N: int = 1
    total_modes: int = 8
    shift: float = 1.0
    lambdas: tuple | None = None  # None: unit noise on mode N+1 only

    def validate(self, path="model"):
        _require(0 < self.eps <= 1, f"{path}.eps", "must lie in (0, 1]")
        _require(self.eps_sigma2 >= 0, f"{path}.eps_sigma2", "must be nonnegative")
        _require(self.c0 > 0, f"{path}.c0", "must be positive")
        _require(self.total_modes >= 2, f"{path}.total_modes", "must be at least 2")
        _require(1 <= self.N < self.total_modes, f"{path}.N", "must satisfy 1 <= N < total_modes")
        if self.lambdas is not None:
            _require(len(self.lambdas) == self.total_modes, f"{path}.lambdas", "needs one value per mode")
            _require(all(x >= 0 for x in self.lambdas), f"{path}.lambdas", "must be nonnegative")
            _require(all(x == 0 for x in self.lambdas[: self.N]), f"{path}.lambdas",
                     "slow modes must carry zero noise")

    def params(self) -> ModelParams:
        basis = Basis(self.total_modes, self.shift)
        if self.lambdas is None:
            spec = NoiseSpectrum.single_mode(self.N + 1, self.total_modes, self.N)
        else:
            spec = NoiseSpectrum(tuple(self.lambdas), self.N)
        return ModelParams(eps=self.eps, gamma=self.eps_gamma / self.eps,
                           sigma=math.sqrt(self.eps_sigma2 / self.eps), c0=self.c0, N=self.N,
                           basis=basis, spectrum=spec)


@dataclass(frozen=True)
class SimSection:
    dt: float = 0.005
    T: float = 200.0
    backend: str = "spectral"
    grid_points: int = 15
    stride: int = 20
    scheme: str = "semi-implicit"
    a0: float | None = None
    slow_dt: float = 0.01
    keep_fields: bool = False

    def validate(self, path="sim"):
        try:
            self.config()
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"{path}: {exc}") from None

    def config(self, seed: int = 0) -> SimConfig:
        return SimConfig(dt=self.dt, T=self.T, backend=self.backend, grid_points=self.grid_points,
                         stride=self.stride, seed=seed, scheme=self.scheme, a0=self.a0,
                         slow_dt=self.slow_dt, keep_fields=self.keep_fields)


@dataclass(frozen=True)
class EnsembleSection:
    model: str = "full"
    n: int = 200
    seed: int = 0
    burn_in: float = 0.5
    functional: str = "a"

    def validate(self, path="ensemble"):
        _require(self.model in MODELS, f"{path}.model", f"must be one of {list(MODELS)}")
        _require(self.n >= 1, f"{path}.n", "must be >= 1")
        _require(0 <= self.burn_in < 1, f"{path}.burn_in", "must lie in [0, 1)")
        _require(self.functional in ("a", "a2"), f"{path}.functional", "must be 'a' or 'a2'")


@dataclass(frozen=True)
class SweepSection:
    """Sweep axis and grid; ``simulate_each`` makes ``simulate`` emit one realisation per grid value."""

    axis: str = "gamma"
    grid: tuple = (0.2, 0.4, 0.6, 0.8, 1.0)
    simulate_each: bool = False

    def validate(self, path="sweep"):
        _require(self.axis in ("gamma", "sigma"), f"{path}.axis", "must be 'gamma' or 'sigma'")
        _require(len(self.grid) > 0, f"{path}.grid", "must be nonempty")
        if self.axis == "sigma":
            _require(all(g >= 0 for g in self.grid), f"{path}.grid", "eps*sigma^2 must be nonnegative")


@dataclass(frozen=True)
class CompareSection:
    models: tuple = ("full", "averaged+deviation", "manifold")

    def validate(self, path="compare"):
        _require(len(self.models) >= 2, f"{path}.models", "needs at least two models")
        for k, m in enumerate(self.models):
            _require(m in MODELS, f"{path}.models[{k}]", f"must be one of {list(MODELS)}")


@dataclass(frozen=True)
class OutputSection:
    dir: str = "out"
    gnuplot: bool = True


@dataclass(frozen=True)
class Scenario:
    name: str = "default"
    model: ModelSection = field(default_factory=ModelSection)
    sim: SimSection = field(default_factory=SimSection)
    ensemble: EnsembleSection = field(default_factory=EnsembleSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    compare: CompareSection = field(default_factory=CompareSection)
    output: OutputSection = field(default_factory=OutputSection)

    def validate(self):
        for sec in (self.model, self.sim, self.ensemble, self.sweep, self.compare):
            sec.validate()

    @property
    def params(self) -> ModelParams:
        return self.model.params()

    def config(self) -> SimConfig:
        return self.sim.config(self.ensemble.seed)


_SECTIONS = {
    "model": ModelSection,
    "sim": SimSection,
    "ensemble": EnsembleSection,
    "sweep": SweepSection,
    "compare": CompareSection,
    "output": OutputSection,
}

# Reference parameter choices; fixed here so results stay reproducible.
PRESETS = {
    "fig1": {
        "model": {"eps": 0.1, "eps_gamma": 1.0, "eps_sigma2": 1.0},
        "sim": {"backend": "finite-difference", "grid_points": 15, "dt": 0.001, "T": 40.0, "stride": 100,
                "keep_fields": True},
    },
    "fig2": {
        "model": {"eps": 0.1, "eps_sigma2": 1.0},
        "sim": {"dt": 0.005, "T": 200.0, "stride": 20},
        "ensemble": {"n": 200, "functional": "a2"},
        "sweep": {"axis": "gamma", "grid": [0.2, 0.4, 0.6, 0.8, 1.0]},
    },
    "fig3": {
        "model": {"eps": 0.1, "eps_gamma": 1.0, "eps_sigma2": 1.0},
        "sim": {"dt": 0.005, "T": 50.0, "stride": 20},
        "sweep": {"axis": "gamma", "grid": [0.2, 0.6, 1.0], "simulate_each": True},
    },
    "fig4": {
        "model": {"eps": 0.1, "eps_gamma": 1.0},
        "sim": {"dt": 0.005, "T": 200.0, "stride": 20},
        "ensemble": {"n": 200, "functional": "a"},
        "sweep": {"axis": "sigma", "grid": [0.1, 0.2, 0.3, 0.4, 0.5]},
    },
}


def _require(ok: bool, path: str, msg: str) -> None:
    if not ok:
        raise ScenarioError(f"{path}: {msg}")


def _coerce(value, default, path: str):
    """Convert a YAML scalar/list to the type of the field default."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ScenarioError(f"{path}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError(f"{path}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float) or (default is None and path.endswith(".a0")):
        if value is None and default is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{path}: expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ScenarioError(f"{path}: must be finite")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ScenarioError(f"{path}: expected a string, got {value!r}")
        return value
    # tuple-valued fields (grid, models, lambdas)
    if value is None and default is None:
        return None
    if not isinstance(value, (list, tuple)):
        raise ScenarioError(f"{path}: expected a list, got {value!r}")
    if path.endswith(".models"):
        out = []
        for k, v in enumerate(value):
            if not isinstance(v, str):
                raise ScenarioError(f"{path}[{k}]: expected a string, got {v!r}")
            out.append(v)
        return tuple(out)
    out = []
    for k, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ScenarioError(f"{path}[{k}]: expected a finite number, got {v!r}")
        out.append(float(v))
    return tuple(out)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def scenario_from_dict(data: dict | None, preset: str | None = None) -> Scenario:
    """Validated :class:`Scenario` from a parsed tree, layered over an optional preset."""
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ScenarioError("<root>: expected a mapping")
    preset = preset if preset is not None else data.get("preset")
    tree: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ScenarioError(f"preset: unknown preset {preset!r}; known: {sorted(PRESETS)}")
        tree = copy.deepcopy(PRESETS[preset])
    tree = _merge(tree, {k: v for k, v in data.items() if k != "preset"})
    name = tree.pop("name", preset or "default")
    if not isinstance(name, str):
        raise ScenarioError(f"name: expected a string, got {name!r}")
    sections = {}
    for key, value in tree.items():
        if key not in _SECTIONS:
            raise ScenarioError(f"{key}: unknown key; expected one of {['name', 'preset', *_SECTIONS]}")
        cls = _SECTIONS[key]
        value = {} if value is None else value
        if not isinstance(value, dict):
            raise ScenarioError(f"{key}: expected a mapping")
        defaults = cls()
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for fk, fv in value.items():
            if fk not in known:
                raise ScenarioError(f"{key}.{fk}: unknown key; expected one of {sorted(known)}")
            kwargs[fk] = _coerce(fv, getattr(defaults, fk), f"{key}.{fk}")
        sections[key] = cls(**kwargs)
    scen = Scenario(name=name, **sections)
    scen.validate()
    return scen


def _read_tree(source) -> dict:
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{path}: invalid YAML: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: expected a mapping at the top level")
    return data


def parse_scenario(source: str | os.PathLike | None = None, preset: str | None = None) -> Scenario:
    """Scenario from a YAML file, a preset name, both, or neither (all defaults)."""
    data = None if source is None else _read_tree(source)
    return scenario_from_dict(data, preset)


def _plain(obj):
    if isinstance(obj, tuple):
        return [_plain(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    return obj


def dump_scenario(scen: Scenario) -> str:
    """Fully resolved YAML echo of a scenario."""
    return yaml.safe_dump(_plain(asdict(scen)), sort_keys=False)


# ----------------------------------------------------------------- outputs

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_gnuplot(out: Path, stem: str, header, rows, xcol: int, ycols, *, title: str, yerr: int | None = None):
    """Whitespace data file plus a script that plots it to ``<stem>.png``."""
    with open(out / f"{stem}.dat", "w") as fh:
        fh.write("# " + " ".join(header) + "\n")
        for row in rows:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")
    plots = []
    for c in ycols:
        if yerr is not None:
            plots.append(f"'{stem}.dat' using {xcol + 1}:{c + 1}:{yerr + 1} with yerrorbars title '{header[c]}'")
        else:
            plots.append(f"'{stem}.dat' using {xcol + 1}:{c + 1} with lines title '{header[c]}'")
    script = (
        "set terminal pngcairo size 800,500\n"
        f"set output '{stem}.png'\n"
        f"set title '{title}'\n"
        f"set xlabel '{header[xcol]}'\n"
        "plot " + ", \\\n     ".join(plots) + "\n"
    )
    (out / f"{stem}.gp").write_text(script)


def _prepare(scen: Scenario, out_dir) -> Path:
    out = Path(out_dir if out_dir is not None else scen.output.dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "scenario.yaml").write_text(dump_scenario(scen))
    except OSError as exc:
        raise SRDEError(f"cannot write to {out}: {exc.strerror}") from None
    return out


def _grid_params(scen: Scenario, g: float) -> ModelParams:
    p = scen.params
    if scen.sweep.axis == "gamma":
        return p.with_(gamma=g / p.eps)
    return p.with_(sigma=math.sqrt(g / p.eps))


# ---------------------------------------------------------------- commands

def cmd_simulate(scen: Scenario, out_dir=None, threads: int = 1) -> int:
    """One full-model realisation (stream 0), or one per grid value with ``sweep.simulate_each``."""
    out = _prepare(scen, out_dir)
    cfg = scen.config()
    coupled = scen.ensemble.model == "coupled"
    cases = [("simulate", scen.params)]
    if scen.sweep.simulate_each:
        cases = [(f"simulate_{scen.sweep.axis}_{g:g}", _grid_params(scen, g)) for g in scen.sweep.grid]
    status = 0
    for stem, p in cases:
        res = simulate_batch(p, cfg, [0], coupled=coupled)
        if res.diverged[0]:
            print(f"{stem}: diverged at t={res.divergence_time[0]:.6g}", file=sys.stderr)
            status = 2
            continue
        fields_ = None if res.fields is None else res.fields[:, 0]
        header = ["t", "a"]
        if fields_ is not None:
            prefix = "c" if res.field_kind == "modes" else "u"
            header += [f"{prefix}{k + 1}" for k in range(fields_.shape[1])]
        cols = [res.times, res.amplitude[0]] + ([fields_] if fields_ is not None else [])
        rows = np.column_stack(cols)
        _write_csv(out / f"{stem}.csv", header, rows)
        if scen.output.gnuplot:
            _write_gnuplot(out, stem, header[:2], rows[:, :2], 0, [1], title=f"{scen.name}: amplitude of sin x")
        print(f"wrote {out / (stem + '.csv')}")
    return status


def cmd_reduce(scen: Scenario, out_dir=None, threads: int = 1) -> int:
    """Averaged path, deviation and reconstructed amplitude, plus a slow-manifold path (stream 0)."""
    out = _prepare(scen, out_dir)
    p = scen.params
    cfg = scen.config()
    eps = p.eps
    a0 = equilibrium_amplitude(p) if cfg.a0 is None else cfg.a0
    try:
        ts, U = integrate_averaged(np.eye(p.N)[0] * a0 / math.sqrt(eps), p, cfg.T * eps, cfg.slow_dt)
        rho = integrate_deviation(ts, U, p, [0], seed=scen.ensemble.seed)[0]
    except DivergenceError as exc:
        print(f"reduce: {exc}", file=sys.stderr)
        return 2
    _write_csv(out / "averaged.csv", ["t_slow"] + [f"A{k + 1}" for k in range(p.N)], np.column_stack([ts, U]))
    _write_csv(out / "deviation.csv", ["t_slow"] + [f"rho{k + 1}" for k in range(p.N)],
               np.column_stack([ts, rho]))
    rec = reconstruct(ts, U, rho, eps)
    _write_csv(out / "reconstructed.csv", ["t", "a"], np.column_stack([rec.times, rec.amplitude]))
    tm, am = simulate_manifold(p, cfg.T, cfg.dt, [0], seed=scen.ensemble.seed, a0=a0, stride=cfg.stride)
    if not np.all(np.isfinite(am)):
        print("reduce: slow-manifold path diverged", file=sys.stderr)
        return 2
    _write_csv(out / "manifold.csv", ["t", "a"], np.column_stack([tm, am[0]]))
    if scen.output.gnuplot:
        _write_gnuplot(out, "reconstructed", ["t", "a"], np.column_stack([rec.times, rec.amplitude]), 0, [1],
                       title=f"{scen.name}: averaged + deviation")
        _write_gnuplot(out, "manifold", ["t", "a"], np.column_stack([tm, am[0]]), 0, [1],
                       title=f"{scen.name}: slow manifold")
    print(f"wrote averaged, deviation, reconstructed and manifold CSVs to {out}")
    return 0


def cmd_sweep(scen: Scenario, out_dir=None, threads: int = 1) -> int:
    """Ensemble statistics over the sweep grid, a linear fit and the table behind the plots."""
    out = _prepare(scen, out_dir)
    e = scen.ensemble
    rows = sweep(scen.sweep.axis, scen.sweep.grid, scen.params, scen.config(), e.n, e.seed, model=e.model,
                 functional=e.functional, burn_in=e.burn_in, threads=threads)
    write_sweep_csv(rows, out / "sweep.csv")
    ok = [r for r in rows if r.stats is not None]
    for r in rows:
        if r.stats is None:
            print(f"sweep: covariate {r.covariate:g} failed: {r.error}", file=sys.stderr)
    xs = [r.covariate for r in ok]
    # gamma sweeps fit the mean of a^2; sigma sweeps fit the std of a
    ys = [r.stats.mean if scen.sweep.axis == "gamma" else r.stats.std for r in ok]
    label = "mean" if scen.sweep.axis == "gamma" else "std"
    if len(set(xs)) >= 2:
        fit = linear_fit(xs, ys)
        _write_csv(out / "fit.csv", ["quantity", "slope", "intercept", "residual_rms", "x_min", "x_max", "n"],
                   [[f"{e.functional}_{label}", fit.slope, fit.intercept, fit.residual_rms,
                     *fit.covariate_range, fit.n]])
        print(f"fit: slope {fit.slope:.4f}, intercept {fit.intercept:.4f}")
    if scen.output.gnuplot:
        cov = "eps_gamma" if scen.sweep.axis == "gamma" else "eps_sigma2"
        data = [(r.covariate, r.stats.mean, r.stats.std, r.stats.stderr) for r in ok]
        _write_gnuplot(out, "sweep", [cov, f"{e.functional}_mean", f"{e.functional}_std", "stderr"], data, 0,
                       [1 if label == "mean" else 2], title=f"{scen.name}: {label} over {cov}",
                       yerr=3 if label == "mean" else None)
    print(f"wrote {out / 'sweep.csv'}")
    return 0 if len(ok) == len(rows) else 2


def cmd_compare(scen: Scenario, out_dir=None, threads: int = 1) -> int:
    """Stationary statistics of ``a`` and ``a**2`` for each listed model, and pairwise 95% interval checks.

    The pairwise table compares the functional named by ``ensemble.functional``.
    """
    out = _prepare(scen, out_dir)
    e = scen.ensemble
    stats = {}
    try:
        for m in scen.compare.models:
            stats[m] = run_ensemble_functionals(m, scen.params, scen.config(), e.n, e.seed,
                                                functionals=("a", "a2"), burn_in=e.burn_in, threads=threads)
    except EnsembleFailureError as exc:
        print(f"compare: {exc}", file=sys.stderr)
        return 2
    _write_csv(out / "compare_stats.csv",
               ["model", "functional", "mean", "var", "std", "stderr", "std_stderr", "n", "divergences"],
               [[m, f, s.mean, s.var, s.std, s.stderr, s.std_stderr, s.n, s.divergences]
                for m, per in stats.items() for f, s in per.items()])
    rows = []
    names = list(stats)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            c = compare_models(stats[names[i]][e.functional], stats[names[j]][e.functional])
            rows.append([names[i], names[j], e.functional, c.mean_rel_diff, c.std_rel_diff, c.mean_overlap,
                         c.std_overlap])
            print(f"{names[i]} vs {names[j]}: mean diff {c.mean_rel_diff:.3%} (overlap {c.mean_overlap}), "
                  f"std diff {c.std_rel_diff:.3%} (overlap {c.std_overlap})")
    _write_csv(out / "compare.csv",
               ["model_a", "model_b", "functional", "mean_rel_diff", "std_rel_diff", "mean_overlap", "std_overlap"],
               rows)
    return 0


def cmd_verify(scen: Scenario | None = None, out_dir=None, threads: int = 1) -> int:
    """Analytic-oracle suite; nonzero exit if any check fails."""
    checks = run_checks()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: error {c.error:.3e} (tolerance {c.tolerance:.1e})")
    if scen is not None:
        out = _prepare(scen, out_dir)
        _write_csv(out / "verify.csv", ["check", "error", "tolerance", "passed"],
                   [[c.name, c.error, c.tolerance, c.passed] for c in checks])
    return 0 if all_passed(checks) else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "reduce": cmd_reduce,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ScenarioError(f"{THREADS_ENV}: expected an integer, got {raw!r}") from None
    return max(1, n)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="srde-reduce", description="Full and reduced stochastic reaction-diffusion models.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--scenario", help="YAML scenario file")
    ap.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
    ap.add_argument("--seed", type=int, help="base seed (overrides ensemble.seed)")
    ap.add_argument("--out-dir", help="output directory (overrides output.dir)")
    ap.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or 1)")
    ap.add_argument("--ensemble-size", type=int, help="trajectories per ensemble (overrides ensemble.n)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = _read_tree(args.scenario) if args.scenario else {}
        over = {}
        if args.seed is not None:
            over["seed"] = args.seed
        if args.ensemble_size is not None:
            over["n"] = args.ensemble_size
        if over:
            data = _merge(data, {"ensemble": over})
        scen = scenario_from_dict(data, args.preset)
        threads = args.threads if args.threads is not None else _default_threads()
        return COMMANDS[args.command](scen, args.out_dir, max(1, threads))
    except SRDEError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
