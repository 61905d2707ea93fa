import csv

import pytest
import yaml

from srde_reduce.cli import (
    PRESETS,
    THREADS_ENV,
    Scenario,
    dump_scenario,
    main,
    parse_scenario,
    scenario_from_dict,
)
from srde_reduce.errors import ScenarioError

# small, fast runs: short horizon, coarse step, few trajectories
SMALL = {
    "model": {"eps": 0.1, "total_modes": 4},
    "sim": {"dt": 0.01, "T": 10.0, "stride": 10, "slow_dt": 0.01},
    "ensemble": {"n": 6, "seed": 3},
    "sweep": {"axis": "sigma", "grid": [0.5, 1.0]},
    "compare": {"models": ["full", "manifold"]},
}


def write_yaml(path, data):
    path.write_text(yaml.safe_dump(data))
    return path


def header(path):
    with open(path) as fh:
        return next(csv.reader(fh))


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))[1:]


class TestParsing:
    def test_empty_file_gives_defaults(self, tmp_path):
        (tmp_path / "s.yaml").write_text("")
        assert parse_scenario(tmp_path / "s.yaml") == Scenario()

    def test_no_source_gives_defaults(self):
        scen = parse_scenario()
        assert scen.params.eps == 0.1 and scen.ensemble.n == 200

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_parse(self, name):
        scen = parse_scenario(preset=name)
        assert scen.name == name
        assert scen.params.eps * scen.params.gamma == pytest.approx(scen.model.eps_gamma)

    def test_fig1_preset_values(self):
        scen = parse_scenario(preset="fig1")
        assert scen.sim.backend == "finite-difference" and scen.sim.grid_points == 15
        assert scen.params.eps * scen.params.sigma**2 == pytest.approx(1.0)

    def test_file_overrides_preset(self, tmp_path):
        f = write_yaml(tmp_path / "s.yaml", {"preset": "fig2", "ensemble": {"n": 7}})
        scen = parse_scenario(f)
        assert scen.ensemble.n == 7 and scen.ensemble.functional == "a2"

    def test_explicit_preset_wins(self):
        scen = scenario_from_dict({"preset": "fig2"}, preset="fig4")
        assert scen.sweep.axis == "sigma"

    @pytest.mark.parametrize(
        "data, where",
        [
            ({"model": {"eps_sigma2": -1.0}}, "model.eps_sigma2"),
            ({"model": {"eps": 0.0}}, "model.eps"),
            ({"model": {"epsilon": 0.1}}, "model.epsilon"),
            ({"sim": {"dt": "fast"}}, "sim.dt"),
            ({"sim": {"scheme": "rk4"}}, "sim"),
            ({"ensemble": {"n": 2.5}}, "ensemble.n"),
            ({"ensemble": {"model": "exact"}}, "ensemble.model"),
            ({"sweep": {"grid": [0.1, "x"]}}, "sweep.grid[1]"),
            ({"compare": {"models": ["full"]}}, "compare.models"),
            ({"plots": {}}, "plots"),
            ({"preset": "fig9"}, "preset"),
        ],
    )
    def test_errors_name_the_field(self, data, where):
        with pytest.raises(ScenarioError) as info:
            scenario_from_dict(data)
        assert str(info.value).startswith(where)

    def test_unreadable_and_malformed(self, tmp_path):
        with pytest.raises(ScenarioError):
            parse_scenario(tmp_path / "missing.yaml")
        (tmp_path / "bad.yaml").write_text("model: [1, 2\n")
        with pytest.raises(ScenarioError):
            parse_scenario(tmp_path / "bad.yaml")
        (tmp_path / "list.yaml").write_text("- 1\n")
        with pytest.raises(ScenarioError):
            parse_scenario(tmp_path / "list.yaml")

    @pytest.mark.parametrize("name", [None, *sorted(PRESETS)])
    def test_dump_round_trip(self, tmp_path, name):
        scen = parse_scenario(preset=name)
        (tmp_path / "echo.yaml").write_text(dump_scenario(scen))
        assert parse_scenario(tmp_path / "echo.yaml") == scen


class TestCommands:
    def test_verify(self, tmp_path, capsys):
        assert main(["verify", "--out-dir", str(tmp_path)]) == 0
        assert "FAIL" not in capsys.readouterr().out
        assert header(tmp_path / "verify.csv") == ["check", "error", "tolerance", "passed"]
        assert all(r[3] == "true" for r in rows(tmp_path / "verify.csv"))

    def test_simulate(self, tmp_path):
        f = write_yaml(tmp_path / "s.yaml", {**SMALL, "sim": {**SMALL["sim"], "keep_fields": True}})
        assert main(["simulate", "--scenario", str(f), "--out-dir", str(tmp_path)]) == 0
        assert header(tmp_path / "simulate.csv") == ["t", "a", "c1", "c2", "c3", "c4"]
        assert len(rows(tmp_path / "simulate.csv")) == 101
        assert (tmp_path / "simulate.gp").exists() and (tmp_path / "scenario.yaml").exists()
        assert parse_scenario(tmp_path / "scenario.yaml").ensemble.seed == 3

    def test_simulate_each_grid_value(self, tmp_path):
        f = write_yaml(tmp_path / "s.yaml", {**SMALL, "sweep": {"axis": "gamma", "grid": [0.2, 0.6],
                                                                "simulate_each": True}})
        assert main(["simulate", "--scenario", str(f), "--out-dir", str(tmp_path)]) == 0
        assert (tmp_path / "simulate_gamma_0.2.csv").exists()
        assert (tmp_path / "simulate_gamma_0.6.csv").exists()

    def test_reduce(self, tmp_path):
        f = write_yaml(tmp_path / "s.yaml", SMALL)
        assert main(["reduce", "--scenario", str(f), "--out-dir", str(tmp_path)]) == 0
        assert header(tmp_path / "averaged.csv") == ["t_slow", "A1"]
        assert header(tmp_path / "deviation.csv") == ["t_slow", "rho1"]
        assert header(tmp_path / "reconstructed.csv") == ["t", "a"]
        assert header(tmp_path / "manifold.csv") == ["t", "a"]
        # reconstructed time axis is fast time
        assert float(rows(tmp_path / "reconstructed.csv")[-1][0]) == pytest.approx(10.0)

    def test_sweep(self, tmp_path):
        f = write_yaml(tmp_path / "s.yaml", SMALL)
        assert main(["sweep", "--scenario", str(f), "--out-dir", str(tmp_path)]) == 0
        assert header(tmp_path / "sweep.csv") == ["covariate", "mean", "var", "stderr", "n", "divergences"]
        assert [float(r[0]) for r in rows(tmp_path / "sweep.csv")] == [0.5, 1.0]
        assert rows(tmp_path / "fit.csv")[0][0] == "a_std"

    def test_compare(self, tmp_path):
        f = write_yaml(tmp_path / "s.yaml", SMALL)
        assert main(["compare", "--scenario", str(f), "--out-dir", str(tmp_path)]) == 0
        st = rows(tmp_path / "compare_stats.csv")
        assert [(r[0], r[1]) for r in st] == [("full", "a"), ("full", "a2"), ("manifold", "a"), ("manifold", "a2")]
        assert header(tmp_path / "compare.csv")[:3] == ["model_a", "model_b", "functional"]
        assert len(rows(tmp_path / "compare.csv")) == 1

    def test_overrides(self, tmp_path):
        f = write_yaml(tmp_path / "s.yaml", SMALL)
        main(["sweep", "--scenario", str(f), "--out-dir", str(tmp_path), "--ensemble-size", "4", "--seed", "9"])
        scen = parse_scenario(tmp_path / "scenario.yaml")
        assert (scen.ensemble.n, scen.ensemble.seed) == (4, 9)
        assert all(r[4] == "4" for r in rows(tmp_path / "sweep.csv"))

    def test_thread_env_does_not_change_output(self, tmp_path, monkeypatch):
        f = write_yaml(tmp_path / "s.yaml", SMALL)
        outs = []
        for threads in ("1", "3"):
            monkeypatch.setenv(THREADS_ENV, threads)
            d = tmp_path / f"t{threads}"
            assert main(["compare", "--scenario", str(f), "--out-dir", str(d)]) == 0
            outs.append((d / "compare_stats.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_bad_thread_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(THREADS_ENV, "many")
        assert main(["verify", "--out-dir", str(tmp_path)]) == 2
        assert THREADS_ENV in capsys.readouterr().err

    def test_scenario_error_exit_code(self, tmp_path, capsys):
        f = write_yaml(tmp_path / "s.yaml", {"model": {"eps_sigma2": -1.0}})
        assert main(["sweep", "--scenario", str(f)]) == 2
        assert "model.eps_sigma2" in capsys.readouterr().err

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            main(["plot"])
