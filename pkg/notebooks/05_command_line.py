"""
Driving everything from a scenario file
=======================================

The ``srde-reduce`` command reads a YAML scenario, optionally layered on a
named preset, and writes CSV tables plus gnuplot scripts.
"""

# %%
import tempfile
from pathlib import Path

from srde_reduce.cli import dump_scenario, main, parse_scenario

out = Path(tempfile.mkdtemp())
scenario = out / "scenario_in.yaml"
scenario.write_text(
    """
preset: fig4
sim: {dt: 0.01, T: 50.0, stride: 10}
ensemble: {n: 20, seed: 7}
sweep: {grid: [0.2, 0.5]}
"""
)

# %%
# The resolved scenario, as it will be echoed next to the outputs:
print(dump_scenario(parse_scenario(scenario)))

# %%
# Equivalent to ``srde-reduce sweep --scenario scenario_in.yaml --out-dir ...``
main(["sweep", "--scenario", str(scenario), "--out-dir", str(out)])
print((out / "sweep.csv").read_text())

# %%
# The analytic self-checks
main(["verify"])
