# %% [markdown]
# # Running the experiment catalogue
#
# Every experiment is also reachable from the command line:
#
#     beurling-morrey list
#     beurling-morrey run --config run.cfg --out results/
#
# where run.cfg holds flat ``key = value`` lines such as ``experiment = isometry``.

# %%
import tempfile
from pathlib import Path

from beurling_morrey import cli
from beurling_morrey.experiments import ExperimentConfig, list_experiments, run_experiment

for name, anchor in list_experiments():
    print(f"{name:22s} {anchor}")

# %%
res = run_experiment(ExperimentConfig(experiment="doubling"))
for c in res.checks:
    print("PASS" if c.passed else "FAIL", c.name, c.detail)

# %%
with tempfile.TemporaryDirectory() as tmp:
    cfg = Path(tmp) / "run.cfg"
    cfg.write_text("experiment = n2-growth\nseed = 5\n")
    code = cli.main(["run", "--config", str(cfg), "--out", str(Path(tmp) / "out")])
    print("exit code", code)
    print((Path(tmp) / "out" / "n2-growth.csv").read_text().splitlines()[:3])
