"""A miniature version of the full benchmark, run through the library API.

The same thing is available from the shell as ``softlabel run``; this
script writes its results next to itself under ``demo_out/``.
"""
import csv
from pathlib import Path

from softlabel.experiment import ExperimentConfig, run_experiment, summary_path

here = Path(__file__).parent
cfg = ExperimentConfig(
    datasets=[str(here.parent / "tests" / "fixtures" / "iris.csv")],
    seed=11,
    out=str(here / "demo_out" / "results.csv"),
    gt_models=["LR"],
    uncertainties=["high"],
    noise_model="ncar",
    noise_levels=[0, 4],
    methods=["PluralityClf", "SampleClf", "PluralityBootstrapClf", "BootstrapSamplingClf"],
    bases=["GNB", "DT"],
    repeats=5,
    ensemble_size=10,
    resamples=50,
)
rows = run_experiment(cfg)
print(f"{len(rows)} result rows in {cfg.out}")

with open(summary_path(cfg.out), newline="") as fh:
    for r in csv.DictReader(fh):
        if r["metric"] == "auc_gt":
            print(f"  level {r['noise_level']}  {r['base']:4s} {r['method']:22s} "
                  f"AUC {float(r['mean']):.3f} +- {float(r['stderr']):.3f}")
