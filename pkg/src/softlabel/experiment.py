"""Experiment orchestration: splits, noise, method fitting and result rows.

Every random choice is keyed on names rather than list positions, so adding
a method or a noise level to a config leaves the other cells unchanged.
"""
from __future__ import annotations

import json
import logging
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import datagen, noise
from .classifiers import BASE_CLASSIFIERS
from .core import HardDataset, SoftDataset, SoftLabelError, argmax_lowest, subseed, substream
from .io import load_dataset, save_dataset, write_rows
from .methods import METHOD_NAMES, canonical_name, fit_method, get_method, predict_proba_method
from .metrics import auc, mean_tvd

log = logging.getLogger(__name__)

N_JOBS_ENV = "SOFTLABEL_N_JOBS"
SWEEP_FRACTIONS = (0.05, 0.1, 0.2, 0.4, 0.6, 0.8)
RESULT_FIELDS = ("dataset", "gt_model", "uncertainty", "noise_model", "noise_level", "method", "base",
                 "repeat", "metric", "value", "train_fraction")
FAILED = "failed"
# errors a single (method, base) cell may raise without stopping the run
CELL_ERRORS = (SoftLabelError, ArithmeticError, np.linalg.LinAlgError)


def default_n_jobs():
    try:
        return max(1, int(os.environ.get(N_JOBS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    datasets: list
    seed: int
    out: str = "results.csv"
    gt_models: list = field(default_factory=lambda: list(datagen.GT_MODELS))
    uncertainties: list = field(default_factory=lambda: ["low", "high"])
    noise_model: str = "none"
    noise_levels: list = field(default_factory=lambda: [0])
    methods: list = field(default_factory=lambda: list(METHOD_NAMES))
    bases: list = field(default_factory=lambda: sorted(BASE_CLASSIFIERS))
    train_fraction: float = 0.7
    sweep: bool = False
    repeats: int = 25
    ensemble_size: int = 50
    resamples: int = 100
    n_jobs: int = field(default_factory=default_n_jobs)

    def __post_init__(self):
        if isinstance(self.datasets, str):
            self.datasets = [self.datasets]
        self.methods = [canonical_name(m) for m in self.methods]
        for b in self.bases:
            if b not in BASE_CLASSIFIERS:
                raise ValueError(f"unknown base classifier {b!r}")
        if self.noise_model != "none" and self.noise_model not in noise.NOISE_MODELS:
            raise ValueError(f"unknown noise model {self.noise_model!r}")
        for lvl in self.noise_levels:
            noise.level_to_beta(lvl)
        for u in self.uncertainties:
            if u not in ("low", "high"):
                raise ValueError(f"uncertainty must be 'low' or 'high', got {u!r}")
        if not all(0 < f < 1 for f in self.fractions):
            raise ValueError("train fractions must lie in (0, 1)")
        if self.repeats < 1 or self.ensemble_size < 2 or self.resamples < 1:
            raise ValueError("repeats and resamples must be positive, ensemble_size at least 2")
        self.seed = int(self.seed)

    @property
    def fractions(self):
        return SWEEP_FRACTIONS if self.sweep else (self.train_fraction,)

    @classmethod
    def from_json(cls, path, **overrides):
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass(frozen=True)
class Problem:
    """One evaluation setting: features, clean labels, and training labels."""
    dataset: str
    gt_model: str
    uncertainty: str
    features: np.ndarray
    soft: np.ndarray
    hard: np.ndarray | None
    class_count: int

    @property
    def observed(self):
        return self.hard is None


def key(*parts):
    """Stable integer keys for seeding; strings hash through CRC32."""
    return tuple(zlib.crc32(str(p).encode()) if not isinstance(p, (int, np.integer)) else int(p) for p in parts)


def generated_problems(raw: HardDataset, name, cfg: ExperimentConfig):
    out = []
    for kind in cfg.gt_models:
        gt = datagen.build_ground_truth(raw, kind, subseed(cfg.seed, *key("gt", name, kind)))
        levels = datagen.select_uncertainty_levels(gt, cfg.resamples, subseed(cfg.seed, *key("hide", name, kind)))
        for unc, pg in zip(("low", "high"), levels):
            if unc in cfg.uncertainties:
                out.append(Problem(name, gt.kind, unc, pg.dataset.features, pg.dataset.labels,
                                   gt.dataset.labels, raw.class_count))
    return out


def manifest_problems(path, cfg: ExperimentConfig):
    path = Path(path)
    man = json.loads(path.read_text(encoding="utf-8"))
    g = load_dataset(path.parent / man["ground_truth"])
    out = []
    for unc in ("low", "high"):
        if unc in cfg.uncertainties:
            pg = load_dataset(path.parent / man[unc]["file"])
            out.append(Problem(man["dataset"], man["gt_model"], unc, pg.features, pg.labels, g.labels,
                               g.class_count))
    return out


def load_problems(path, cfg: ExperimentConfig):
    """Problems for one dataset entry: a raw hard CSV, a soft CSV, or a ``generate`` manifest."""
    path = Path(path)
    if path.suffix == ".json":
        return manifest_problems(path, cfg)
    data = load_dataset(path)
    if isinstance(data, HardDataset):
        return generated_problems(data, path.stem, cfg)
    return [Problem(path.stem, "-", "-", data.features, data.labels, None, data.class_count)]


def split(n, fraction, rng):
    """Shuffled ``(train, test)`` index arrays; both sides get at least two rows."""
    n_train = min(max(int(round(fraction * n)), 2), n - 2)
    perm = rng.permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def _metrics(prob: Problem, pred, test):
    if prob.observed:
        P = prob.soft[test]
        return {"auc_observed": auc(pred, argmax_lowest(P), prob.class_count),
                "mean_tvd_observed": mean_tvd(pred, P)}
    return {"auc_gt": auc(pred, prob.hard[test], prob.class_count),
            "mean_tvd_pg": mean_tvd(pred, prob.soft[test])}


def run_repeat(prob: Problem, cfg: ExperimentConfig, fraction, repeat):
    """Result rows for every (noise level, method, base) cell of one repeat."""
    base_key = key(prob.dataset, prob.gt_model, prob.uncertainty, f"{fraction:.6g}", repeat)
    train, test = split(len(prob.soft), fraction, substream(cfg.seed, *base_key, 0))
    fit_seed = subseed(cfg.seed, *base_key, 1)
    rows = []
    for level in cfg.noise_levels:
        labels = prob.soft[train]
        model = cfg.noise_model
        if model != "none":
            labels = noise.corrupt_labels(labels, model, noise.level_to_beta(level),
                                          subseed(cfg.seed, *base_key, 2, *key(model, level)))
        data = SoftDataset(prob.features[train], labels, prob.class_count)
        head = (prob.dataset, prob.gt_model, prob.uncertainty, model, level)
        for name in cfg.methods:
            spec = get_method(name, ensemble_size=cfg.ensemble_size)
            for base in cfg.bases:
                tail = (name, base, repeat)
                try:
                    fitted = fit_method(spec, base, data, fit_seed)
                    vals = _metrics(prob, predict_proba_method(fitted, prob.features[test]), test)
                    if not all(np.isfinite(v) for v in vals.values()):
                        raise ArithmeticError("non-finite metric")
                except CELL_ERRORS as e:
                    log.warning("%s/%s repeat %d failed: %s", name, base, repeat, e)
                    rows.append((*head, *tail, FAILED, float("nan"), fraction))
                    continue
                rows.extend((*head, *tail, m, v, fraction) for m, v in vals.items())
    return rows


def _job(args):
    return run_repeat(*args)


def run_experiment(cfg: ExperimentConfig, write=True):
    """All result rows, sorted by their key fields; also written to ``cfg.out``."""
    problems = [p for d in cfg.datasets for p in load_problems(d, cfg)]
    jobs = [(p, cfg, f, r) for p in problems for f in cfg.fractions for r in range(cfg.repeats)]
    if cfg.n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.n_jobs) as pool:
            chunks = list(pool.map(_job, jobs))
    else:
        chunks = [_job(j) for j in jobs]
    rows = sorted((r for c in chunks for r in c), key=_sort_key)
    if write:
        write_results(rows, cfg.out)
        write_rows(summary_path(cfg.out), SUMMARY_FIELDS, summarize(rows))
    return rows


def _sort_key(row):
    d = dict(zip(RESULT_FIELDS, row))
    return (d["dataset"], d["gt_model"], d["uncertainty"], d["noise_model"], d["noise_level"], d["method"],
            d["base"], d["repeat"], d["metric"], d["train_fraction"])


def write_results(rows, path):
    write_rows(path, RESULT_FIELDS, ([*r[:9], repr(float(r[9])), repr(float(r[10]))] for r in rows))


SUMMARY_FIELDS = ("dataset", "gt_model", "uncertainty", "noise_model", "noise_level", "method", "base",
                  "train_fraction", "metric", "mean", "stderr", "n", "failed")


def summary_path(out):
    out = Path(out)
    return out.with_name(out.stem + "_summary" + out.suffix)


def summarize(rows):
    """Mean and standard error per cell over repeats, one row per metric."""
    groups = {}
    for r in rows:
        d = dict(zip(RESULT_FIELDS, r))
        cell = (d["dataset"], d["gt_model"], d["uncertainty"], d["noise_model"], d["noise_level"], d["method"],
                d["base"], d["train_fraction"])
        groups.setdefault(cell, {}).setdefault(d["metric"], []).append(d["value"])
    out = []
    for cell in sorted(groups):
        by_metric = groups[cell]
        n_failed = len(by_metric.pop(FAILED, []))
        for metric in sorted(by_metric):
            v = np.asarray(by_metric[metric], dtype=float)
            se = v.std(ddof=1) / np.sqrt(v.size) if v.size > 1 else float("nan")
            out.append([*map(str, cell), metric, repr(float(v.mean())), repr(float(se)), str(v.size), str(n_failed)])
    return out


def generate_data(raw_path, model_kind, resamples, seed, out_dir):
    """Write ``D^G``, low and high ``D^PG`` CSVs plus a JSON manifest; returns the manifest path."""
    raw = load_dataset(raw_path)
    if not isinstance(raw, HardDataset):
        raise ValueError(f"{raw_path}: generation needs a hard-labelled dataset")
    out_dir = Path(out_dir)
    stem = f"{Path(raw_path).stem}_{datagen._kind(model_kind)}"
    gt = datagen.build_ground_truth(raw, model_kind, seed)
    low, high = datagen.select_uncertainty_levels(gt, resamples, seed)
    save_dataset(gt.dataset, out_dir / f"{stem}_G.csv")
    manifest = {"dataset": Path(raw_path).stem, "gt_model": gt.kind, "seed": int(seed),
                "resamples": int(resamples), "ground_truth": f"{stem}_G.csv",
                "importance_order": [int(j) for j in datagen.feature_importance(gt)]}
    for unc, pg in (("low", low), ("high", high)):
        fname = f"{stem}_PG_{unc}.csv"
        save_dataset(pg.dataset, out_dir / fname)
        manifest[unc] = {"file": fname, "hidden": list(pg.hidden), "visible": list(pg.visible),
                         "mean_tvd": pg.mean_tvd}
    path = out_dir / f"{stem}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
