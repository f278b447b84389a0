"""The ten acceptance criteria, each at its stated tolerance.

Every test records a short ``detail`` string; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.
"""
import json
from pathlib import Path

import numpy as np
import pytest

from softlabel import noise
from softlabel.classifiers import BASE_CLASSIFIERS, make_classifier
from softlabel.classifiers.logistic import objective_and_grad
from softlabel.classifiers.sgd import objective as sgd_objective
from softlabel.cli import main
from softlabel.core import SoftDataset
from softlabel.datagen import build_ground_truth
from softlabel.experiment import ExperimentConfig, run_experiment
from softlabel.io import load_dataset
from softlabel.methods import fit_method, get_method, predict_proba_method, registry
from softlabel.metrics import auc, tvd
from softlabel.simulate import GaussianSimConfig, run_delta_mse

FIXTURES = Path(__file__).parent / "fixtures"
DATASETS = ("iris", "wine", "breast_cancer")
SEED = 20240607


def _se2(a, b):
    return 2 * np.hypot(a, b)


# 1. noiseless simulation: soft labels always win, most clearly for small samples

def test_criterion_01_simulation_sign(record_property):
    cfg = GaussianSimConfig(priors=(0.1, 0.3, 0.5), sample_sizes=(4, 10, 30, 100, 1000), repeats=10_000)
    curves = run_delta_mse(cfg, SEED)
    bad = []
    for c in curves:
        for n, d, se in zip(c.sample_sizes, c.delta_mse, c.stderr):
            if not d < 2 * se:
                bad.append(f"prior={c.prior} n={n}: {d:+.2e} (se {se:.1e})")
        i10, i1000 = c.sample_sizes.index(10), c.sample_sizes.index(1000)
        d10, d1000 = abs(c.delta_mse[i10]), abs(c.delta_mse[i1000])
        if not d10 + _se2(c.stderr[i10], c.stderr[i1000]) > d1000:
            bad.append(f"prior={c.prior}: |d(10)|={d10:.2e} <= |d(1000)|={d1000:.2e}")
    worst = max(d for c in curves for d in c.delta_mse)
    record_property("detail", f"max delta_mse {worst:+.2e}; " + ("; ".join(bad) or "all 15 cells below 0 within 2 SE"))
    assert not bad


# 2. noisy soft labels: helpful at n=4, harmful at n=10000

def test_criterion_02_simulation_crossover(record_property):
    small = run_delta_mse(GaussianSimConfig(priors=(0.1,), sample_sizes=(4,), repeats=10_000, noise_sigma=0.1),
                          SEED)[0]
    large = run_delta_mse(GaussianSimConfig(priors=(0.1,), sample_sizes=(10_000,), repeats=1_000,
                                            noise_sigma=0.1), SEED)[0]
    d4, se4 = small.delta_mse[0], small.stderr[0]
    dl, sel = large.delta_mse[0], large.stderr[0]
    record_property("detail", f"n=4: {d4:+.3e} (se {se4:.1e}); n=10000: {dl:+.3e} (se {sel:.1e})")
    assert d4 < 2 * se4
    assert dl > -2 * sel


# 3. noise model unit suite

def test_criterion_03_noise_models(record_property):
    rng = np.random.default_rng(SEED)
    for k in (2, 3, 5, 10):
        for p_e in np.linspace(0, 1, 11):
            assert np.allclose(noise.ncar_matrix(p_e, k).sum(axis=1), 1, atol=1e-9, rtol=0)
            T = noise.nar_matrix(p_e, k, rng)
            assert np.allclose(T.sum(axis=1), 1, atol=1e-9, rtol=0) and np.all(T >= 0)
    grid = np.linspace(0, 1, 1001)
    for variant in noise.MISCALIBRATION:
        spec = noise.MiscalSpec(variant, 0.3)
        assert noise.miscalibrate_scalar(0.0, spec) == 0.0
        assert noise.miscalibrate_scalar(1.0, spec) == 1.0
        out = noise.miscalibrate_scalar(grid, spec)
        assert np.all(np.diff(out) >= 0), variant
    over = noise.miscalibrate_scalar(0.5, noise.MiscalSpec("overprediction", 0.3))
    under = noise.miscalibrate_scalar(0.25, noise.MiscalSpec("underextremity", 0.3))
    record_property("detail", f"overprediction(0.5)={over!r}, underextremity(0.25)={under!r}")
    assert abs(over - 0.8) < 1e-12
    assert abs(under - 0.40) < 1e-12


# 4. metrics against independent oracles

def _auc_oracle(scores, y):
    pos, neg = scores[y == 1], scores[y == 0]
    wins = sum((p > q) + 0.5 * (p == q) for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


def test_criterion_04_metric_oracles(record_property):
    rng = np.random.default_rng(SEED)
    mismatches = 0
    for i in range(200):
        n = int(rng.integers(2, 60))
        y = rng.integers(0, 2, n)
        y[:2] = [0, 1]
        # coarse scores so that ties are common
        s = rng.integers(0, 8, n) / 8 if i % 2 else rng.random(n)
        P = np.column_stack([1 - s, s])
        mismatches += auc(P, y, 2) != _auc_oracle(s, y)
    P, Q, R = (rng.dirichlet(np.ones(4), size=10_000) for _ in range(3))
    worst, symmetric, bounded = -np.inf, True, True
    for p, q, r in zip(P, Q, R):
        dpq, dqr, dpr = tvd(p, q), tvd(q, r), tvd(p, r)
        worst = max(worst, dpr - (dpq + dqr))
        symmetric &= dpq == tvd(q, p) and tvd(p, p) == 0
        bounded &= 0 <= dpq <= 1
    record_property("detail", f"auc mismatches {mismatches}/200; max triangle excess {worst:.1e}")
    assert mismatches == 0
    assert worst <= 1e-12
    assert symmetric and bounded

# 5. integer weights behave like physical duplicates

def _weighted_problem(seed):
    rng = np.random.default_rng(seed)
    k, d, n = 3, 4, 60
    y = np.repeat(np.arange(k), n // k)
    X = rng.standard_normal((n, d)) + 1.5 * np.eye(k, d)[y]
    w = rng.integers(1, 5, n)
    return X, y, w, np.repeat(X, w, axis=0), np.repeat(y, w)


@pytest.mark.parametrize("base", sorted(BASE_CLASSIFIERS))
def test_criterion_05_weights_equal_duplication(base, record_property):
    X, y, w, Xd, yd = _weighted_problem(SEED)
    grid = np.random.default_rng(1).uniform(-3, 4, (500, X.shape[1]))
    a = make_classifier(base, 3, 7).fit(X, y, w)
    b = make_classifier(base, 3, 7).fit(Xd, yd)
    if base in ("GNB", "DT"):
        diff = np.max(np.abs(a.predict_proba(grid) - b.predict_proba(grid)))
        same = np.array_equal(a.predict(grid), b.predict(grid))
        record_property("detail", f"{base}: labels identical={same}, max |dp|={diff:.1e}")
        assert same
        # weights enter the sufficient statistics in a different summation order than duplicates
        assert diff <= (0 if base == "DT" else 1e-12)
        return
    if base == "LR":
        # weights are rescaled to mean 1, so the duplicated fit is matched by C scaled by sum(w)/n
        a = make_classifier(base, 3, 7, C=w.sum() / len(w)).fit(X, y, w)
        Y, Yd = np.eye(3)[y], np.eye(3)[yd]
        gaps = []
        for fitted in (a, b):
            p = np.hstack([fitted.coef_, fitted.intercept_[:, None]]).ravel()
            fw = objective_and_grad(p, X, Y, w.astype(float), 1.0)[0]
            fd = objective_and_grad(p, Xd, Yd, np.ones(len(yd)), 1.0)[0]
            gaps.append(abs(fw - fd))
        fa = objective_and_grad(np.hstack([a.coef_, a.intercept_[:, None]]).ravel(), Xd, Yd, np.ones(len(yd)), 1.0)[0]
        fb = objective_and_grad(np.hstack([b.coef_, b.intercept_[:, None]]).ravel(), Xd, Yd, np.ones(len(yd)), 1.0)[0]
        gaps.append(abs(fa - fb))
    else:
        gaps = []
        for c in range(3):
            y_pm, yd_pm = np.where(y == c, 1.0, -1.0), np.where(yd == c, 1.0, -1.0)
            for fitted in (a, b):
                coef, icpt = fitted.coef_[c], fitted.intercept_[c]
                fw = sgd_objective(coef, icpt, X, y_pm, w, fitted.alpha)
                fd = sgd_objective(coef, icpt, Xd, yd_pm, np.ones(len(yd)), fitted.alpha)
                gaps.append(abs(fw - fd))
    record_property("detail", f"{base}: max objective gap {max(gaps):.1e}")
    assert max(gaps) < 1e-8


# 6. one-hot soft labels collapse the soft methods onto their hard counterparts

@pytest.mark.parametrize("base", sorted(BASE_CLASSIFIERS))
def test_criterion_06_one_hot_collapse(base, record_property):
    gt = build_ground_truth(load_dataset(FIXTURES / "wine.csv"), "LR", SEED)
    k = gt.dataset.class_count
    data = SoftDataset(gt.dataset.features, np.eye(k)[gt.dataset.labels], k)
    grid = np.random.default_rng(2).standard_normal((300, data.features.shape[1]))

    def preds(names, size=None):
        return [predict_proba_method(fit_method(get_method(n, ensemble_size=size), base, data, SEED), grid)
                for n in names]

    single = preds(("PluralityClf", "SampleClf", "DuplicateWeightsClf"))
    ens = preds(("PluralityBootstrapClf", "BootstrapSamplingClf", "BootstrapDuplicateWeightsClf"), 10)
    ok = [all(np.array_equal(g[0], h) for h in g[1:]) for g in (single, ens)]
    record_property("detail", f"{base}: single triple equal={ok[0]}, bootstrap triple equal={ok[1]}")
    assert all(ok)


# 7. soft-label ensembles beat hard-label ensembles on generated data

@pytest.fixture(scope="module")
def trend_rows():
    reg = registry()
    methods = [n for n, m in reg.items() if m.category in ("HardEns", "SoftEns")]
    cfg = ExperimentConfig(datasets=[str(FIXTURES / f"{d}.csv") for d in DATASETS], seed=SEED, gt_models=["LR"],
                           uncertainties=["high"], methods=methods, bases=["DT", "SGD"], repeats=25,
                           ensemble_size=50, resamples=100, n_jobs=1)
    return run_experiment(cfg, write=False)


_COLS = {"dataset": 0, "noise_level": 4, "method": 5, "base": 6}


def _mean_auc(rows, **match):
    """Mean and standard error of ``auc_gt`` over the rows matching ``match``."""
    vals = np.array([r[9] for r in rows
                     if r[8] == "auc_gt" and all(r[_COLS[f]] == v for f, v in match.items())])
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(vals.size))


@pytest.mark.parametrize("base", ["DT", "SGD"])
def test_criterion_07_soft_ensembles_lead(base, trend_rows, record_property):
    reg = registry()
    wins, parts = 0, []
    for ds in DATASETS:
        best = {}
        for cat in ("SoftEns", "HardEns"):
            scores = {n: _mean_auc(trend_rows, dataset=ds, base=base, method=n)[0]
                      for n, m in reg.items() if m.category == cat}
            best[cat] = max(scores.items(), key=lambda kv: kv[1])
        wins += best["SoftEns"][1] >= best["HardEns"][1]
        parts.append(f"{ds} soft {best['SoftEns'][1]:.4f} vs hard {best['HardEns'][1]:.4f}")
    record_property("detail", f"{base}: {wins}/3 ({'; '.join(parts)})")
    assert wins >= 2


# 8. more NCAR noise, lower SampleClf AUC

@pytest.mark.parametrize("base", sorted(BASE_CLASSIFIERS))
def test_criterion_08_ncar_sweep(base, record_property):
    cfg = ExperimentConfig(datasets=[str(FIXTURES / "breast_cancer.csv")], seed=SEED, gt_models=["LR"],
                           uncertainties=["high"], methods=["SampleClf"], bases=[base], noise_model="ncar",
                           noise_levels=list(range(7)), repeats=25, resamples=100, n_jobs=1)
    rows = run_experiment(cfg, write=False)
    stats = [_mean_auc(rows, noise_level=lvl) for lvl in range(7)]
    means = [m for m, _ in stats]
    rises = [(lvl, means[lvl + 1] - means[lvl], _se2(stats[lvl][1], stats[lvl + 1][1])) for lvl in range(6)]
    record_property("detail", f"{base}: " + " ".join(f"{m:.3f}" for m in means))
    assert all(rise <= slack for _, rise, slack in rises), rises
    assert means[-1] < means[0]


# 9. same seed, same bytes

def _run_twice(tmp_path, argv_for):
    outs = []
    for tag in ("a", "b"):
        d = tmp_path / tag
        d.mkdir(parents=True)
        assert main(argv_for(d)) == 0
        outs.append({p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()})
    return outs


def test_criterion_09_determinism(tmp_path, record_property):
    checked = []
    sim = _run_twice(tmp_path / "sim", lambda d: ["simulate", "--seed", "3", "--repeats", "300", "--sigma", "0.1",
                                                  "-o", str(d / "sim.csv")])
    gen = _run_twice(tmp_path / "gen", lambda d: ["generate", str(FIXTURES / "wine.csv"), "--resamples", "20",
                                                  "--seed", "3", "-o", str(d)])
    run = _run_twice(tmp_path / "run", lambda d: [
        "run", "--seed", "3", "--datasets", str(FIXTURES / "iris.csv"), "--gt-models", "LR",
        "--noise-model", "ncar", "--noise-levels", "0,3", "--methods", "SampleClf,BootstrapSamplingClf",
        "--bases", "DT,SGD", "--repeats", "2", "--ensemble-size", "3", "--resamples", "10",
        "-o", str(d / "results.csv")])
    for name, (a, b) in (("simulate", sim), ("generate", gen), ("run", run)):
        assert a and a == b, name
        checked.append(f"{name}: {len(a)} files")
    manifest = next(v for p, v in gen[0].items() if p.suffix == ".json")
    assert json.loads(manifest)["high"]["file"]
    record_property("detail", "byte-identical; " + ", ".join(checked))


# 10. the logistic-regression gradient

def test_criterion_10_lr_gradient(record_property):
    rng = np.random.default_rng(SEED)
    n, d, k = 50, 5, 4
    X = rng.standard_normal((n, d))
    Y = np.eye(k)[rng.integers(0, k, n)]
    w = rng.uniform(0.1, 3.0, n)
    h = 1e-6
    errs = []
    for _ in range(10):
        p = rng.standard_normal(k * (d + 1))
        _, g = objective_and_grad(p, X, Y, w, 1.0)
        num = np.array([(objective_and_grad(p + h * e, X, Y, w, 1.0)[0]
                         - objective_and_grad(p - h * e, X, Y, w, 1.0)[0]) / (2 * h) for e in np.eye(p.size)])
        errs.append(np.linalg.norm(g - num) / np.linalg.norm(num))
    record_property("detail", f"max relative error {max(errs):.1e}")
    assert max(errs) < 1e-5

