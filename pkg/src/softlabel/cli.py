"""``softlabel`` command line: simulate, generate, corrupt, run, convert-confidence."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import noise
from .core import SoftDataset, SoftLabelError, confidence_to_soft
from .experiment import ExperimentConfig, generate_data, run_experiment
from .io import load_confidence_table, load_dataset, save_dataset, write_rows
from .simulate import GaussianSimConfig, run_delta_mse

SIM_FIELDS = ("prior", "sample_size", "delta_mse", "stderr", "repeats")


def _floats(s):
    return [float(v) for v in s.split(",")]


def _ints(s):
    return [int(v) for v in s.split(",")]


def _names(s):
    return [v.strip() for v in s.split(",") if v.strip()]


def run_simulation(cfg: GaussianSimConfig, seed, out):
    rows = []
    for curve in run_delta_mse(cfg, seed):
        for n, d, se in zip(curve.sample_sizes, curve.delta_mse, curve.stderr):
            rows.append([repr(curve.prior), str(n), repr(d), repr(se), str(curve.repeats)])
    write_rows(out, SIM_FIELDS, rows)
    return rows


def corrupt_data(in_path, model, beta, seed, out_path):
    data = load_dataset(in_path)
    if not isinstance(data, SoftDataset):
        raise SoftLabelError(f"{in_path}: noise is applied to soft labels (p_* columns)")
    noisy = noise.corrupt_dataset(data, model, beta, seed)
    save_dataset(noisy, out_path)
    return noisy


def convert_confidence(in_path, out_path):
    X, y, conf, names = load_confidence_table(in_path)
    P = np.array([confidence_to_soft(int(lab), float(c)).probs for lab, c in zip(y, conf)]).reshape(-1, 2)
    data = SoftDataset(X, P, 2, names)
    save_dataset(data, out_path)
    return data


def build_parser():
    p = argparse.ArgumentParser(prog="softlabel", description="Soft-label learning experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="mean estimation from soft vs hard labels on two Gaussians")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--priors", type=_floats, default=[0.1, 0.3, 0.5])
    s.add_argument("--sizes", type=_ints, default=[4, 10, 30, 100, 1000])
    s.add_argument("--repeats", type=int, default=10_000)
    s.add_argument("--sigma", type=float, default=0.0, help="std of the noise added to p_C1")
    s.add_argument("--d", type=float, default=0.5)
    s.add_argument("--dims", type=int, default=2)
    s.add_argument("-o", "--out", required=True)

    g = sub.add_parser("generate", help="ground-truth and partial ground-truth datasets from a hard CSV")
    g.add_argument("raw")
    g.add_argument("--model", default="LR", help="LR or bagged-DT")
    g.add_argument("--resamples", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out-dir", required=True)

    c = sub.add_parser("corrupt", help="apply a noise model to a soft-labelled CSV")
    c.add_argument("input")
    c.add_argument("--model", required=True, choices=noise.NOISE_MODELS)
    lvl = c.add_mutually_exclusive_group(required=True)
    lvl.add_argument("--beta", type=float)
    lvl.add_argument("--level", type=int, help="noise level 0..6, beta = 0.05 * level")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("-o", "--out", required=True)

    r = sub.add_parser("run", help="train and evaluate methods over repeated splits")
    r.add_argument("--config", help="JSON file with ExperimentConfig fields")
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--datasets", type=_names)
    r.add_argument("--gt-models", type=_names)
    r.add_argument("--uncertainties", type=_names)
    r.add_argument("--noise-model")
    r.add_argument("--noise-levels", type=_ints)
    r.add_argument("--methods", type=_names)
    r.add_argument("--bases", type=_names)
    r.add_argument("--train-fraction", type=float)
    r.add_argument("--sweep", action="store_true", default=None, help="training-fraction sweep")
    r.add_argument("--repeats", type=int)
    r.add_argument("--ensemble-size", type=int)
    r.add_argument("--resamples", type=int)
    r.add_argument("--n-jobs", type=int)
    r.add_argument("-o", "--out")

    v = sub.add_parser("convert-confidence", help="label + confidence (5..10) columns to soft labels")
    v.add_argument("input")
    v.add_argument("-o", "--out", required=True)
    return p


def _run_config(args):
    overrides = {k: getattr(args, k) for k in (
        "seed", "datasets", "gt_models", "uncertainties", "noise_model", "noise_levels", "methods", "bases",
        "train_fraction", "sweep", "repeats", "ensemble_size", "resamples", "n_jobs", "out")}
    if args.config:
        return ExperimentConfig.from_json(args.config, **overrides)
    if not args.datasets:
        raise SystemExit("run: give --datasets or --config")
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            cfg = GaussianSimConfig(args.d, args.dims, tuple(args.priors), tuple(args.sizes), args.repeats,
                                    args.sigma)
            run_simulation(cfg, args.seed, args.out)
        elif args.command == "generate":
            print(generate_data(args.raw, args.model, args.resamples, args.seed, args.out_dir))
        elif args.command == "corrupt":
            beta = noise.level_to_beta(args.level) if args.level is not None else args.beta
            corrupt_data(args.input, args.model, beta, args.seed, args.out)
        elif args.command == "run":
            cfg = _run_config(args)
            rows = run_experiment(cfg)
            print(f"{len(rows)} rows -> {cfg.out}")
        elif args.command == "convert-confidence":
            convert_confidence(args.input, args.out)
    except (SoftLabelError, ValueError, KeyError, OSError) as e:
        print(f"softlabel {args.command}: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
