"""CSV reading and writing for hard- and soft-labelled datasets.

Columns: features ``f_*``, then either an integer ``label`` column or
probability columns ``p_0 .. p_{k-1}``. Floats are written with ``repr`` so
that files round-trip exactly and reruns are byte-identical.
"""
from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .core import HardDataset, InvalidDistributionError, SoftDataset, SoftLabelError, check_distribution


class ParseError(SoftLabelError):
    pass


class SchemaError(SoftLabelError):
    pass


def read_table(path):
    """``(header, rows)`` of a CSV file, all cells as strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    for i, r in enumerate(rows, start=2):
        if len(r) != len(header):
            raise ParseError(f"{path}:{i}: expected {len(header)} fields, got {len(r)}")
    return header, rows


def _floats(rows, cols, path):
    try:
        return np.array([[float(r[c]) for c in cols] for r in rows], dtype=float).reshape(len(rows), len(cols))
    except ValueError as e:
        raise ParseError(f"{path}: {e}") from None


def _columns(header, path):
    feats = [i for i, h in enumerate(header) if h.startswith("f_")]
    probs = {int(m.group(1)): i for i, h in enumerate(header) if (m := re.fullmatch(r"p_(\d+)", h))}
    label = header.index("label") if "label" in header else None
    if not feats:
        raise SchemaError(f"{path}: no f_* feature columns")
    if (label is None) == (not probs):
        raise SchemaError(f"{path}: need exactly one of a 'label' column or p_* columns")
    if probs and sorted(probs) != list(range(len(probs))):
        raise SchemaError(f"{path}: probability columns must be p_0..p_{len(probs) - 1}")
    return feats, label, [probs[c] for c in range(len(probs))]


def load_dataset(path):
    """A :class:`HardDataset` or :class:`SoftDataset`, depending on the label columns."""
    header, rows = read_table(path)
    feats, label, probs = _columns(header, path)
    X = _floats(rows, feats, path)
    names = tuple(header[i] for i in feats)
    if label is not None:
        y = _floats(rows, [label], path)[:, 0]
        if np.any(y < 0) or np.any(y != np.round(y)):
            raise SchemaError(f"{path}: labels must be non-negative integers")
        return HardDataset(X, y.astype(int), None, names)
    P = _floats(rows, probs, path)
    try:
        P = check_distribution(P)
    except InvalidDistributionError as e:
        raise InvalidDistributionError(f"{path}: {e}") from None
    return SoftDataset(X, P, P.shape[1], names)


def _fmt(v):
    return repr(float(v))


def save_dataset(data, path):
    names = list(data.feature_names)
    if isinstance(data, SoftDataset):
        label_cols = [f"p_{c}" for c in range(data.class_count)]
        labels = [[_fmt(v) for v in row] for row in data.labels]
    else:
        label_cols = ["label"]
        labels = [[str(int(v))] for v in data.labels]
    write_rows(path, names + label_cols,
               ([_fmt(v) for v in x] + lab for x, lab in zip(data.features, labels)))


def write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    tmp.replace(path)


def load_confidence_table(path):
    """``(features, labels, confidences, feature_names)`` from ``f_*``, ``label``, ``confidence`` columns."""
    header, rows = read_table(path)
    feats = [i for i, h in enumerate(header) if h.startswith("f_")]
    if "label" not in header or "confidence" not in header or not feats:
        raise SchemaError(f"{path}: need f_* columns plus 'label' and 'confidence'")
    X = _floats(rows, feats, path)
    y = _floats(rows, [header.index("label")], path)[:, 0]
    conf = _floats(rows, [header.index("confidence")], path)[:, 0]
    return X, y, conf, tuple(header[i] for i in feats)
