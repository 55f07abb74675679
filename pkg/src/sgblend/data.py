"""Seeded synthetic datasets, CSV loading and train/val splitting.

All randomness comes from :class:`sgblend.rng.SplitMix64`, so a (generator,
arguments, seed) triple pins the dataset bit for bit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .rng import SplitMix64


class DataError(ValueError):
    pass


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    n_classes: int
    split: str = "train"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise DataError(f"X {self.X.shape} and y {self.y.shape} disagree")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= self.n_classes):
            raise DataError(f"labels must lie in [0, {self.n_classes})")

    def __len__(self):
        return self.X.shape[0]

    def subset(self, idx, split: str | None = None) -> "Dataset":
        return replace(self, X=self.X[idx], y=self.y[idx], split=split or self.split)


def standardize(X: np.ndarray) -> np.ndarray:
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd


def _finish(X, y, n_classes, scale: bool) -> Dataset:
    return Dataset(standardize(X) if scale else X, y, n_classes)


def two_moons(n: int, noise_sd: float = 0.1, seed: int = 0, standardized: bool = True) -> Dataset:
    if n < 2 or n % 2:
        raise DataError(f"two_moons needs an even n >= 2, got {n}")
    if noise_sd < 0:
        raise DataError("noise_sd must be non-negative")
    m = n // 2
    t = np.linspace(0.0, math.pi, m)
    outer = np.column_stack([np.cos(t), np.sin(t)])
    inner = np.column_stack([1.0 - np.cos(t), 0.5 - np.sin(t)])
    X = np.vstack([outer, inner])
    X = X + noise_sd * SplitMix64(seed).normal(X.size).reshape(X.shape)
    y = np.repeat([0, 1], m)
    return _finish(X, y, 2, standardized)


def spirals(n: int, turns: float = 2.0, noise_sd: float = 0.05, seed: int = 0,
            standardized: bool = True) -> Dataset:
    """Two interleaved Archimedean arms, the second rotated by pi."""
    if n < 2 or n % 2:
        raise DataError(f"spirals needs an even n >= 2, got {n}")
    if turns <= 0 or noise_sd < 0:
        raise DataError("turns must be positive and noise_sd non-negative")
    m = n // 2
    r = (np.arange(m) + 0.5) / m
    theta = 2.0 * math.pi * turns * r
    arms = [np.column_stack([r * np.cos(theta + k * math.pi), r * np.sin(theta + k * math.pi)])
            for k in (0, 1)]
    X = np.vstack(arms)
    X = X + noise_sd * SplitMix64(seed).normal(X.size).reshape(X.shape)
    y = np.repeat([0, 1], m)
    return _finish(X, y, 2, standardized)


def gaussian_blobs(n: int, centers, sd: float = 0.5, seed: int = 0, standardized: bool = True) -> Dataset:
    centers = np.asarray(centers, dtype=np.float64)
    if centers.ndim != 2 or centers.shape[0] < 2:
        raise DataError("need at least two centers given as rows of a matrix")
    if n < centers.shape[0] or sd < 0:
        raise DataError("n must cover every center and sd must be non-negative")
    y = np.arange(n) % centers.shape[0]
    X = centers[y] + sd * SplitMix64(seed).normal(n * centers.shape[1]).reshape(n, -1)
    return _finish(X, y, centers.shape[0], standardized)


def load_csv(path, label_column: int = -1, has_header: bool = False) -> Dataset:
    """Read a comma-separated file; rows and columns in errors are 1-based."""
    path = Path(path)
    rows, labels = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if has_header and lineno == 1:
                continue
            if not rec or all(not c.strip() for c in rec):
                continue
            lc = label_column % len(rec)
            feats = []
            for col, cell in enumerate(rec, start=1):
                if col - 1 == lc:
                    try:
                        lab = int(cell.strip())
                    except ValueError:
                        raise DataError(f"row {lineno}, column {col}: label {cell!r} is not an integer") from None
                    if lab < 0:
                        raise DataError(f"row {lineno}, column {col}: negative label {lab}")
                    labels.append(lab)
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(f"row {lineno}, column {col}: cannot parse {cell!r} as a number") from None
                if not math.isfinite(v):
                    raise DataError(f"row {lineno}, column {col}: non-finite value {cell!r}")
                feats.append(v)
            if rows and len(feats) != len(rows[0]):
                raise DataError(f"row {lineno}: expected {len(rows[0])} features, got {len(feats)}")
            rows.append(feats)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(rows), np.array(labels), int(max(labels)) + 1)


def split(ds: Dataset, val_fraction: float = 0.10, seed: int = 0) -> tuple[Dataset, Dataset]:
    if not 0.0 < val_fraction < 1.0:
        raise DataError(f"val_fraction must lie in (0, 1), got {val_fraction}")
    n = len(ds)
    n_val = min(n - 1, max(1, int(round(n * val_fraction))))
    perm = SplitMix64(seed).permutation(n)
    return ds.subset(np.sort(perm[n_val:]), "train"), ds.subset(np.sort(perm[:n_val]), "val")
