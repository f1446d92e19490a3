"""Shared helpers for building random test instances."""
from __future__ import annotations

import numpy as np

from mmconc.core import FiniteMetricSpace, Measure, MmSpace


def random_space(rng: np.random.Generator, n: int, scale: float = 1.0) -> FiniteMetricSpace:
    """Random genuine metric from points in the plane (triangle holds exactly)."""
    pts = rng.uniform(0.0, scale, size=(n, 2))
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    if n > 1:
        off = d + np.eye(n) * 10 * scale
        if off.min() <= 1e-9 * scale:
            # resample on the (measure-zero) event of a coincidence
            return random_space(rng, n, scale)
    return FiniteMetricSpace([f"p{i}" for i in range(n)], d)


def random_measure(rng: np.random.Generator, n: int, sparse: bool = False) -> Measure:
    w = rng.gamma(1.0, 1.0, size=n)
    if sparse and n > 1:
        kill = rng.random(n) < 0.3
        if kill.all():
            kill[rng.integers(n)] = False
        w[kill] = 0.0
    return Measure(w / w.sum())


def random_mm(rng: np.random.Generator, n: int, scale: float = 1.0) -> MmSpace:
    return MmSpace(random_space(rng, n, scale), random_measure(rng, n))
