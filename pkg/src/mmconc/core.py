"""Finite metric measure spaces and elementary measure operations.

A space is a finite point set with a dense symmetric distance matrix; a
measure is a probability weight vector over the same index set.  Both are
validated at construction and immutable afterwards, so they can be shared
freely between threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidMeasure,
    InvalidSpace,
    MassNotOne,
)

TRIANGLE_TOL = 1e-9
MASS_TOL = 1e-12

# Full O(n^3) triangle validation up to this size; sampled above it.
FULL_TRIANGLE_LIMIT = 1024


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class FiniteMetricSpace:
    """A finite metric or pseudo-metric space.

    Parameters
    ----------
    labels : sequence of str
        Point names, one per index.
    dist : array_like, shape (n, n)
        Symmetric distances with zero diagonal satisfying the triangle
        inequality up to ``TRIANGLE_TOL``.
    is_pseudo : bool
        Allow zero distance between distinct points.
    validate : bool
        Skip checks for matrices that are metrics by construction.
    """

    __slots__ = ("labels", "dist", "is_pseudo")

    def __init__(
        self,
        labels: Sequence[str],
        dist,
        *,
        is_pseudo: bool = False,
        validate: bool = True,
    ):
        labels = tuple(str(x) for x in labels)
        d = np.array(dist, dtype=float)
        if validate:
            self._validate(labels, d, is_pseudo)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", _readonly(d))
        object.__setattr__(self, "is_pseudo", bool(is_pseudo))

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("FiniteMetricSpace is immutable")

    @staticmethod
    def _validate(labels: tuple[str, ...], d: np.ndarray, is_pseudo: bool) -> None:
        n = len(labels)
        if d.ndim != 2 or d.shape != (n, n):
            raise InvalidSpace(f"distance matrix must be {n}x{n}, got {d.shape}")
        if n == 0:
            raise InvalidSpace("a space needs at least one point")
        if not np.all(np.isfinite(d)):
            raise InvalidSpace("distances must be finite")
        if np.any(d < 0):
            raise InvalidSpace("distances must be non-negative")
        if np.any(np.diag(d) != 0.0):
            raise InvalidSpace("diagonal must be exactly zero")
        if not np.array_equal(d, d.T):
            raise InvalidSpace("distance matrix must be symmetric")
        if not is_pseudo and n > 1:
            off = d + np.eye(n)
            if np.min(off) <= 0.0:
                raise InvalidSpace(
                    "zero distance between distinct points; pass is_pseudo=True"
                )
        if n <= FULL_TRIANGLE_LIMIT:
            mids = range(n)
        else:
            rng = np.random.default_rng(0)
            mids = rng.choice(n, size=FULL_TRIANGLE_LIMIT, replace=False)
        for j in mids:
            # d(i,k) <= d(i,j) + d(j,k) for all i,k with this j in the middle
            if np.any(d > d[:, j, None] + d[None, j, :] + TRIANGLE_TOL):
                raise InvalidSpace(f"triangle inequality fails through point {j}")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def diameter(self) -> float:
        return float(np.max(self.dist))

    def __repr__(self) -> str:
        kind = "pseudo-metric" if self.is_pseudo else "metric"
        return f"FiniteMetricSpace(n={self.n}, {kind}, diam={self.diameter:g})"


class Measure:
    """A probability measure on ``n`` indexed points.

    Weights must be non-negative and sum to one within ``MASS_TOL``; the
    constructor validates, it never renormalizes.  Use :meth:`normalized`
    to build from an arbitrary non-negative vector.
    """

    __slots__ = ("weights",)

    def __init__(self, weights):
        w = np.array(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidMeasure("weights must be a non-empty vector")
        if not np.all(np.isfinite(w)):
            raise InvalidMeasure("weights must be finite")
        if np.any(w < 0):
            raise InvalidMeasure("weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > MASS_TOL:
            raise InvalidMeasure(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", _readonly(w))

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("Measure is immutable")

    @classmethod
    def uniform(cls, n: int) -> "Measure":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, i: int) -> "Measure":
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w)

    @classmethod
    def normalized(cls, weights) -> "Measure":
        w = np.array(weights, dtype=float)
        s = float(w.sum())
        if not np.all(np.isfinite(w)) or np.any(w < 0) or s <= 0:
            raise InvalidMeasure("normalized() needs non-negative weights with positive sum")
        return cls(w / s)

    @property
    def n(self) -> int:
        return self.weights.size

    def mass(self, indices: Iterable[int]) -> float:
        idx = list(indices)
        return float(self.weights[idx].sum()) if idx else 0.0

    def support_indices(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.nonzero(self.weights > 0.0)[0])

    def __repr__(self) -> str:
        return f"Measure(n={self.n})"


class MmSpace:
    """A metric measure space: a space together with a probability measure."""

    __slots__ = ("space", "measure")

    def __init__(self, space: FiniteMetricSpace, measure: Measure):
        if space.n != measure.n:
            raise DimensionMismatch(
                f"space has {space.n} points, measure has {measure.n} weights"
            )
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "measure", measure)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("MmSpace is immutable")

    @property
    def n(self) -> int:
        return self.space.n

    def __repr__(self) -> str:
        return f"MmSpace(n={self.n}, diam={self.space.diameter:g})"


@dataclass(frozen=True)
class PointMap:
    """A map between indexed point sets, stored as an image array."""

    source_size: int
    target_size: int
    image: np.ndarray

    def __post_init__(self):
        img = np.array(self.image, dtype=np.intp)
        if img.shape != (self.source_size,):
            raise DimensionMismatch(
                f"image must have length {self.source_size}, got {img.shape}"
            )
        if img.size and (img.min() < 0 or img.max() >= self.target_size):
            raise DimensionMismatch("image entries out of target range")
        object.__setattr__(self, "image", _readonly(img))

    @classmethod
    def identity(cls, n: int) -> "PointMap":
        return cls(n, n, np.arange(n))

    @classmethod
    def constant(cls, source_size: int, target_size: int, j: int = 0) -> "PointMap":
        return cls(source_size, target_size, np.full(source_size, j))


def support(m: MmSpace) -> frozenset[int]:
    """Indices of strictly positive mass."""
    return m.measure.support_indices()


def restrict(m: MmSpace, B: Iterable[int]) -> MmSpace:
    """Restrict to an index set carrying full mass.

    Raises
    ------
    MassNotOne
        If the mass of ``B`` differs from 1 by more than ``MASS_TOL``.
    """
    idx = sorted({int(i) for i in B})
    if any(i < 0 or i >= m.n for i in idx):
        raise DimensionMismatch("restriction indices out of range")
    mass = m.measure.mass(idx)
    if abs(mass - 1.0) > MASS_TOL:
        raise MassNotOne(f"restriction set has mass {mass!r}")
    labels = [m.space.labels[i] for i in idx]
    sub = m.space.dist[np.ix_(idx, idx)]
    # Principal submatrix of a valid (pseudo-)metric is valid.
    space = FiniteMetricSpace(labels, sub, is_pseudo=m.space.is_pseudo, validate=False)
    return MmSpace(space, Measure(m.measure.weights[idx]))


def pushforward(mu: Measure, p: PointMap) -> Measure:
    """Image measure under a point map."""
    if mu.n != p.source_size:
        raise DimensionMismatch(
            f"measure has {mu.n} weights, map expects {p.source_size}"
        )
    w = np.bincount(p.image, weights=mu.weights, minlength=p.target_size)
    return Measure(w)
