"""Finite groups as multiplication tables, with invariance diagnostics."""

from __future__ import annotations

import numpy as np

from .core import FiniteMetricSpace, Measure, PointMap, pushforward
from .distances import mass_transport_distance
from .errors import (
    BadElement,
    DimensionMismatch,
    InvalidGroup,
    NotHomomorphism,
    NotRightInvariant,
)

FULL_ASSOC_LIMIT = 200
FULL_INVARIANCE_LIMIT = 720
_SAMPLES = 20000


class FiniteGroup:
    """A finite group given by its full multiplication table.

    mul[a, b] is the product "a then b".  The identity and inverses are
    derived from the table; the constructor rejects tables that are not
    Latin squares, lack a two-sided identity, or fail associativity (checked
    exhaustively for small orders, on random triples above FULL_ASSOC_LIMIT).
    """

    __slots__ = ("mul", "identity", "inv", "labels")

    def __init__(self, mul, labels=None, *, validate=True, seed=0):
        mul = np.array(mul, dtype=np.intp)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1]:
            raise InvalidGroup(f"multiplication table must be square, got {mul.shape}")
        n = mul.shape[0]
        if n == 0:
            raise InvalidGroup("empty group")
        if mul.min() < 0 or mul.max() >= n:
            raise InvalidGroup("table entries out of range")
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise InvalidGroup("labels must match the group order")
        rng_n = np.arange(n)
        if validate:
            if not (
                np.array_equal(np.sort(mul, axis=1), np.tile(rng_n, (n, 1)))
                and np.array_equal(np.sort(mul, axis=0), np.tile(rng_n[:, None], (1, n)))
            ):
                raise InvalidGroup("table is not a Latin square")
        left_ids = np.nonzero((mul == rng_n).all(axis=1))[0]
        ident = -1
        for e in left_ids:
            if np.array_equal(mul[:, e], rng_n):
                ident = int(e)
                break
        if ident < 0:
            raise InvalidGroup("no two-sided identity")
        inv = np.empty(n, dtype=np.intp)
        for a in range(n):
            hits = np.nonzero(mul[a] == ident)[0]
            if hits.size != 1 or mul[hits[0], a] != ident:
                raise InvalidGroup(f"element {a} has no two-sided inverse")
            inv[a] = hits[0]
        if validate:
            if n <= FULL_ASSOC_LIMIT:
                if not np.array_equal(mul[mul], mul[:, mul]):
                    raise InvalidGroup("associativity fails")
            else:
                rng = np.random.default_rng(seed)
                a = rng.integers(0, n, _SAMPLES)
                b = rng.integers(0, n, _SAMPLES)
                c = rng.integers(0, n, _SAMPLES)
                if not np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]]):
                    raise InvalidGroup("associativity fails on sampled triples")
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inv", inv)
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteGroup is immutable")

    @property
    def n(self) -> int:
        return self.mul.shape[0]

    def op(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def __repr__(self):
        return f"FiniteGroup(order={self.n})"


def _check_element(group: FiniteGroup, g: int) -> int:
    g = int(g)
    if not 0 <= g < group.n:
        raise BadElement(f"element {g} outside order-{group.n} group")
    return g


def translation(group: FiniteGroup, g: int, side: str = "left") -> PointMap:
    """The translation x -> g*x (left) or x -> x*g (right) as a point map."""
    g = _check_element(group, g)
    if side == "left":
        image = group.mul[g, :]
    elif side == "right":
        image = group.mul[:, g]
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return PointMap(group.n, group.n, image)


class RightInvariantMetric:
    """A metric on a group's elements checked for right-invariance.

    d(a*g, b*g) must equal d(a, b); verified for every g up to
    FULL_INVARIANCE_LIMIT elements, on a sample of 50 beyond that.
    """

    __slots__ = ("group", "space")

    def __init__(self, group, dist, *, is_pseudo=False, validate=True, seed=0):
        space = FiniteMetricSpace(
            group.labels, dist, is_pseudo=is_pseudo, validate=validate
        )
        if space.n != group.n:
            raise DimensionMismatch("metric size must match the group order")
        if validate:
            n = group.n
            if n <= FULL_INVARIANCE_LIMIT:
                gs = range(n)
            else:
                gs = np.random.default_rng(seed).integers(0, n, 50)
            d = space.dist
            for g in gs:
                rg = group.mul[:, g]
                gap = float(np.abs(d[np.ix_(rg, rg)] - d).max())
                if gap > 1e-12:
                    raise NotRightInvariant(
                        f"right translation by {g} moves distances by {gap}"
                    )
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "space", space)

    def __setattr__(self, name, value):
        raise AttributeError("RightInvariantMetric is immutable")

    @property
    def dist(self) -> np.ndarray:
        return self.space.dist

    @property
    def n(self) -> int:
        return self.space.n


def invariance_defect(
    group: FiniteGroup,
    space: FiniteMetricSpace,
    mu: Measure,
    g: int,
    *,
    side: str = "left",
) -> float:
    """Transport distance between mu and its translate by g."""
    if space.n != group.n:
        raise DimensionMismatch("space size must match the group order")
    moved = pushforward(mu, translation(group, g, side))
    return mass_transport_distance(moved, mu, space)


def pushforward_hom(
    src: FiniteGroup, dst: FiniteGroup, phi, *, validate=True, seed=0
) -> PointMap:
    """Validate phi as a homomorphism and wrap it as a point map."""
    phi = np.array(phi, dtype=np.intp)
    if phi.shape != (src.n,):
        raise DimensionMismatch(f"phi must have length {src.n}")
    if phi.size and (phi.min() < 0 or phi.max() >= dst.n):
        raise BadElement("phi image outside the target group")
    if validate:
        if phi[src.identity] != dst.identity:
            raise NotHomomorphism("identity is not preserved")
        if src.n <= FULL_INVARIANCE_LIMIT:
            lhs = phi[src.mul]
            rhs = dst.mul[phi[:, None], phi[None, :]]
            if not np.array_equal(lhs, rhs):
                raise NotHomomorphism("phi(a*b) != phi(a)*phi(b) somewhere")
        else:
            rng = np.random.default_rng(seed)
            a = rng.integers(0, src.n, _SAMPLES)
            b = rng.integers(0, src.n, _SAMPLES)
            if not np.array_equal(phi[src.mul[a, b]], dst.mul[phi[a], phi[b]]):
                raise NotHomomorphism("phi(a*b) != phi(a)*phi(b) on sampled pairs")
    return PointMap(src.n, dst.n, phi)


def difference_set_union(group: FiniteGroup, sets) -> np.ndarray:
    """Union over the given sets S of all products a * b^{-1} with a, b in S."""
    out: set[int] = set()
    for S in sets:
        idx = np.array(sorted({_check_element(group, s) for s in S}), dtype=np.intp)
        if idx.size == 0:
            continue
        prods = group.mul[np.ix_(idx, group.inv[idx])]
        out.update(int(v) for v in prods.ravel())
    return np.array(sorted(out), dtype=np.intp)
