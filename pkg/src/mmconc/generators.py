"""Stock groups, invariant metrics, spaces, measures, and flows."""

from __future__ import annotations

import itertools

import numpy as np

from .core import FiniteMetricSpace, Measure
from .dynamics import FlowInstance
from .errors import InvalidGroup, TooLarge
from .groups import FiniteGroup, RightInvariantMetric

SYM_LIMIT = 6
HYPERCUBE_LIMIT = 10


# groups -----------------------------------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise InvalidGroup("cyclic group needs n >= 1")
    idx = np.arange(n)
    return FiniteGroup(np.add.outer(idx, idx) % n)


def hypercube_group(n: int) -> FiniteGroup:
    """Z_2^n with elements as bitmasks and xor as the product."""
    if not 1 <= n <= HYPERCUBE_LIMIT:
        raise TooLarge(f"hypercube group supports 1 <= n <= {HYPERCUBE_LIMIT}")
    idx = np.arange(2**n)
    labels = [format(i, f"0{n}b") for i in idx]
    return FiniteGroup(np.bitwise_xor.outer(idx, idx), labels)


def sym_group(n: int) -> FiniteGroup:
    """Permutations of n letters in lexicographic order; the product of
    a and b maps i to b(a(i))."""
    if not 1 <= n <= SYM_LIMIT:
        raise TooLarge(f"symmetric group supports 1 <= n <= {SYM_LIMIT}")
    perms = list(itertools.permutations(range(n)))
    P = np.array(perms, dtype=np.intp)
    m = len(perms)
    index = {P[k].tobytes(): k for k in range(m)}
    mul = np.empty((m, m), dtype=np.intp)
    for a in range(m):
        comp = P[:, P[a]]  # comp[b, i] = P[b][P[a][i]] = (a then b)(i)
        for b in range(m):
            mul[a, b] = index[comp[b].tobytes()]
    labels = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(mul, labels)


# invariant metrics --------------------------------------------------------------


def cyclic_geodesic_metric(n: int, *, normalized: bool = False) -> RightInvariantMetric:
    group = cyclic_group(n)
    idx = np.arange(n)
    k = np.abs(np.subtract.outer(idx, idx))
    d = np.minimum(k, n - k).astype(float)
    if normalized and n >= 2:
        d /= float(n // 2)
    return RightInvariantMetric(group, d)


def hypercube_hamming_metric(n: int) -> RightInvariantMetric:
    group = hypercube_group(n)
    idx = np.arange(2**n)
    d = np.bitwise_count(np.bitwise_xor.outer(idx, idx)).astype(float) / n
    return RightInvariantMetric(group, d)


def sym_hamming_metric(n: int, weights=None) -> RightInvariantMetric:
    """Position-weighted Hamming distance on permutations; the default
    weights 1/n give the normalized Hamming metric.  Right-invariant for any
    positive weights under this composition convention."""
    group = sym_group(n)
    if weights is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(weights, dtype=float).ravel()
        if w.shape != (n,):
            raise ValueError(f"weights must have length {n}")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be positive and finite")
    P = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    d = np.zeros((len(P), len(P)))
    for i in range(n):
        d += w[i] * (P[:, i][:, None] != P[:, i][None, :])
    return RightInvariantMetric(group, d)


# plain spaces --------------------------------------------------------------------


def path_space(n: int) -> FiniteMetricSpace:
    idx = np.arange(n)
    d = np.abs(np.subtract.outer(idx, idx)).astype(float)
    return FiniteMetricSpace([str(i) for i in range(n)], d)


def cycle_space(n: int, *, normalized: bool = False) -> FiniteMetricSpace:
    return cyclic_geodesic_metric(n, normalized=normalized).space


def simplex_space(n: int) -> FiniteMetricSpace:
    d = 1.0 - np.eye(n)
    return FiniteMetricSpace([str(i) for i in range(n)], d)


def hypercube_space(n: int) -> FiniteMetricSpace:
    """{0,1}^n under the normalized Hamming distance."""
    if not 1 <= n <= HYPERCUBE_LIMIT:
        raise TooLarge(f"hypercube space supports 1 <= n <= {HYPERCUBE_LIMIT}")
    idx = np.arange(2**n)
    d = np.bitwise_count(np.bitwise_xor.outer(idx, idx)).astype(float) / n
    labels = [format(i, f"0{n}b") for i in idx]
    return FiniteMetricSpace(labels, d)


# measures -------------------------------------------------------------------------


def bernoulli_product_measure(n: int, p: float) -> Measure:
    """Product of n Bernoulli(p) coordinates on the 2^n bitmask points."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if not 1 <= n <= HYPERCUBE_LIMIT:
        raise TooLarge(f"supports 1 <= n <= {HYPERCUBE_LIMIT}")
    pop = np.bitwise_count(np.arange(2**n)).astype(float)
    w = p**pop * (1.0 - p) ** (n - pop)
    return Measure(w / w.sum())


# flows ------------------------------------------------------------------------------


def regular_flow(metric: RightInvariantMetric) -> FlowInstance:
    """The group acting on itself by left multiplication."""
    group = metric.group
    return FlowInstance(group, metric.space, group.mul)


def trivial_flow(group: FiniteGroup, space: FiniteMetricSpace) -> FlowInstance:
    action = np.tile(np.arange(space.n), (group.n, 1))
    return FlowInstance(group, space, action)


def coset_flow(metric: RightInvariantMetric, subgroup) -> FlowInstance:
    """Left multiplication on left cosets of a subgroup, with the quotient
    min-distance metric (right translation by the subgroup is isometric, so
    the quotient is a genuine metric up to merged points)."""
    group = metric.group
    H = np.array(sorted({int(h) for h in subgroup}), dtype=np.intp)
    if H.size == 0 or group.identity not in H:
        raise InvalidGroup("subgroup must contain the identity")
    closure = set(group.mul[np.ix_(H, H)].ravel().tolist())
    if not closure <= set(H.tolist()):
        raise InvalidGroup("subgroup is not closed under the product")
    n = group.n
    coset_of = np.full(n, -1, dtype=np.intp)
    reps = []
    for x in range(n):
        if coset_of[x] >= 0:
            continue
        members = np.unique(group.mul[x, H])
        coset_of[members] = len(reps)
        reps.append(members)
    k = len(reps)
    dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            dij = float(metric.dist[np.ix_(reps[i], reps[j])].min())
            dist[i, j] = dist[j, i] = dij
    labels = [group.labels[int(m[0])] + "H" for m in reps]
    space = FiniteMetricSpace(labels, dist, is_pseudo=metric.space.is_pseudo)
    action = np.empty((n, k), dtype=np.intp)
    for g in range(n):
        for c in range(k):
            action[g, c] = coset_of[group.mul[g, reps[c][0]]]
    return FlowInstance(group, space, action)


def union_flow(a: FlowInstance, b: FlowInstance, cross: float) -> FlowInstance:
    """Disjoint union of two flows of the same group, blocks at a constant
    cross distance (needs 2*cross >= each block diameter)."""
    if a.group is not b.group and not np.array_equal(a.group.mul, b.group.mul):
        raise InvalidGroup("flows must share the group")
    na, nb = a.n_points, b.n_points
    dist = np.full((na + nb, na + nb), float(cross))
    dist[:na, :na] = a.space.dist
    dist[na:, na:] = b.space.dist
    labels = ["0:" + lab for lab in a.space.labels] + [
        "1:" + lab for lab in b.space.labels
    ]
    pseudo = a.space.is_pseudo or b.space.is_pseudo
    space = FiniteMetricSpace(labels, dist, is_pseudo=pseudo)
    action = np.concatenate([a.action, b.action + na], axis=1)
    return FlowInstance(a.group, space, action)
