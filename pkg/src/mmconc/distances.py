"""Distances between probability measures on a common finite space.

Three metrics are provided: the mass transportation distance (supremum of
integral gaps over bounded 1-Lipschitz test functions, solved as an LP),
the Prokhorov distance (smallest eps so that every set's mass is matched
inside its open eps-neighborhood up to eps, decided through max-flow
coupling feasibility on the finite critical set), and the Ky Fan distance
between functions under a fixed measure.
"""
from __future__ import annotations

from collections import deque

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .core import FiniteMetricSpace, Measure
from .errors import (
    BadFamily,
    DimensionMismatch,
    InvariantViolation,
    SolverFailure,
    TooLarge,
)
from .lipschitz import check_function, lip_constant

LP_TOL = 1e-9
ORACLE_LIMIT = 20

# Pair constraints are materialized densely up to this size; above it the LP
# is solved by constraint regeneration from a nearest-neighbor seed set.
DENSE_PAIR_LIMIT = 1500


def _check_pair(mu: Measure, nu: Measure, space: FiniteMetricSpace) -> None:
    if mu.n != space.n or nu.n != space.n:
        raise DimensionMismatch(
            f"measures of sizes {mu.n}, {nu.n} on a space of size {space.n}"
        )


# mass transportation --------------------------------------------------------


def _pair_rows(iu: np.ndarray, ju: np.ndarray, n: int) -> csr_matrix:
    """Rows f_i - f_j <= b and f_j - f_i <= b for each listed pair."""
    m = len(iu)
    indices = np.empty(4 * m, dtype=np.int64)
    data = np.empty(4 * m)
    indices[0 : 2 * m : 2] = iu
    indices[1 : 2 * m : 2] = ju
    data[0 : 2 * m : 2] = 1.0
    data[1 : 2 * m : 2] = -1.0
    indices[2 * m :: 2] = iu
    indices[2 * m + 1 :: 2] = ju
    data[2 * m :: 2] = -1.0
    data[2 * m + 1 :: 2] = 1.0
    indptr = np.arange(0, 4 * m + 1, 2)
    return csr_matrix((data, indices, indptr), shape=(2 * m, n))


def _solve_lip11_lp(c: np.ndarray, iu, ju, b: np.ndarray, n: int):
    A = _pair_rows(np.asarray(iu), np.asarray(ju), n)
    res = linprog(
        -c,
        A_ub=A,
        b_ub=np.concatenate([b, b]),
        bounds=(-1.0, 1.0),
        method="highs",
    )
    if res.status != 0:
        raise SolverFailure(f"LP solver status {res.status}: {res.message}")
    return float(-res.fun), res.x


def mass_transport_distance(
    mu: Measure,
    nu: Measure,
    space: FiniteMetricSpace,
    *,
    dense_pair_limit: int = DENSE_PAIR_LIMIT,
) -> float:
    """sup { |int f dmu - int f dnu| : f 1-Lipschitz, |f| <= 1 }.

    The feasible set is symmetric under f -> -f, so a single maximization
    of the signed gap suffices.  Values lie in [0, 2].
    """
    _check_pair(mu, nu, space)
    n = space.n
    c = mu.weights - nu.weights
    if n == 1 or not np.any(c):
        return 0.0
    d = space.dist
    if n <= dense_pair_limit:
        iu, ju = np.triu_indices(n, k=1)
        val, _ = _solve_lip11_lp(c, iu, ju, d[iu, ju], n)
        return float(np.clip(val, 0.0, 2.0))
    return _transport_by_regeneration(c, d, n)


def _transport_by_regeneration(c: np.ndarray, d: np.ndarray, n: int) -> float:
    """Cut regeneration: seed with nearest-neighbor pair constraints, then
    repeatedly add violated pairs until the solution is feasible for all
    pairs.  Terminates with the exact full-LP value."""
    k = min(16, n - 1)
    nn = np.argsort(d, axis=1)[:, 1 : k + 1]
    pairs: set[tuple[int, int]] = set()
    for i in range(n):
        for j in nn[i]:
            a, b = (i, int(j)) if i < j else (int(j), i)
            pairs.add((a, b))
    for _ in range(80):
        iu = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
        ju = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
        val, f = _solve_lip11_lp(c, iu, ju, d[iu, ju], n)
        added = 0
        block = 256
        for lo in range(0, n, block):
            hi = min(lo + block, n)
            viol = np.abs(f[lo:hi, None] - f[None, :]) - d[lo:hi, :]
            rows, cols = np.nonzero(viol > LP_TOL)
            if rows.size == 0:
                continue
            order = np.argsort(viol[rows, cols])[::-1][: 8 * (hi - lo)]
            for r, cidx in zip(rows[order], cols[order]):
                i, j = lo + int(r), int(cidx)
                if i == j:
                    continue
                key = (i, j) if i < j else (j, i)
                if key not in pairs:
                    pairs.add(key)
                    added += 1
        if added == 0:
            return float(np.clip(val, 0.0, 2.0))
    raise SolverFailure("constraint regeneration did not converge")


# Prokhorov ------------------------------------------------------------------


class _Dinic:
    """Max-flow with float capacities on a small graph."""

    __slots__ = ("n", "head", "to", "nxt", "cap")
    EPS = 1e-14

    def __init__(self, n: int):
        self.n = n
        self.head = [-1] * n
        self.to: list[int] = []
        self.nxt: list[int] = []
        self.cap: list[float] = []

    def add(self, u: int, v: int, c: float) -> None:
        self.to.append(v)
        self.cap.append(c)
        self.nxt.append(self.head[u])
        self.head[u] = len(self.to) - 1
        self.to.append(u)
        self.cap.append(0.0)
        self.nxt.append(self.head[v])
        self.head[v] = len(self.to) - 1

    def maxflow(self, s: int, t: int) -> float:
        to, nxt, cap = self.to, self.nxt, self.cap
        total = 0.0
        while True:
            level = [-1] * self.n
            level[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                e = self.head[u]
                while e != -1:
                    v = to[e]
                    if cap[e] > self.EPS and level[v] < 0:
                        level[v] = level[u] + 1
                        q.append(v)
                    e = nxt[e]
            if level[t] < 0:
                return total
            it = list(self.head)

            def dfs(u: int, pushed: float) -> float:
                if u == t:
                    return pushed
                e = it[u]
                while e != -1:
                    v = to[e]
                    if cap[e] > self.EPS and level[v] == level[u] + 1:
                        got = dfs(v, min(pushed, cap[e]))
                        if got > self.EPS:
                            cap[e] -= got
                            cap[e ^ 1] += got
                            it[u] = e
                            return got
                    e = nxt[e]
                    it[u] = e
                return 0.0

            while True:
                pushed = dfs(s, float("inf"))
                if pushed <= self.EPS:
                    break
                total += pushed


def _coupling_maxflow(w1: np.ndarray, w2: np.ndarray, allowed: np.ndarray) -> float:
    """Max mass of a sub-coupling of (w1, w2) supported on allowed pairs."""
    n1, n2 = len(w1), len(w2)
    s, t = n1 + n2, n1 + n2 + 1
    net = _Dinic(n1 + n2 + 2)
    for i in range(n1):
        if w1[i] > 0.0:
            net.add(s, i, float(w1[i]))
    for j in range(n2):
        if w2[j] > 0.0:
            net.add(n1 + j, t, float(w2[j]))
    ii, jj = np.nonzero(allowed)
    for i, j in zip(ii.tolist(), jj.tolist()):
        if w1[i] > 0.0 and w2[j] > 0.0:
            net.add(i, n1 + j, 2.0)
    return net.maxflow(s, t)


def prokhorov_distance(mu: Measure, nu: Measure, space: FiniteMetricSpace) -> float:
    """inf { eps > 0 : mu(B) <= nu(B^eps_open) + eps for all B } computed
    exactly over the finite critical set.

    On each interval between consecutive distinct distances the worst mass
    gap equals 1 minus the max-flow of the coupling network whose allowed
    pairs are the open-ball edges, so the infimum is
    min_k max(d_(k), gap_k); the mass gap sequence is non-increasing and
    the distances increase, so the minimum sits at their crossover.
    """
    _check_pair(mu, nu, space)
    if mu.n == 1:
        return 0.0
    w1, w2 = mu.weights, nu.weights
    d = space.dist
    dvals = np.unique(d)
    K = len(dvals)

    def gap(k: int) -> float:
        allowed = d <= dvals[k]
        return max(0.0, 1.0 - _coupling_maxflow(w1, w2, allowed))

    if K <= 64:
        return float(min(max(float(dvals[k]), gap(k)) for k in range(K)))
    lo, hi = 0, K - 1  # predicate gap(k) <= dvals[k] is monotone in k
    while lo < hi:
        mid = (lo + hi) // 2
        if gap(mid) <= float(dvals[mid]) + 1e-12:
            hi = mid
        else:
            lo = mid + 1
    window = [k for k in (lo - 1, lo, lo + 1) if 0 <= k < K]
    return float(min(max(float(dvals[k]), gap(k)) for k in window))


def prokhorov_distance_exhaustive(
    mu: Measure, nu: Measure, space: FiniteMetricSpace
) -> float:
    """Enumerate all 2^n subsets to evaluate the Prokhorov infimum in both
    role orders, check they agree, and return the value.

    Raises
    ------
    TooLarge
        If the space has more than 20 points.
    InvariantViolation
        If the two swapped-role formulations disagree beyond 1e-9.
    """
    _check_pair(mu, nu, space)
    n = space.n
    if n > ORACLE_LIMIT:
        raise TooLarge(f"subset enumeration limited to {ORACLE_LIMIT} points")
    d = space.dist
    dvals = np.unique(d)
    size = 1 << n

    def subset_masses(w: np.ndarray) -> np.ndarray:
        m = np.zeros(size)
        for i in range(n):
            step = 1 << i
            r = m.reshape(-1, 2 * step)
            r[:, step:] = r[:, :step] + w[i]
        return m

    m1 = subset_masses(mu.weights)
    m2 = subset_masses(nu.weights)

    def value(ma: np.ndarray, mb: np.ndarray) -> float:
        best = np.inf
        for k in range(len(dvals)):
            nbr = [int(np.sum(1 << np.nonzero(d[i] <= dvals[k])[0])) for i in range(n)]
            reach = np.zeros(size, dtype=np.int64)
            for i in range(n):
                step = 1 << i
                r = reach.reshape(-1, 2 * step)
                r[:, step:] = r[:, :step] | nbr[i]
            worst = float(np.max(ma - mb[reach]))
            best = min(best, max(float(dvals[k]), worst))
        return best

    forward = value(m1, m2)
    backward = value(m2, m1)
    if abs(forward - backward) > 1e-9:
        raise InvariantViolation(
            f"swapped-role Prokhorov formulations disagree: {forward} vs {backward}"
        )
    return forward


# Ky Fan ---------------------------------------------------------------------


def ky_fan_distance(f, g, mu: Measure) -> float:
    """inf { eps > 0 : mu(|f - g| > eps) <= eps }, exact by scanning the
    tail masses of the sorted gaps."""
    n = mu.n
    vf = check_function(f, n)
    vg = check_function(g, n)
    diff = np.abs(vf - vg)
    order = np.argsort(diff, kind="stable")
    dv = diff[order]
    w = mu.weights[order]
    suffix = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])
    uniq, starts = np.unique(dv, return_index=True)
    nexts = np.append(starts[1:], n)
    best = np.inf
    if uniq[0] > 0.0:
        best = min(best, max(0.0, float(suffix[0])))
    for m in range(len(uniq)):
        tail = float(suffix[nexts[m]])  # mass strictly above uniq[m]
        best = min(best, max(float(uniq[m]), tail))
    return float(best)


# family gap -----------------------------------------------------------------


def lip11_family_gap(
    mu: Measure, nu: Measure, family, space: FiniteMetricSpace
) -> float:
    """max over the family of |int f dmu - int f dnu|; every member must be
    1-Lipschitz with sup norm at most 1."""
    _check_pair(mu, nu, space)
    c = mu.weights - nu.weights
    best = 0.0
    for t, f in enumerate(family):
        v = check_function(f, space.n)
        if np.max(np.abs(v)) > 1.0 + LP_TOL or lip_constant(v, space) > 1.0 + LP_TOL:
            raise BadFamily(f"member {t} is not a bounded 1-Lipschitz function")
        best = max(best, abs(float(np.dot(c, v))))
    return best
