"""Partial and observable diameters, medians, and concentration reports.

The observable diameter of an mm-space at deficiency alpha is the largest
partial diameter any 1-Lipschitz function can give to the pushforward of
the measure onto the line.  Candidate families give certified lower bounds;
for small effective spaces an exact optimizer is available that enumerates
value orderings and solves one small linear program per ordering.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .core import MASS_TOL, FiniteMetricSpace, Measure, MmSpace, PointMap, pushforward
from .distances import prokhorov_distance
from .errors import (
    DimensionMismatch,
    Infeasible,
    InvariantViolation,
    MapMismatch,
    NotDominated,
    SolverFailure,
    TooLarge,
)
from .lipschitz import check_function, lip1_candidates, mcshane_nearest

ORACLE_CAP = 5
SEARCH_LIMIT = 96
_SEARCH_STEPS = (0.5, 0.25, 0.1, 0.05, 0.02, 0.01)

# ordering LPs keyed by permuted distances and window layout; many orderings
# of a symmetric space collapse to one key
_LP_MEMO: dict = {}
_LP_MEMO_MAX = 200_000


@dataclass(frozen=True)
class AtomicRealMeasure:
    """A finitely supported measure on the real line, atoms sorted."""

    values: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_samples(cls, values, weights) -> "AtomicRealMeasure":
        v = np.asarray(values, dtype=float).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        if v.shape != w.shape:
            raise DimensionMismatch("values and weights must have equal length")
        keep = w > 0
        v, w = v[keep], w[keep]
        order = np.argsort(v, kind="stable")
        v, w = v[order], w[order]
        # merge exactly equal atoms
        if v.size:
            new = np.empty(v.size, dtype=bool)
            new[0] = True
            new[1:] = v[1:] != v[:-1]
            idx = np.cumsum(new) - 1
            mv = v[new]
            mw = np.zeros(mv.size)
            np.add.at(mw, idx, w)
            v, w = mv, mw
        obj = cls.__new__(cls)
        object.__setattr__(obj, "values", v)
        object.__setattr__(obj, "weights", w)
        obj.values.setflags(write=False)
        obj.weights.setflags(write=False)
        return obj

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def pushforward_on_line(f, mu: Measure) -> AtomicRealMeasure:
    f = check_function(f, mu.weights.size)
    return AtomicRealMeasure.from_samples(f, mu.weights)


def partial_diameter(nu: AtomicRealMeasure, kappa: float) -> float:
    """Smallest width of an interval carrying mass at least kappa."""
    if kappa > nu.total + 1e-9:
        raise Infeasible(f"kappa {kappa} exceeds the total mass {nu.total}")
    if kappa <= 0:
        return 0.0
    v, w = nu.values, nu.weights
    need = kappa - MASS_TOL
    best = np.inf
    acc = 0.0
    b = 0
    for a in range(v.size):
        while b < v.size and acc < need:
            acc += w[b]
            b += 1
        if acc < need:
            break
        best = min(best, v[b - 1] - v[a])
        acc -= w[a]
    if not np.isfinite(best):
        raise Infeasible(f"no interval carries mass {kappa}")
    return float(max(best, 0.0))


# exact optimizer ------------------------------------------------------------


def _zero_classes(dist: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Group points at exactly zero distance; returns (reps, labels)."""
    n = dist.shape[0]
    labels = np.full(n, -1, dtype=np.intp)
    reps: list[int] = []
    for i in range(n):
        if labels[i] >= 0:
            continue
        cls = [i]
        for j in range(i + 1, n):
            if labels[j] < 0 and np.all(dist[j, cls] == 0.0):
                cls.append(j)
        for j in cls:
            labels[j] = len(reps)
        reps.append(i)
    return reps, labels


def _minimal_windows(wp: np.ndarray, kappa: float) -> tuple[tuple[int, int], ...]:
    m = wp.size
    need = kappa - MASS_TOL
    wins = []
    acc = 0.0
    b = 0
    for a in range(m):
        while b < m and acc < need:
            acc += wp[b]
            b += 1
        if acc < need:
            break
        wins.append((a, b - 1))
        acc -= wp[a]
    out = []
    for k, (a, bb) in enumerate(wins):
        if k + 1 < len(wins) and wins[k + 1][1] == bb:
            continue
        out.append((a, bb))
    return tuple(out)


def _ordering_lp(dp: np.ndarray, wins, diam: float) -> tuple[float, np.ndarray]:
    m = dp.shape[0]
    nv = m + 1
    rows = []
    rhs = []
    for a in range(m - 1):
        r = np.zeros(nv)
        r[a], r[a + 1] = 1.0, -1.0
        rows.append(r)
        rhs.append(0.0)
    for a in range(m):
        for b in range(a + 1, m):
            r = np.zeros(nv)
            r[b], r[a] = 1.0, -1.0
            rows.append(r)
            rhs.append(dp[a, b])
    for a, b in wins:
        r = np.zeros(nv)
        r[m], r[a], r[b] = 1.0, 1.0, -1.0
        rows.append(r)
        rhs.append(0.0)
    c = np.zeros(nv)
    c[m] = -1.0
    bounds = [(0.0, 0.0)] + [(0.0, diam)] * (m - 1) + [(0.0, diam)]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    if res.status != 0:
        raise SolverFailure(f"ordering program failed with status {res.status}")
    return float(res.x[m]), res.x[:m].copy()


def _enumerate_orderings(dq: np.ndarray, cw: np.ndarray, kappa: float):
    m = cw.size
    diam = float(dq.max())
    dq_r = np.round(dq, 12)
    best = -1.0
    best_perm = None
    best_v = None
    for perm in itertools.permutations(range(m)):
        if perm > perm[::-1]:
            continue
        wp = cw[list(perm)]
        wins = _minimal_windows(wp, kappa)
        if not wins:
            continue
        idx = np.ix_(perm, perm)
        key = (dq_r[idx][np.triu_indices(m, 1)].tobytes(), wins)
        hit = _LP_MEMO.get(key)
        if hit is None:
            hit = _ordering_lp(dq[idx], wins, diam)
            if len(_LP_MEMO) >= _LP_MEMO_MAX:
                _LP_MEMO.clear()
            _LP_MEMO[key] = hit
        val, v = hit
        if val > best + 1e-15:
            best, best_perm, best_v = val, perm, v
    fq = np.empty(m)
    fq[list(best_perm)] = best_v
    return max(best, 0.0), fq


def lipschitz_partdiam_optimum(
    space: FiniteMetricSpace, mu: Measure, kappa: float, cap: int = ORACLE_CAP
) -> tuple[float, np.ndarray]:
    """Exact sup over 1-Lipschitz f of the kappa partial diameter of f's
    pushforward, with an achieving witness.

    Zero-mass points are dropped and zero-distance points merged first; the
    size cap applies to what remains.  Raises TooLarge beyond the cap.
    """
    if mu.weights.size != space.n:
        raise DimensionMismatch("measure and space sizes differ")
    if kappa > 1.0 + 1e-9:
        raise Infeasible(f"kappa {kappa} exceeds the total mass")
    d = space.dist
    w = mu.weights
    sup = np.nonzero(w > 0)[0]
    ds = d[np.ix_(sup, sup)]
    reps, labels = _zero_classes(ds)
    cw = np.zeros(len(reps))
    np.add.at(cw, labels, w[sup])
    dq = ds[np.ix_(reps, reps)]
    m = len(reps)
    if m == 1 or kappa <= cw.max() + MASS_TOL:
        value, fq = 0.0, np.zeros(m)
    elif kappa > 1.0 - cw.min() + MASS_TOL:
        # every admissible interval carries all atoms, so the optimum is the
        # support diameter, achieved by a distance function
        i, j = np.unravel_index(int(np.argmax(dq)), dq.shape)
        value, fq = float(dq[i, j]), dq[i].copy()
    else:
        if m > cap:
            raise TooLarge(f"{m} effective points exceed the exact-solver cap {cap}")
        value, fq = _enumerate_orderings(dq, cw, kappa)
    f_sup = fq[labels]
    if sup.size == space.n:
        f = f_sup
    else:
        f = np.min(f_sup[None, :] + d[:, sup], axis=1)
    return value, f


# lower bounds and reports ----------------------------------------------------


@dataclass(frozen=True)
class ObsDiamReport:
    alpha: float
    lower_bound: float
    oracle_value: float | None
    eta: float
    witness: np.ndarray
    witness_id: str
    method: str
    n_points: int
    runtime_ms: float


def _support_diameter(space: FiniteMetricSpace, mu: Measure) -> float:
    sup = np.nonzero(mu.weights > 0)[0]
    if sup.size < 2:
        return 0.0
    return float(space.dist[np.ix_(sup, sup)].max())


def _climb(space, mu, kappa, f0, v0, rng, rounds=25):
    """First-improvement coordinate ascent over Lipschitz-projected moves."""
    diam = space.diameter
    if diam <= 0:
        return v0, f0
    steps = [diam * s for s in _SEARCH_STEPS]
    f, best = f0.copy(), v0
    for _ in range(rounds):
        improved = False
        for i in rng.permutation(space.n):
            for s in steps:
                for sgn in (1.0, -1.0):
                    g = f.copy()
                    g[i] += sgn * s
                    g = mcshane_nearest(g, space, 1.0)
                    val = partial_diameter(pushforward_on_line(g, mu), kappa)
                    if val > best + 1e-12:
                        f, best = g, val
                        improved = True
                        break
                else:
                    continue
                break
        if not improved:
            break
    return best, f


def observable_diameter(
    mm: MmSpace,
    alpha: float,
    *,
    budget: int | None = None,
    seed: int = 0,
    oracle: bool = False,
    oracle_cap: int = ORACLE_CAP,
    search_limit: int = SEARCH_LIMIT,
) -> ObsDiamReport:
    """Best certified lower bound (and optionally the exact value) of the
    observable diameter at deficiency alpha."""
    t0 = time.perf_counter()
    space, mu = mm.space, mm.measure
    kappa = 1.0 - alpha
    if kappa > 1.0 + 1e-9:
        raise Infeasible("alpha must be nonnegative")
    cands = lip1_candidates(space, budget if budget is not None else space.n + 12, seed)
    best = -1.0
    best_f = None
    best_id = ""
    for c in cands:
        val = partial_diameter(pushforward_on_line(c.values, mu), kappa)
        if val > best + 1e-15:
            best, best_f, best_id = val, c.values, c.name
    method = "candidates"
    if not oracle and space.n <= search_limit:
        rng = np.random.default_rng(seed + 1)
        climbed, f2 = _climb(space, mu, kappa, np.asarray(best_f, float), best, rng)
        if climbed > best + 1e-12:
            best, best_f = climbed, f2
            best_id = "search:" + best_id
            method = "local_search"
    oracle_value = None
    if oracle:
        oracle_value, f_star = lipschitz_partdiam_optimum(space, mu, kappa, oracle_cap)
        if best > oracle_value + 1e-7:
            raise InvariantViolation(
                f"lower bound {best} exceeds the exact optimum {oracle_value}"
            )
        best, best_f, best_id, method = oracle_value, f_star, "oracle", "oracle"
        eta = 0.0
    else:
        eta = max(0.0, _support_diameter(space, mu) - best)
    witness = np.asarray(best_f, dtype=float).copy()
    witness.setflags(write=False)
    return ObsDiamReport(
        alpha=float(alpha),
        lower_bound=float(max(best, 0.0)),
        oracle_value=oracle_value,
        eta=float(eta),
        witness=witness,
        witness_id=best_id,
        method=method,
        n_points=space.n,
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
    )


def median(f, mu: Measure) -> float:
    """Smallest attained value with both half-mass conditions."""
    f = check_function(f, mu.weights.size)
    nu = pushforward_on_line(f, mu)
    cdf = np.cumsum(nu.weights)
    tail = np.cumsum(nu.weights[::-1])[::-1]
    for k in range(nu.values.size):
        if cdf[k] >= 0.5 - MASS_TOL and tail[k] >= 0.5 - MASS_TOL:
            return float(nu.values[k])
    raise InvariantViolation("no median found; measure may be degenerate")


def median_deviation_profile(
    mm: MmSpace, eps_values, *, budget: int | None = None, seed: int = 0
) -> np.ndarray:
    """For each eps, the largest mass any candidate puts farther than eps
    from its own median."""
    space, mu = mm.space, mm.measure
    cands = lip1_candidates(space, budget if budget is not None else space.n + 12, seed)
    eps_values = np.asarray(eps_values, dtype=float).ravel()
    out = np.zeros(eps_values.size)
    for c in cands:
        dev = np.abs(c.values - median(c.values, mu))
        for k, eps in enumerate(eps_values):
            mass = float(mu.weights[dev > eps + MASS_TOL].sum())
            if mass > out[k]:
                out[k] = mass
    return out


@dataclass(frozen=True)
class LevyRow:
    index: int
    n_points: int
    alpha: float
    lower_bound: float
    oracle_value: float | None
    eta: float
    witness_id: str
    runtime_ms: float


@dataclass(frozen=True)
class LevyScanReport:
    rows: tuple
    alphas: tuple
    scales: tuple
    exponents: dict


def levy_scan(
    mms: Sequence[MmSpace],
    alphas: Sequence[float],
    *,
    scales: Sequence[float] | None = None,
    budget: int | None = None,
    seed: int = 0,
    oracle: bool = False,
    oracle_cap: int = ORACLE_CAP,
    search_limit: int = SEARCH_LIMIT,
    threads: int = 1,
) -> LevyScanReport:
    """Observable-diameter table over a family of spaces, with per-alpha
    decay exponents from a log-log least-squares fit against the scales
    (positions 1..N when no scales are given)."""
    mms = list(mms)
    if scales is None:
        scale_arr = np.arange(1, len(mms) + 1, dtype=float)
    else:
        scale_arr = np.asarray(scales, dtype=float).ravel()
        if scale_arr.size != len(mms):
            raise DimensionMismatch("scales must match the number of spaces")
        if np.any(scale_arr <= 0):
            raise ValueError("scales must be positive")

    def one(task):
        idx, alpha = task
        rep = observable_diameter(
            mms[idx],
            alpha,
            budget=budget,
            seed=seed,
            oracle=oracle,
            oracle_cap=oracle_cap,
            search_limit=search_limit,
        )
        return LevyRow(
            index=idx,
            n_points=mms[idx].space.n,
            alpha=float(alpha),
            lower_bound=rep.lower_bound,
            oracle_value=rep.oracle_value,
            eta=rep.eta,
            witness_id=rep.witness_id,
            runtime_ms=rep.runtime_ms,
        )

    tasks = [(idx, alpha) for idx in range(len(mms)) for alpha in alphas]
    # executor map preserves task order, so rows come out identical either way
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            rows = list(pool.map(one, tasks))
    else:
        rows = [one(t) for t in tasks]
    exponents = {}
    for alpha in alphas:
        xs, ys = [], []
        for row in rows:
            if row.alpha != alpha:
                continue
            val = row.oracle_value if row.oracle_value is not None else row.lower_bound
            if val > 1e-300:
                xs.append(np.log(scale_arr[row.index]))
                ys.append(np.log(val))
        if len(xs) >= 2 and max(xs) > min(xs):
            exponents[float(alpha)] = float(np.polyfit(xs, ys, 1)[0])
        else:
            exponents[float(alpha)] = float("nan")
    return LevyScanReport(
        rows=tuple(rows),
        alphas=tuple(float(a) for a in alphas),
        scales=tuple(scale_arr.tolist()),
        exponents=exponents,
    )


def assert_metric_dominated(
    small: FiniteMetricSpace, large: FiniteMetricSpace, tol: float = 1e-12
) -> None:
    """Entrywise d_small <= d_large, or NotDominated."""
    if small.n != large.n:
        raise DimensionMismatch("spaces must have equal size")
    gap = float((small.dist - large.dist).max())
    if gap > tol:
        raise NotDominated(f"domination fails by {gap}")


# stagewise comparison against a target space ---------------------------------


def _fiber_threshold(h: np.ndarray, mu: Measure, fiber_of: np.ndarray) -> float:
    """Smallest eps such that fiberwise-constant functions can match h up to
    eps outside mass at most eps.  Valid lower bound for the deviation of h
    from anything factoring through the map."""
    sup = np.nonzero(mu.weights > 0)[0]
    fibers: dict[int, list[int]] = {}
    for i in sup:
        fibers.setdefault(int(fiber_of[i]), []).append(int(i))
    packed = []
    eps_cands = {0.0}
    for members in fibers.values():
        hv = h[members]
        hw = mu.weights[members]
        order = np.argsort(hv)
        hv, hw = hv[order], hw[order]
        packed.append((hv, hw, float(hw.sum())))
        for a in range(hv.size):
            for b in range(a + 1, hv.size):
                eps_cands.add((hv[b] - hv[a]) / 2.0)

    def excess(eps: float) -> float:
        tot = 0.0
        for hv, hw, mass in packed:
            bestcov = 0.0
            b = 0
            acc = 0.0
            for a in range(hv.size):
                if b < a:
                    b, acc = a, 0.0
                while b < hv.size and hv[b] <= hv[a] + 2.0 * eps + 1e-12:
                    acc += hw[b]
                    b += 1
                bestcov = max(bestcov, acc)
                acc -= hw[a]
            tot += mass - bestcov
        return tot

    grid = sorted(eps_cands)
    cands = set(grid)
    for b in grid:
        cands.add(excess(b))
    return min(e for e in sorted(cands) if excess(e) <= e + 1e-12)


@dataclass(frozen=True)
class ConcentrationRow:
    index: int
    n_points: int
    prokhorov: float
    forward_upper: float
    reverse_lower: float
    runtime_ms: float


@dataclass(frozen=True)
class ConcentrationReport:
    rows: tuple


def concentration_report(
    target: MmSpace,
    stages: Sequence[MmSpace],
    maps: Sequence[PointMap],
    *,
    budget: int | None = None,
    seed: int = 0,
) -> ConcentrationReport:
    """Per-stage comparison against a target space along the given maps.

    prokhorov: distance between the pushforward measure and the target one.
    forward_upper: upper bound on how far the pulled-back unit-Lipschitz
    functions of the target sit from the stage's own, in sup norm over the
    support.  reverse_lower: certified lower bound on how far the worst
    stage candidate sits from anything factoring through the map.
    """
    stages = list(stages)
    maps = list(maps)
    if len(stages) != len(maps):
        raise MapMismatch("one map per stage is required")
    rows = []
    for idx, (mm, p) in enumerate(zip(stages, maps)):
        if p.source_size != mm.space.n or p.target_size != target.space.n:
            raise MapMismatch(
                f"map {idx} has shape {p.source_size}->{p.target_size}, "
                f"expected {mm.space.n}->{target.space.n}"
            )
        t0 = time.perf_counter()
        push = pushforward(mm.measure, p)
        dp = prokhorov_distance(push, target.measure, target.space)
        sup = np.nonzero(mm.measure.weights > 0)[0]
        img = p.image[sup]
        viol = target.space.dist[np.ix_(img, img)] - mm.space.dist[np.ix_(sup, sup)]
        forward = 0.5 * float(max(viol.max(), 0.0))
        cands = lip1_candidates(
            mm.space, budget if budget is not None else mm.space.n + 8, seed
        )
        reverse = 0.0
        for c in cands:
            reverse = max(reverse, float(_fiber_threshold(c.values, mm.measure, p.image)))
        rows.append(
            ConcentrationRow(
                index=idx,
                n_points=mm.space.n,
                prokhorov=dp,
                forward_upper=forward,
                reverse_lower=reverse,
                runtime_ms=(time.perf_counter() - t0) * 1000.0,
            )
        )
    return ConcentrationReport(rows=tuple(rows))
