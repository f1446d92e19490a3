"""Group flows on finite metric spaces and orbit diagnostics.

A flow is a group action on the points of a metric space.  Pulling the
metric back along the orbit of a point gives a pseudo-metric on the group;
the entrywise maximum over points gives a right-invariant one.  The orbit
bound report compares the measure-averaged largest displacement against the
worst observable diameter of those pullbacks over a deficiency grid.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .concentration import observable_diameter
from .core import FiniteMetricSpace, Measure, MmSpace
from .errors import (
    BadElement,
    BadPoint,
    DimensionMismatch,
    EmptyElementSet,
    InvalidFlow,
    InvariantViolation,
    TooLarge,
)
from .groups import FiniteGroup

FULL_COMPAT_LIMIT = 5_000_000
_SAMPLES = 20000
ALPHA_GRID = (0.5, 0.2, 0.1, 0.05, 0.02)
FLOW_ORACLE_CAP = 8


class FlowInstance:
    """An action table act[g, x] of a finite group on a metric space."""

    __slots__ = ("group", "space", "action")

    def __init__(self, group: FiniteGroup, space: FiniteMetricSpace, action, *, validate=True, seed=0):
        action = np.array(action, dtype=np.intp)
        if action.shape != (group.n, space.n):
            raise InvalidFlow(
                f"action table must be {group.n}x{space.n}, got {action.shape}"
            )
        if action.size and (action.min() < 0 or action.max() >= space.n):
            raise InvalidFlow("action entries out of range")
        if validate:
            nX = space.n
            if not np.array_equal(action[group.identity], np.arange(nX)):
                raise InvalidFlow("identity must act trivially")
            if not np.array_equal(
                np.sort(action, axis=1), np.tile(np.arange(nX), (group.n, 1))
            ):
                raise InvalidFlow("each element must act bijectively")
            if group.n * group.n * nX <= FULL_COMPAT_LIMIT:
                lhs = action[group.mul]  # lhs[a, b, x] = action[mul[a, b], x]
                rhs = action[:, action]  # rhs[a, b, x] = action[a, action[b, x]]
                if not np.array_equal(lhs, rhs):
                    raise InvalidFlow("action is incompatible with the product")
            else:
                rng = np.random.default_rng(seed)
                a = rng.integers(0, group.n, _SAMPLES)
                b = rng.integers(0, group.n, _SAMPLES)
                x = rng.integers(0, nX, _SAMPLES)
                if not np.array_equal(
                    action[group.mul[a, b], x], action[a, action[b, x]]
                ):
                    raise InvalidFlow("action incompatible on sampled triples")
        action.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "action", action)

    def __setattr__(self, name, value):
        raise AttributeError("FlowInstance is immutable")

    @property
    def order(self) -> int:
        return self.group.n

    @property
    def n_points(self) -> int:
        return self.space.n

    def __repr__(self):
        return f"FlowInstance(order={self.order}, points={self.n_points})"


def point_orbit_metric(flow: FlowInstance, x: int) -> FiniteMetricSpace:
    """Pseudo-metric on the group pulled back along the orbit of x."""
    if not 0 <= int(x) < flow.n_points:
        raise BadPoint(f"point {x} outside the space")
    orbit = flow.action[:, int(x)]
    d = flow.space.dist[np.ix_(orbit, orbit)]
    # triangle and symmetry are inherited from the space, skip revalidation
    return FiniteMetricSpace(flow.group.labels, d, is_pseudo=True, validate=False)


def flow_orbit_metric(flow: FlowInstance) -> FiniteMetricSpace:
    """Entrywise maximum of the point pullbacks; right-invariant."""
    n = flow.order
    out = np.zeros((n, n))
    dist = flow.space.dist
    for x in range(flow.n_points):
        orbit = flow.action[:, x]
        np.maximum(out, dist[np.ix_(orbit, orbit)], out=out)
    return FiniteMetricSpace(flow.group.labels, out, is_pseudo=True, validate=False)


def _element_array(flow: FlowInstance, elements) -> np.ndarray:
    if elements is None:
        return np.arange(flow.order, dtype=np.intp)
    idx = np.array(sorted({int(g) for g in elements}), dtype=np.intp)
    if idx.size == 0:
        raise EmptyElementSet("element set must be nonempty")
    if idx.min() < 0 or idx.max() >= flow.order:
        raise BadElement("element outside the group")
    return idx


def _displacements(flow: FlowInstance, elements) -> np.ndarray:
    E = _element_array(flow, elements)
    cols = np.arange(flow.n_points)
    moved = flow.action[E]  # (k, nX)
    return flow.space.dist[cols[None, :], moved].max(axis=0)


def average_orbit_displacement(flow: FlowInstance, nu: Measure, elements=None) -> float:
    """nu-average over points of the largest displacement by the element set."""
    if nu.weights.size != flow.n_points:
        raise DimensionMismatch("measure must live on the flow's space")
    return float(np.dot(_displacements(flow, elements), nu.weights))


def min_displacement_point(flow: FlowInstance, elements=None) -> tuple[int, float]:
    """Point minimizing the largest displacement, with that value."""
    disp = _displacements(flow, elements)
    x0 = int(np.argmin(disp))
    return x0, float(disp[x0])


def haar_average(flow: FlowInstance, nu0: Measure) -> Measure:
    """Average of the pushforwards of nu0 over the whole group; invariant."""
    if nu0.weights.size != flow.n_points:
        raise DimensionMismatch("measure must live on the flow's space")
    acc = np.zeros(flow.n_points)
    for g in range(flow.order):
        np.add.at(acc, flow.action[g], nu0.weights)
    acc /= flow.order
    for g in range(flow.order):
        moved = np.zeros(flow.n_points)
        np.add.at(moved, flow.action[g], acc)
        if float(np.abs(moved - acc).max()) > 1e-12:
            raise InvariantViolation("averaged measure is not invariant")
    return Measure(acc)


@dataclass(frozen=True)
class OrbitBoundReport:
    lhs: float
    rhs: float
    alpha_star: float
    certified: bool
    holds: bool | None
    x0: int
    x0_value: float
    alpha_values: dict
    runtime_ms: float


def orbit_bound_report(
    flow: FlowInstance,
    *,
    measures=None,
    nu: Measure | None = None,
    elements=None,
    alphas=ALPHA_GRID,
    budget: int | None = None,
    seed: int = 0,
    oracle_cap: int = FLOW_ORACLE_CAP,
) -> OrbitBoundReport:
    """Check the displacement bound for a flow.

    lhs: nu-average over points of the largest displacement by the element
    set.  rhs: max over the deficiency grid of the min over the tail (last
    half) of the given group measures of the max over points of the
    observable diameter of the orbit pullback.  Values are exact where the
    effective pullback fits under the cap, certified lower bounds otherwise;
    a lower-bounded rhs can still soundly confirm the inequality, so holds
    is None only when it fails without certification.
    """
    t0 = time.perf_counter()
    order = flow.order
    if measures is None:
        measures = [Measure.uniform(order)]
    measures = list(measures)
    for m in measures:
        if m.weights.size != order:
            raise DimensionMismatch("group measures must live on the group")
    if nu is None:
        nu = Measure.uniform(flow.n_points)
    lhs = average_orbit_displacement(flow, nu, elements)
    mats: dict[bytes, FiniteMetricSpace] = {}
    for x in range(flow.n_points):
        m = point_orbit_metric(flow, x)
        mats.setdefault(m.dist.tobytes(), m)
    tail = measures[len(measures) // 2 :]
    certified = True
    alpha_values: dict[float, float] = {}
    for alpha in alphas:
        per_i = []
        for mu_i in tail:
            worst = 0.0
            for m in mats.values():
                mm = MmSpace(m, mu_i)
                try:
                    rep = observable_diameter(
                        mm, alpha, budget=budget, seed=seed, oracle=True, oracle_cap=oracle_cap
                    )
                    worst = max(worst, rep.oracle_value)
                except TooLarge:
                    rep = observable_diameter(mm, alpha, budget=budget, seed=seed)
                    worst = max(worst, rep.lower_bound)
                    certified = False
            per_i.append(worst)
        alpha_values[float(alpha)] = min(per_i)
    alpha_star, rhs = max(alpha_values.items(), key=lambda kv: (kv[1], -kv[0]))
    if lhs <= rhs + 1e-7:
        holds: bool | None = True
    else:
        holds = False if certified else None
    x0, x0_value = min_displacement_point(flow, elements)
    return OrbitBoundReport(
        lhs=lhs,
        rhs=float(rhs),
        alpha_star=float(alpha_star),
        certified=certified,
        holds=holds,
        x0=x0,
        x0_value=x0_value,
        alpha_values=alpha_values,
        runtime_ms=(time.perf_counter() - t0) * 1000.0,
    )
