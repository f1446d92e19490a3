"""End-to-end acceptance checks, one test per criterion.

Run `pytest tests/test_acceptance.py -v` to get a pass/fail line per
criterion.  The strict-monotonicity half of the levy-column check fails
by design on this corpus: the first two column entries are exactly
equal (both spaces are too small for any mass to concentrate), so the
column is non-increasing but not strictly decreasing.  The decay-rate
half passes.  See README for the analysis.
"""

import json
import time

import numpy as np
import pytest

from conftest import random_measure, random_space
from mmconc import scenarios, serialize
from mmconc.concentration import (
    assert_metric_dominated,
    levy_scan,
    observable_diameter,
)
from mmconc.core import FiniteMetricSpace, Measure, MmSpace, pushforward
from mmconc.distances import (
    lip11_family_gap,
    mass_transport_distance,
    prokhorov_distance,
    prokhorov_distance_exhaustive,
)
from mmconc.dynamics import (
    flow_orbit_metric,
    min_displacement_point,
    orbit_bound_report,
    point_orbit_metric,
)
from mmconc.generators import (
    coset_flow,
    cyclic_geodesic_metric,
    hypercube_space,
    regular_flow,
    sym_hamming_metric,
    union_flow,
)
from mmconc.groups import invariance_defect, translation
from mmconc.lipschitz import (
    lip1_candidates,
    lip_constant,
    uniform_lipschitz_approximation,
)


# shared expensive computations ------------------------------------------------


@pytest.fixture(scope="module")
def hypercube_levy():
    dims = list(range(2, 11))
    mms = [MmSpace(hypercube_space(k), Measure.uniform(2**k)) for k in dims]
    t0 = time.perf_counter()
    report = levy_scan(mms, alphas=(0.1,), scales=[float(k) for k in dims], seed=0)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="module")
def flow_suite_reports():
    out = []
    for name, flow, nu in scenarios._flow_suite_units(0):
        out.append((name, flow, orbit_bound_report(flow, nu=nu, seed=0)))
    return out


@pytest.fixture(scope="module")
def scenario_double_runs(tmp_path_factory):
    runs = {}
    for name in scenarios.scenario_names():
        dirs = []
        for tag in ("a", "b"):
            out = tmp_path_factory.mktemp(f"{name}-{tag}")
            scenarios.run_scenario(name, out, seed=7)
            dirs.append(out)
        runs[name] = tuple(dirs)
    return runs


# criteria ---------------------------------------------------------------------


def test_criterion_01_distance_axioms():
    # 200 random spaces (n <= 12): identity, symmetry, triangle for both
    # distances, within 1e-7, in under 10 seconds.
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    for trial in range(200):
        n = int(rng.integers(2, 13))
        space = random_space(rng, n, scale=float(rng.uniform(0.5, 3.0)))
        mu, nu, rho = (random_measure(rng, n) for _ in range(3))
        for fn in (mass_transport_distance, prokhorov_distance):
            assert fn(mu, mu, space) <= 1e-7
            d12, d21 = fn(mu, nu, space), fn(nu, mu, space)
            assert abs(d12 - d21) <= 1e-7
            d13, d23 = fn(mu, rho, space), fn(nu, rho, space)
            assert d13 <= d12 + d23 + 1e-7
    assert time.perf_counter() - t0 < 10.0


def test_criterion_02_prokhorov_equals_exhaustive_reference():
    # 100 random spaces (n <= 10): the flow-based value agrees with the
    # subset-enumeration reference in both argument orders, within 1e-9,
    # in under 30 seconds.
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    for trial in range(100):
        n = int(rng.integers(2, 11))
        space = random_space(rng, n, scale=float(rng.uniform(0.5, 3.0)))
        mu = random_measure(rng, n, sparse=trial % 3 == 0)
        nu = random_measure(rng, n, sparse=trial % 4 == 0)
        fast = prokhorov_distance(mu, nu, space)
        exact = prokhorov_distance_exhaustive(mu, nu, space)
        assert abs(fast - exact) <= 1e-9
        assert abs(prokhorov_distance(nu, mu, space) - exact) <= 1e-9
    assert time.perf_counter() - t0 < 30.0


def test_criterion_03_defect_dominates_family_gap():
    # 100 (group, measure, element) triples: the transport defect is at
    # least the best gap over the bounded 1-Lipschitz candidate family,
    # with equality on two-point groups.
    pool = [cyclic_geodesic_metric(n, normalized=True) for n in range(2, 9)]
    pool += [sym_hamming_metric(n) for n in (2, 3, 4)]
    rng = np.random.default_rng(303)
    two_point_trials = 0
    for trial in range(100):
        metric = pool[0] if trial < 5 else pool[int(rng.integers(len(pool)))]
        mu = random_measure(rng, metric.n)
        g = int(rng.integers(metric.n))
        defect = invariance_defect(metric.group, metric.space, mu, g)
        push = pushforward(mu, translation(metric.group, g))
        family = [c.values for c in lip1_candidates(metric.space, metric.n + 8, seed=trial)]
        gap = lip11_family_gap(mu, push, family, metric.space)
        assert defect >= gap - 1e-9
        if metric.n == 2:
            two_point_trials += 1
            assert abs(defect - gap) <= 1e-9
    assert two_point_trials >= 5


def test_criterion_04_lipschitz_approximation_guarantee():
    # 100 random equicontinuous families: the smoothing never raises, and
    # every approximant is ell-Lipschitz, ell-bounded, and within eps.
    rng = np.random.default_rng(404)
    for trial in range(100):
        n = int(rng.integers(3, 11))
        space = random_space(rng, n, scale=float(rng.uniform(0.5, 2.0)))
        rate = float(rng.uniform(0.5, 8.0))
        size = int(rng.integers(1, 7))
        family = [rate * c.values for c in lip1_candidates(space, n, seed=trial)[:size]]
        eps = float(rng.uniform(0.1, 1.0))
        result = uniform_lipschitz_approximation(family, space, eps, eps / rate)
        assert len(result.approximants) == len(family)
        for f, g in zip(family, result.approximants):
            assert lip_constant(g, space) <= result.ell + 1e-9
            assert np.max(np.abs(g)) <= result.ell + 1e-9
            assert np.max(np.abs(g - f)) <= eps + 1e-9


def test_criterion_05_search_matches_small_space_optimum():
    # 50 random spaces (n <= 4): the candidate/search lower bound lands
    # within diameter/64 + 1e-7 of the exact optimizer at three alphas,
    # and two-point spaces come out exactly.
    rng = np.random.default_rng(505)
    for trial in range(50):
        n = int(rng.integers(2, 5))
        space = random_space(rng, n, scale=float(rng.uniform(0.5, 3.0)))
        mu = random_measure(rng, n, sparse=bool(rng.integers(0, 2)))
        mm = MmSpace(space, mu)
        for alpha in (0.1, 0.3, 0.5):
            rep = observable_diameter(mm, alpha, seed=trial)
            exact = observable_diameter(mm, alpha, oracle=True).oracle_value
            assert rep.lower_bound <= exact + 1e-7
            assert rep.lower_bound >= exact - space.diameter / 64 - 1e-7

    two = MmSpace(
        FiniteMetricSpace(["a", "b"], [[0.0, 1.4], [1.4, 0.0]]), Measure.uniform(2)
    )
    for alpha in (0.1, 0.3):
        assert abs(observable_diameter(two, alpha).lower_bound - 1.4) <= 1e-9
    assert observable_diameter(two, 0.5).lower_bound == 0.0


def test_criterion_06_levy_column_strictly_decreases(hypercube_levy):
    # Strict decrease of the alpha=0.1 column across dimensions 2..10.
    # This fails honestly: dimensions 2 and 3 both give exactly 1.0.
    report, _ = hypercube_levy
    col = [r.lower_bound for r in report.rows if r.alpha == 0.1]
    assert len(col) == 9
    for a, b in zip(col, col[1:]):
        assert b < a, f"column not strictly decreasing: {col}"


def test_criterion_06_levy_decay_exponent(hypercube_levy):
    # The log-log slope of the same column against dimension is at most
    # -0.4, and the scan finishes in under two minutes.
    report, elapsed = hypercube_levy
    assert report.exponents[0.1] <= -0.4
    assert elapsed < 120.0


def test_criterion_07_flow_suite_bound_holds(flow_suite_reports):
    # Every certified suite row satisfies lhs <= rhs + 1e-7; the
    # three-element rotation case is tight at exactly 1; the order-24
    # permutation case exceeds the exact-optimizer cap yet is still
    # confirmed through the sound lower-bound route.
    by_name = {name: rep for name, _, rep in flow_suite_reports}
    assert len(by_name) == 10
    for name, rep in by_name.items():
        if rep.certified:
            assert rep.holds is True, name
        assert rep.lhs <= rep.rhs + 1e-7, name
    z3 = by_name["z3-regular"]
    assert z3.certified and abs(z3.lhs - 1.0) <= 1e-9 and abs(z3.rhs - 1.0) <= 1e-9
    sym4 = by_name["sym4-regular"]
    assert not sym4.certified
    assert sym4.holds is True


def test_criterion_08_min_displacement_within_bound(flow_suite_reports):
    # The best-point displacement never exceeds the window bound, and is
    # exactly zero on the fixed-point flow.
    for name, flow, rep in flow_suite_reports:
        x0, value = min_displacement_point(flow)
        assert value <= rep.rhs + 1e-7, name
        if name == "trivial-z4":
            assert value == 0.0


def test_criterion_09_observable_diameter_monotonicity():
    # 50 random dominated metric pairs (n <= 4): smaller metric gives a
    # smaller exact observable diameter; the same ordering holds between
    # each per-point orbit pullback and the whole-orbit envelope.
    rng = np.random.default_rng(909)
    for trial in range(50):
        n = int(rng.integers(2, 5))
        large = random_space(rng, n, scale=float(rng.uniform(0.5, 3.0)))
        cut = float(rng.uniform(0.3, 1.0)) * large.diameter
        small = FiniteMetricSpace(large.labels, np.minimum(large.dist, cut))
        assert_metric_dominated(small, large)
        mu = random_measure(rng, n)
        for alpha in (0.1, 0.3):
            lo = observable_diameter(MmSpace(small, mu), alpha, oracle=True).oracle_value
            hi = observable_diameter(MmSpace(large, mu), alpha, oracle=True).oracle_value
            assert lo <= hi + 1e-7

    z4 = cyclic_geodesic_metric(4)
    flows = [
        coset_flow(cyclic_geodesic_metric(6), [0, 3]),
        union_flow(regular_flow(z4), coset_flow(z4, [0, 2]), 1.0),
        regular_flow(sym_hamming_metric(3)),
    ]
    for flow in flows:
        envelope = flow_orbit_metric(flow)
        uni = Measure.uniform(flow.order)
        hi = observable_diameter(
            MmSpace(envelope, uni), 0.3, oracle=True, oracle_cap=8
        ).oracle_value
        for x in range(flow.n_points):
            pulled = point_orbit_metric(flow, x)
            assert_metric_dominated(pulled, envelope)
            lo = observable_diameter(
                MmSpace(pulled, uni), 0.3, oracle=True, oracle_cap=8
            ).oracle_value
            assert lo <= hi + 1e-7


def test_criterion_10_reproducible_outputs_and_roundtrip(scenario_double_runs):
    # Every built-in scenario, run twice with the same seed, writes
    # byte-identical CSV files; JSON encodings survive a full round trip
    # through text unchanged.
    for name, (a, b) in scenario_double_runs.items():
        csvs_a = sorted(p.name for p in a.glob("*.csv"))
        csvs_b = sorted(p.name for p in b.glob("*.csv"))
        assert csvs_a and csvs_a == csvs_b, name
        for fname in csvs_a:
            assert (a / fname).read_bytes() == (b / fname).read_bytes(), (name, fname)

    rng = np.random.default_rng(1010)
    space = random_space(rng, 5, scale=1.7)
    z4 = cyclic_geodesic_metric(4)
    objects = [
        (serialize.space_to_json, serialize.space_from_json, space),
        (
            serialize.measure_to_json,
            lambda obj: serialize.measure_from_json(obj, 8),
            serialize.measure_from_json({"bernoulli": 0.3}, 8),
        ),
        (serialize.group_to_json, serialize.group_from_json, cyclic_geodesic_metric(5)),
        (
            serialize.flow_to_json,
            serialize.flow_from_json,
            union_flow(regular_flow(z4), coset_flow(z4, [0, 2]), 1.0),
        ),
    ]
    for to_json, from_json, obj in objects:
        payload = to_json(obj)
        through_text = json.loads(json.dumps(payload))
        assert through_text == payload
        assert to_json(from_json(through_text)) == payload
