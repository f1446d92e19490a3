import numpy as np
import pytest

from mmconc.core import (
    FiniteMetricSpace,
    Measure,
    MmSpace,
    PointMap,
    pushforward,
    restrict,
    support,
)
from mmconc.errors import (
    DimensionMismatch,
    InvalidMeasure,
    InvalidSpace,
    MassNotOne,
)

from conftest import random_mm, random_space


def two_point(d=1.0):
    return FiniteMetricSpace(["a", "b"], [[0.0, d], [d, 0.0]])


def test_space_basic_properties():
    s = two_point(0.5)
    assert s.n == 2
    assert s.diameter == 0.5
    assert not s.is_pseudo


def test_space_rejects_triangle_violation():
    d = [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
    with pytest.raises(InvalidSpace):
        FiniteMetricSpace(["a", "b", "c"], d)


def test_space_rejects_asymmetry_and_bad_diagonal():
    with pytest.raises(InvalidSpace):
        FiniteMetricSpace(["a", "b"], [[0, 1], [2, 0]])
    with pytest.raises(InvalidSpace):
        FiniteMetricSpace(["a", "b"], [[0.1, 1], [1, 0]])
    with pytest.raises(InvalidSpace):
        FiniteMetricSpace(["a", "b"], [[0, -1], [-1, 0]])


def test_space_zero_distance_needs_pseudo_flag():
    d = [[0, 0], [0, 0]]
    with pytest.raises(InvalidSpace):
        FiniteMetricSpace(["a", "b"], d)
    s = FiniteMetricSpace(["a", "b"], d, is_pseudo=True)
    assert s.is_pseudo


def test_space_triangle_tolerance_accepts_tiny_slack():
    d = np.array([[0, 1, 2 + 5e-10], [1, 0, 1], [2 + 5e-10, 1, 0]])
    FiniteMetricSpace(["a", "b", "c"], d)  # within 1e-9


def test_space_immutable():
    s = two_point()
    with pytest.raises(AttributeError):
        s.labels = ("x", "y")
    with pytest.raises(ValueError):
        s.dist[0, 1] = 5.0


def test_measure_validation():
    Measure([0.5, 0.5])
    with pytest.raises(InvalidMeasure):
        Measure([0.5, 0.6])
    with pytest.raises(InvalidMeasure):
        Measure([-0.1, 1.1])
    with pytest.raises(InvalidMeasure):
        Measure([np.nan, 1.0])


def test_measure_constructor_does_not_renormalize_but_normalized_does():
    with pytest.raises(InvalidMeasure):
        Measure([1.0, 1.0])
    m = Measure.normalized([1.0, 1.0])
    assert np.allclose(m.weights, [0.5, 0.5])
    with pytest.raises(InvalidMeasure):
        Measure.normalized([0.0, 0.0])


def test_measure_helpers():
    m = Measure([0.25, 0.0, 0.75])
    assert m.support_indices() == frozenset({0, 2})
    assert m.mass([0, 2]) == 1.0
    assert Measure.point_mass(3, 1).weights[1] == 1.0
    assert np.allclose(Measure.uniform(4).weights, 0.25)


def test_mm_space_dimension_check():
    with pytest.raises(DimensionMismatch):
        MmSpace(two_point(), Measure([1.0]))


def test_support_example():
    m = MmSpace(
        FiniteMetricSpace(["a", "b", "c"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]]),
        Measure([0.5, 0.5, 0.0]),
    )
    assert support(m) == frozenset({0, 1})


def test_restrict_example_and_mass_check():
    m = MmSpace(
        FiniteMetricSpace(["a", "b", "c"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]]),
        Measure([0.5, 0.5, 0.0]),
    )
    r = restrict(m, {0, 1})
    assert r.n == 2
    assert r.space.labels == ("a", "b")
    assert r.space.dist[0, 1] == 1.0
    assert np.allclose(r.measure.weights, [0.5, 0.5])
    with pytest.raises(MassNotOne):
        restrict(m, {0, 2})


def test_pushforward_example():
    mu = Measure([0.5, 0.5])
    p = PointMap.constant(2, 1, 0)
    out = pushforward(mu, p)
    assert out.n == 1
    assert out.weights[0] == 1.0


def test_pushforward_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        pushforward(Measure([1.0]), PointMap.identity(2))


def test_pushforward_preserves_mass_randomized():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(1, 12))
        k = int(rng.integers(1, 8))
        mu = Measure.normalized(rng.random(n) + 1e-3)
        p = PointMap(n, k, rng.integers(0, k, size=n))
        out = pushforward(mu, p)
        assert abs(out.weights.sum() - 1.0) <= 1e-12
        # mass of each fiber moved exactly
        for j in range(k):
            assert out.weights[j] == pytest.approx(
                mu.weights[p.image == j].sum(), abs=1e-15
            )


def test_restrict_of_support_is_full_mass():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = random_mm(rng, int(rng.integers(2, 10)))
        r = restrict(m, support(m))
        assert abs(r.measure.weights.sum() - 1.0) <= 1e-12


def test_random_space_helper_is_valid():
    rng = np.random.default_rng(0)
    s = random_space(rng, 12)
    assert s.n == 12
    FiniteMetricSpace(s.labels, s.dist)  # re-validates
