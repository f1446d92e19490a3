import json

import numpy as np
import pytest

from mmconc import serialize
from mmconc.core import FiniteMetricSpace, Measure
from mmconc.errors import ConfigError, UnknownGenerator
from mmconc.generators import (
    bernoulli_product_measure,
    coset_flow,
    cycle_space,
    cyclic_geodesic_metric,
    cyclic_group,
    hypercube_space,
    path_space,
    regular_flow,
    simplex_space,
    sym_hamming_metric,
    trivial_flow,
    union_flow,
)


def roundtrip(obj):
    # through an actual JSON string so float formatting is exercised
    return json.loads(json.dumps(obj))


def test_space_roundtrip_is_bit_exact():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(6, 2))
    d = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
    space = FiniteMetricSpace([f"p{i}" for i in range(6)], d)
    back = serialize.space_from_json(roundtrip(serialize.space_to_json(space)))
    assert np.array_equal(back.dist, space.dist)
    assert back.labels == space.labels
    assert back.is_pseudo == space.is_pseudo


def test_space_generator_forms():
    assert np.array_equal(
        serialize.space_from_json({"generator": "path", "n": 4}).dist,
        path_space(4).dist,
    )
    assert np.array_equal(
        serialize.space_from_json(
            {"generator": "cycle", "n": 5, "normalized": True}
        ).dist,
        cycle_space(5, normalized=True).dist,
    )
    assert np.array_equal(
        serialize.space_from_json({"generator": "hypercube", "n": 3}).dist,
        hypercube_space(3).dist,
    )
    assert np.array_equal(
        serialize.space_from_json({"generator": "simplex", "n": 4}).dist,
        simplex_space(4).dist,
    )


def test_space_errors():
    with pytest.raises(UnknownGenerator):
        serialize.space_from_json({"generator": "torus", "n": 3})
    with pytest.raises(ConfigError):
        serialize.space_from_json({"labels": ["a", "b"]})
    with pytest.raises(ConfigError):
        serialize.space_from_json([1, 2])
    with pytest.raises(ConfigError):
        serialize.space_from_json({"generator": "path", "n": "four"})


def test_measure_roundtrip_and_forms():
    mu = Measure([0.7, 0.2, 0.1])
    back = serialize.measure_from_json(roundtrip(serialize.measure_to_json(mu)), 3)
    assert np.array_equal(back.weights, mu.weights)

    uni = serialize.measure_from_json({"uniform": True}, 4)
    assert np.array_equal(uni.weights, Measure.uniform(4).weights)
    pm = serialize.measure_from_json({"point_mass": 2}, 4)
    assert np.array_equal(pm.weights, Measure.point_mass(4, 2).weights)
    ber = serialize.measure_from_json({"bernoulli": 0.3}, 8)
    assert np.array_equal(ber.weights, bernoulli_product_measure(3, 0.3).weights)


def test_measure_errors():
    with pytest.raises(ConfigError):
        serialize.measure_from_json({"weights": [0.5, 0.5]}, 3)
    with pytest.raises(ConfigError):
        serialize.measure_from_json({"bernoulli": 0.5}, 6)
    with pytest.raises(ConfigError):
        serialize.measure_from_json({}, 3)


def test_group_roundtrip_and_generators():
    metric = cyclic_geodesic_metric(5)
    back = serialize.group_from_json(roundtrip(serialize.group_to_json(metric)))
    assert np.array_equal(back.group.mul, metric.group.mul)
    assert np.array_equal(back.dist, metric.dist)

    gen = serialize.group_from_json({"generator": "cyclic", "n": 5})
    assert np.array_equal(gen.dist, metric.dist)
    norm = serialize.group_from_json(
        {"generator": "cyclic", "n": 5, "metric": "geodesic_normalized"}
    )
    assert np.array_equal(norm.dist, cyclic_geodesic_metric(5, normalized=True).dist)
    sym = serialize.group_from_json({"generator": "sym", "n": 3})
    assert np.array_equal(sym.dist, sym_hamming_metric(3).dist)
    weighted = serialize.group_from_json(
        {"generator": "sym", "n": 3, "metric": {"weighted": [1.0, 2.0, 3.0]}}
    )
    assert np.array_equal(
        weighted.dist, sym_hamming_metric(3, weights=[1.0, 2.0, 3.0]).dist
    )


def test_group_errors():
    with pytest.raises(UnknownGenerator):
        serialize.group_from_json({"generator": "dihedral", "n": 4})
    with pytest.raises(ConfigError):
        serialize.group_from_json({"generator": "cyclic", "n": 4, "metric": "hamming"})
    with pytest.raises(ConfigError):
        serialize.group_from_json({"mul": [[0, 1], [1, 0]]})


def test_flow_roundtrip_is_bit_exact():
    flow = coset_flow(cyclic_geodesic_metric(6), [0, 3])
    back = serialize.flow_from_json(roundtrip(serialize.flow_to_json(flow)))
    assert np.array_equal(back.action, flow.action)
    assert np.array_equal(back.space.dist, flow.space.dist)
    assert np.array_equal(back.group.mul, flow.group.mul)


def test_flow_generator_forms():
    reg = serialize.flow_from_json(
        {"generator": "regular", "group": {"generator": "cyclic", "n": 4}}
    )
    assert np.array_equal(reg.action, regular_flow(cyclic_geodesic_metric(4)).action)

    triv = serialize.flow_from_json(
        {
            "generator": "trivial",
            "group": {"generator": "cyclic", "n": 3},
            "space": {"generator": "path", "n": 2},
        }
    )
    assert np.array_equal(
        triv.action, trivial_flow(cyclic_group(3), path_space(2)).action
    )

    part = {"generator": "regular", "group": {"generator": "cyclic", "n": 3}}
    uni = serialize.flow_from_json(
        {"generator": "union", "parts": [part, part], "cross": 2.0}
    )
    direct = union_flow(
        regular_flow(cyclic_geodesic_metric(3)),
        regular_flow(cyclic_geodesic_metric(3)),
        2.0,
    )
    assert np.array_equal(uni.space.dist, direct.space.dist)
    assert np.array_equal(uni.action, direct.action)


def test_flow_errors():
    with pytest.raises(UnknownGenerator):
        serialize.flow_from_json({"generator": "skew", "group": {}})
    with pytest.raises(ConfigError):
        serialize.flow_from_json({"generator": "union", "parts": [], "cross": 1.0})
    with pytest.raises(ConfigError):
        serialize.flow_from_json({"space": {"generator": "path", "n": 2}})
