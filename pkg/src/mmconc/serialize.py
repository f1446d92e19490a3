"""JSON forms of spaces, measures, groups, and flows.

Encoders emit explicit tables; decoders accept either the explicit form or
a named generator form.  Floats survive the round trip bit-exactly because
they are written with the shortest repr.
"""

from __future__ import annotations

import numpy as np

from .core import FiniteMetricSpace, Measure
from .dynamics import FlowInstance
from .errors import ConfigError, UnknownGenerator
from .generators import (
    bernoulli_product_measure,
    coset_flow,
    cycle_space,
    cyclic_geodesic_metric,
    cyclic_group,
    hypercube_group,
    hypercube_hamming_metric,
    hypercube_space,
    path_space,
    regular_flow,
    simplex_space,
    sym_group,
    sym_hamming_metric,
    trivial_flow,
    union_flow,
)
from .groups import FiniteGroup, RightInvariantMetric

_SPACE_GENERATORS = ("path", "cycle", "hypercube", "simplex")
_GROUP_GENERATORS = ("cyclic", "hypercube", "sym")


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ConfigError(f"{context} is missing the {key!r} field")
    return obj[key]


def _int_field(obj: dict, key: str, context: str) -> int:
    v = _require(obj, key, context)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{context}.{key} must be an integer")
    return v


# spaces -----------------------------------------------------------------------


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {
        "labels": list(space.labels),
        "dist": space.dist.tolist(),
        "is_pseudo": space.is_pseudo,
    }


def space_from_json(obj) -> FiniteMetricSpace:
    if not isinstance(obj, dict):
        raise ConfigError("space must be a JSON object")
    if "generator" in obj:
        gen = obj["generator"]
        if gen not in _SPACE_GENERATORS:
            raise UnknownGenerator(f"unknown space generator {gen!r}")
        n = _int_field(obj, "n", "space")
        if gen == "path":
            return path_space(n)
        if gen == "cycle":
            return cycle_space(n, normalized=bool(obj.get("normalized", False)))
        if gen == "hypercube":
            return hypercube_space(n)
        return simplex_space(n)
    labels = _require(obj, "labels", "space")
    dist = _require(obj, "dist", "space")
    return FiniteMetricSpace(labels, dist, is_pseudo=bool(obj.get("is_pseudo", False)))


# measures ---------------------------------------------------------------------


def measure_to_json(mu: Measure) -> dict:
    return {"weights": mu.weights.tolist()}


def measure_from_json(obj, n: int) -> Measure:
    if not isinstance(obj, dict):
        raise ConfigError("measure must be a JSON object")
    if "weights" in obj:
        w = obj["weights"]
        if len(w) != n:
            raise ConfigError(f"measure has {len(w)} weights, expected {n}")
        return Measure(w)
    if obj.get("uniform"):
        return Measure.uniform(n)
    if "point_mass" in obj:
        return Measure.point_mass(n, _int_field(obj, "point_mass", "measure"))
    if "bernoulli" in obj:
        p = obj["bernoulli"]
        dims = int(round(np.log2(n)))
        if 2**dims != n:
            raise ConfigError("bernoulli measures need a power-of-two point count")
        return bernoulli_product_measure(dims, float(p))
    raise ConfigError("measure needs weights, uniform, point_mass, or bernoulli")


# groups with metrics -------------------------------------------------------------


def group_to_json(metric: RightInvariantMetric) -> dict:
    return {
        "mul": metric.group.mul.tolist(),
        "labels": list(metric.group.labels),
        "dist": metric.dist.tolist(),
        "is_pseudo": metric.space.is_pseudo,
    }


def _metric_spec(obj: dict, default: str):
    spec = obj.get("metric", default)
    if isinstance(spec, dict) and "weighted" in spec:
        return "weighted", list(spec["weighted"])
    if isinstance(spec, str):
        return spec, None
    raise ConfigError(f"unsupported metric spec {spec!r}")


def group_from_json(obj) -> RightInvariantMetric:
    if not isinstance(obj, dict):
        raise ConfigError("group must be a JSON object")
    if "generator" in obj:
        gen = obj["generator"]
        if gen not in _GROUP_GENERATORS:
            raise UnknownGenerator(f"unknown group generator {gen!r}")
        n = _int_field(obj, "n", "group")
        if gen == "cyclic":
            kind, _ = _metric_spec(obj, "geodesic")
            if kind == "geodesic":
                return cyclic_geodesic_metric(n)
            if kind == "geodesic_normalized":
                return cyclic_geodesic_metric(n, normalized=True)
            raise ConfigError(f"cyclic groups do not support metric {kind!r}")
        if gen == "hypercube":
            kind, _ = _metric_spec(obj, "normalized_hamming")
            if kind != "normalized_hamming":
                raise ConfigError(f"hypercube groups do not support metric {kind!r}")
            return hypercube_hamming_metric(n)
        kind, weights = _metric_spec(obj, "normalized_hamming")
        if kind == "normalized_hamming":
            return sym_hamming_metric(n)
        if kind == "weighted":
            return sym_hamming_metric(n, weights=weights)
        raise ConfigError(f"symmetric groups do not support metric {kind!r}")
    mul = _require(obj, "mul", "group")
    dist = _require(obj, "dist", "group")
    group = FiniteGroup(mul, labels=obj.get("labels"))
    return RightInvariantMetric(
        group, dist, is_pseudo=bool(obj.get("is_pseudo", False))
    )


def _group_table_from_json(obj) -> FiniteGroup:
    if not isinstance(obj, dict):
        raise ConfigError("group must be a JSON object")
    if "generator" in obj:
        gen = obj["generator"]
        if gen not in _GROUP_GENERATORS:
            raise UnknownGenerator(f"unknown group generator {gen!r}")
        n = _int_field(obj, "n", "group")
        if gen == "cyclic":
            return cyclic_group(n)
        if gen == "hypercube":
            return hypercube_group(n)
        return sym_group(n)
    mul = _require(obj, "mul", "group")
    return FiniteGroup(mul, labels=obj.get("labels"))


# flows ------------------------------------------------------------------------


def flow_to_json(flow: FlowInstance) -> dict:
    return {
        "group": {"mul": flow.group.mul.tolist(), "labels": list(flow.group.labels)},
        "space": space_to_json(flow.space),
        "action": flow.action.tolist(),
    }


def flow_from_json(obj) -> FlowInstance:
    if not isinstance(obj, dict):
        raise ConfigError("flow must be a JSON object")
    if "generator" in obj:
        gen = obj["generator"]
        if gen == "regular":
            return regular_flow(group_from_json(_require(obj, "group", "flow")))
        if gen == "trivial":
            group = _group_table_from_json(_require(obj, "group", "flow"))
            space = space_from_json(_require(obj, "space", "flow"))
            return trivial_flow(group, space)
        if gen == "coset":
            metric = group_from_json(_require(obj, "group", "flow"))
            return coset_flow(metric, _require(obj, "subgroup", "flow"))
        if gen == "union":
            parts = _require(obj, "parts", "flow")
            if not isinstance(parts, list) or len(parts) != 2:
                raise ConfigError("union flows need exactly two parts")
            cross = float(_require(obj, "cross", "flow"))
            return union_flow(flow_from_json(parts[0]), flow_from_json(parts[1]), cross)
        raise UnknownGenerator(f"unknown flow generator {gen!r}")
    group = _group_table_from_json(_require(obj, "group", "flow"))
    space = space_from_json(_require(obj, "space", "flow"))
    action = _require(obj, "action", "flow")
    return FlowInstance(group, space, action)
