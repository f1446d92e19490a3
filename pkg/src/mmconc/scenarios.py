"""Built-in, reproducible scenario runs.

A scenario writes delimited output (RFC 4180, LF line endings, '.'
decimals), PNG figures next to it, and a manifest.json.  The CSV rows
carry runtime_ms = 0 so that two runs with the same seed are
byte-identical; real wall-clock timings go to the manifest only.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata
from pathlib import Path

import numpy as np

from .core import Measure, MmSpace
from .distances import mass_transport_distance, prokhorov_distance
from .dynamics import haar_average, orbit_bound_report
from .errors import ConfigError
from .generators import (
    coset_flow,
    cycle_space,
    cyclic_geodesic_metric,
    cyclic_group,
    hypercube_space,
    path_space,
    regular_flow,
    sym_hamming_metric,
    trivial_flow,
    union_flow,
)
from .groups import invariance_defect
from .plotting import (
    save_defect_figure,
    save_flow_figure,
    save_levy_figure,
    save_mmdist_figure,
)
from . import concentration

try:
    VERSION = metadata.version("mmconc")
except metadata.PackageNotFoundError:  # running from a source tree
    VERSION = "0.0.0"

FLOW_HEADER = [
    "scenario",
    "lhs",
    "rhs",
    "alpha_star",
    "certified",
    "x0",
    "x0_value",
    "runtime_ms",
]
LEVY_HEADER = [
    "index",
    "n_points",
    "alpha",
    "lower_bound",
    "oracle_value",
    "eta",
    "witness_id",
    "runtime_ms",
]
DEFECT_HEADER = ["group", "order", "g", "defect", "runtime_ms"]
MMDIST_HEADER = ["metric", "value", "runtime_ms"]
CONCENTRATE_HEADER = [
    "index",
    "n_points",
    "prokhorov",
    "forward_upper",
    "reverse_lower",
    "runtime_ms",
]


def format_cell(value) -> str:
    """Locale-independent cell text; None becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return str(path)


def _map_ordered(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def flow_rows(named_reports):
    """CSV rows for orbit-bound reports, with the timing column zeroed."""
    return [
        (name, rep.lhs, rep.rhs, rep.alpha_star, rep.certified, rep.x0, rep.x0_value, 0)
        for name, rep in named_reports
    ]


def _scenario_two_point_mmdist(out: Path, seed: int, threads: int):
    space = path_space(2)
    mu, nu = Measure([0.7, 0.3]), Measure([0.3, 0.7])
    timings = {}
    values = []
    for name, fn in (
        ("transport", mass_transport_distance),
        ("prokhorov", prokhorov_distance),
    ):
        t0 = time.perf_counter()
        values.append((name, fn(mu, nu, space)))
        timings[name] = (time.perf_counter() - t0) * 1000.0
    csv_path = write_csv(out / "mmdist.csv", MMDIST_HEADER, [(n, v, 0) for n, v in values])
    fig_path = save_mmdist_figure(values, out / "mmdist.png")
    return [csv_path, fig_path], {"timings_ms": timings}


def _scenario_hypercube_levy(out: Path, seed: int, threads: int):
    dims = list(range(2, 11))
    mms = [MmSpace(hypercube_space(k), Measure.uniform(2**k)) for k in dims]
    report = concentration.levy_scan(
        mms,
        alphas=(0.1, 0.05, 0.02),
        scales=[float(k) for k in dims],
        seed=seed,
        threads=threads,
    )
    rows = [
        (r.index, r.n_points, r.alpha, r.lower_bound, r.oracle_value, r.eta, r.witness_id, 0)
        for r in report.rows
    ]
    csv_path = write_csv(out / "levy.csv", LEVY_HEADER, rows)
    fig_path = save_levy_figure(report, out / "levy.png")
    extra = {
        "dims": dims,
        "exponents": {repr(a): e for a, e in report.exponents.items()},
        "timings_ms": {"rows": [r.runtime_ms for r in report.rows]},
    }
    return [csv_path, fig_path], extra


def _scenario_z3_regular_flow(out: Path, seed: int, threads: int):
    rep = orbit_bound_report(regular_flow(cyclic_geodesic_metric(3)), seed=seed)
    named = [("z3-regular", rep)]
    csv_path = write_csv(out / "flow.csv", FLOW_HEADER, flow_rows(named))
    fig_path = save_flow_figure(named, out / "flow.png")
    extra = {
        "holds": {"z3-regular": rep.holds},
        "alpha_values": {repr(a): v for a, v in rep.alpha_values.items()},
        "timings_ms": {"z3-regular": rep.runtime_ms},
    }
    return [csv_path, fig_path], extra


def _scenario_sym_chain(out: Path, seed: int, threads: int):
    # identity sits at index 0 under lexicographic enumeration
    def one(n):
        metric = sym_hamming_metric(n)
        mu = Measure.point_mass(metric.n, 0)
        t0 = time.perf_counter()
        rows = [
            (
                f"sym{n}",
                metric.n,
                metric.group.labels[g],
                invariance_defect(metric.group, metric.space, mu, g),
                0,
            )
            for g in range(metric.n)
        ]
        return rows, (time.perf_counter() - t0) * 1000.0

    results = _map_ordered(one, [2, 3, 4], threads)
    rows = [row for chunk, _ in results for row in chunk]
    csv_path = write_csv(out / "defect.csv", DEFECT_HEADER, rows)
    fig_path = save_defect_figure([(r[0], r[2], r[3]) for r in rows], out / "defect.png")
    timings = {f"sym{n}": t for n, (_, t) in zip([2, 3, 4], results)}
    return [csv_path, fig_path], {"timings_ms": timings}


def _flow_suite_units(seed: int):
    z4 = cyclic_geodesic_metric(4)
    two_orbit = union_flow(regular_flow(z4), coset_flow(z4, [0, 2]), 1.0)
    nu = haar_average(two_orbit, Measure.point_mass(two_orbit.n_points, 4))
    units = [("trivial-z4", trivial_flow(cyclic_group(4), cycle_space(4)), None)]
    units += [
        (f"z{n}-regular", regular_flow(cyclic_geodesic_metric(n)), None)
        for n in range(3, 9)
    ]
    units.append(("two-orbit-z4", two_orbit, nu))
    units.append(("sym3-regular", regular_flow(sym_hamming_metric(3)), None))
    units.append(("sym4-regular", regular_flow(sym_hamming_metric(4)), None))
    return units


def _scenario_flow_suite(out: Path, seed: int, threads: int):
    units = _flow_suite_units(seed)

    def one(unit):
        name, flow, nu = unit
        return name, orbit_bound_report(flow, nu=nu, seed=seed)

    named = _map_ordered(one, units, threads)
    csv_path = write_csv(out / "flow.csv", FLOW_HEADER, flow_rows(named))
    fig_path = save_flow_figure(named, out / "flow.png")
    extra = {
        "holds": {name: rep.holds for name, rep in named},
        "timings_ms": {name: rep.runtime_ms for name, rep in named},
    }
    return [csv_path, fig_path], extra


SCENARIOS = {
    "two-point-mmdist": _scenario_two_point_mmdist,
    "hypercube-levy": _scenario_hypercube_levy,
    "z3-regular-flow": _scenario_z3_regular_flow,
    "sym-chain": _scenario_sym_chain,
    "flow-suite": _scenario_flow_suite,
}


def scenario_names():
    return sorted(SCENARIOS)


def run_scenario(name: str, out_dir, *, seed: int = 0, threads: int = 1) -> dict:
    """Run one built-in scenario into out_dir and return its manifest."""
    if name not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {name!r}; choose from {', '.join(scenario_names())}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    outputs, extra = SCENARIOS[name](out, seed, threads)
    total_ms = (time.perf_counter() - t0) * 1000.0
    manifest = {
        "tool": "mmconc",
        "version": VERSION,
        "scenario": name,
        "seed": seed,
        "threads": threads,
        "outputs": sorted(Path(p).name for p in outputs),
    }
    for key, value in extra.items():
        if key == "timings_ms":
            continue
        manifest[key] = value
    manifest["timings_ms"] = dict(extra.get("timings_ms", {}))
    manifest["timings_ms"]["total"] = total_ms
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest
