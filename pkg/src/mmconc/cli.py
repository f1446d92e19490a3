"""Command line front end.

Every subcommand reads a JSON config (except `run`, which names a
built-in scenario), writes CSV output plus a PNG figure into --out, and
prints a short summary.  Exit codes: 0 on success, 1 for configuration
problems (bad JSON, unknown generators, missing files), 2 when a
computation raises or a certified bound check fails, 3 when only part
of a multi-unit job finished.

Unlike scenario runs, direct subcommands keep real timings in the
runtime_ms column, so their CSV bytes vary from run to run.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import concentration, serialize
from .core import Measure, MmSpace, PointMap
from .distances import mass_transport_distance, prokhorov_distance
from .dynamics import orbit_bound_report
from .errors import BoundExceeded, ConfigError, MmconcError, PartialFailure, UnknownGenerator
from .groups import invariance_defect
from .plotting import (
    save_concentration_figure,
    save_defect_figure,
    save_flow_figure,
    save_levy_figure,
    save_mmdist_figure,
    save_obsdiam_figure,
)
from .scenarios import (
    CONCENTRATE_HEADER,
    DEFECT_HEADER,
    FLOW_HEADER,
    LEVY_HEADER,
    MMDIST_HEADER,
    VERSION,
    run_scenario,
    scenario_names,
    write_csv,
)


def _load_config(args) -> dict:
    if args.config is None:
        raise ConfigError("this command needs --config FILE")
    with open(args.config) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    return obj


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _mm_from(cfg: dict, space_key: str = "space", measure_key: str = "measure") -> MmSpace:
    space = serialize.space_from_json(_get(cfg, space_key))
    mu = serialize.measure_from_json(_get(cfg, measure_key), space.n)
    return MmSpace(space, mu)


def _get(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing the {key!r} field")
    return cfg[key]


def _cmd_mmdist(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    space = serialize.space_from_json(_get(cfg, "space"))
    mu = serialize.measure_from_json(_get(cfg, "mu"), space.n)
    nu = serialize.measure_from_json(_get(cfg, "nu"), space.n)
    rows = []
    for name, fn in (
        ("transport", mass_transport_distance),
        ("prokhorov", prokhorov_distance),
    ):
        t0 = time.perf_counter()
        value = fn(mu, nu, space)
        rows.append((name, value, (time.perf_counter() - t0) * 1000.0))
        print(f"{name} {value!r}")
    write_csv(out / "mmdist.csv", MMDIST_HEADER, rows)
    save_mmdist_figure([(r[0], r[1]) for r in rows], out / "mmdist.png")
    print(f"wrote {out / 'mmdist.csv'} and {out / 'mmdist.png'}")
    return 0


def _cmd_obsdiam(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    mm = _mm_from(cfg)
    alphas = _get(cfg, "alphas")
    budget = cfg.get("budget")
    reports = [
        concentration.observable_diameter(
            mm, float(alpha), budget=budget, seed=args.seed, oracle=args.oracle
        )
        for alpha in alphas
    ]
    rows = [
        (0, r.n_points, r.alpha, r.lower_bound, r.oracle_value, r.eta, r.witness_id, r.runtime_ms)
        for r in reports
    ]
    write_csv(out / "obsdiam.csv", LEVY_HEADER, rows)
    save_obsdiam_figure(reports, out / "obsdiam.png")
    for r in reports:
        tail = f" exact={r.oracle_value!r}" if r.oracle_value is not None else f" eta={r.eta!r}"
        print(f"alpha={r.alpha:g} lower={r.lower_bound!r}{tail} ({r.method})")
    print(f"wrote {out / 'obsdiam.csv'} and {out / 'obsdiam.png'}")
    return 0


def _cmd_levy_scan(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    spaces = [serialize.space_from_json(s) for s in _get(cfg, "spaces")]
    measures_cfg = cfg.get("measures")
    if measures_cfg is None:
        measures = [Measure.uniform(s.n) for s in spaces]
    else:
        if len(measures_cfg) != len(spaces):
            raise ConfigError("measures must match spaces one to one")
        measures = [
            serialize.measure_from_json(m, s.n) for m, s in zip(measures_cfg, spaces)
        ]
    mms = [MmSpace(s, m) for s, m in zip(spaces, measures)]
    report = concentration.levy_scan(
        mms,
        alphas=[float(a) for a in _get(cfg, "alphas")],
        scales=cfg.get("scales"),
        budget=cfg.get("budget"),
        seed=args.seed,
        oracle=args.oracle,
        threads=args.threads,
    )
    rows = [
        (r.index, r.n_points, r.alpha, r.lower_bound, r.oracle_value, r.eta, r.witness_id, r.runtime_ms)
        for r in report.rows
    ]
    write_csv(out / "levy.csv", LEVY_HEADER, rows)
    save_levy_figure(report, out / "levy.png")
    for alpha, exponent in report.exponents.items():
        print(f"alpha={alpha:g} decay exponent {exponent!r}")
    print(f"wrote {out / 'levy.csv'} and {out / 'levy.png'}")
    return 0


def _cmd_invariance_defect(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    metric = serialize.group_from_json(_get(cfg, "group"))
    mu = serialize.measure_from_json(_get(cfg, "measure"), metric.n)
    elements = cfg.get("elements", "all")
    if elements == "all":
        elements = list(range(metric.n))
    name = cfg.get("name", "group")
    rows = []
    for g in elements:
        t0 = time.perf_counter()
        defect = invariance_defect(metric.group, metric.space, mu, int(g))
        rows.append(
            (name, metric.n, metric.group.labels[int(g)], defect, (time.perf_counter() - t0) * 1000.0)
        )
    write_csv(out / "defect.csv", DEFECT_HEADER, rows)
    save_defect_figure([(r[0], r[2], r[3]) for r in rows], out / "defect.png")
    worst = max(rows, key=lambda r: r[3])
    print(f"largest defect {worst[3]!r} at element {worst[2]}")
    print(f"wrote {out / 'defect.csv'} and {out / 'defect.png'}")
    return 0


def _cmd_flow_check(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    flows = _get(cfg, "flows")
    if not isinstance(flows, list) or not flows:
        raise ConfigError("flows must be a non-empty list")
    named, failures = [], []
    for i, unit in enumerate(flows):
        name = unit.get("name", f"flow{i}")
        try:
            flow = serialize.flow_from_json(_get(unit, "flow"))
            nu = unit.get("nu")
            if nu is not None:
                nu = serialize.measure_from_json(nu, flow.n_points)
            elements = unit.get("elements")
            rep = orbit_bound_report(
                flow,
                nu=nu,
                elements=elements,
                seed=args.seed,
                oracle_cap=int(cfg.get("oracle_cap", 8)),
            )
            named.append((name, rep))
        except MmconcError as exc:
            failures.append((name, f"{type(exc).__name__}: {exc}"))
    if named:
        rows = [
            (name, r.lhs, r.rhs, r.alpha_star, r.certified, r.x0, r.x0_value, r.runtime_ms)
            for name, r in named
        ]
        write_csv(out / "flow.csv", FLOW_HEADER, rows)
        save_flow_figure(named, out / "flow.png")
        for name, r in named:
            verdict = {True: "holds", False: "VIOLATED", None: "undecided"}[r.holds]
            print(f"{name}: lhs={r.lhs!r} rhs={r.rhs!r} ({verdict})")
        print(f"wrote {out / 'flow.csv'} and {out / 'flow.png'}")
    if failures:
        if not named:
            raise MmconcError("; ".join(msg for _, msg in failures))
        raise PartialFailure(
            f"{len(failures)} of {len(flows)} flow units failed", failures
        )
    violated = [name for name, r in named if r.holds is False]
    if violated:
        raise BoundExceeded(f"certified bound violated for: {', '.join(violated)}")
    return 0


def _cmd_concentrate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    target = _mm_from(_get(cfg, "target"))
    stages, maps = [], []
    for stage in _get(cfg, "stages"):
        mm = _mm_from(stage)
        image = _get(stage, "map")
        stages.append(mm)
        maps.append(PointMap(mm.space.n, target.space.n, image))
    report = concentration.concentration_report(
        target, stages, maps, budget=cfg.get("budget"), seed=args.seed
    )
    rows = [
        (r.index, r.n_points, r.prokhorov, r.forward_upper, r.reverse_lower, r.runtime_ms)
        for r in report.rows
    ]
    write_csv(out / "concentrate.csv", CONCENTRATE_HEADER, rows)
    save_concentration_figure(report, out / "concentrate.png")
    last = report.rows[-1]
    print(f"final stage prokhorov {last.prokhorov!r}")
    print(f"wrote {out / 'concentrate.csv'} and {out / 'concentrate.png'}")
    return 0


def _cmd_generate(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    kind = _get(cfg, "kind")
    spec = _get(cfg, "spec")
    if kind == "space":
        payload = serialize.space_to_json(serialize.space_from_json(spec))
    elif kind == "measure":
        n = _get(cfg, "n")
        payload = serialize.measure_to_json(serialize.measure_from_json(spec, int(n)))
    elif kind == "group":
        payload = serialize.group_to_json(serialize.group_from_json(spec))
    elif kind == "flow":
        payload = serialize.flow_to_json(serialize.flow_from_json(spec))
    else:
        raise ConfigError(f"unknown kind {kind!r}; use space, measure, group, or flow")
    path = out / "generated.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")
    return 0


def _cmd_run(args) -> int:
    manifest = run_scenario(args.scenario, args.out, seed=args.seed, threads=args.threads)
    for name in manifest["outputs"]:
        print(f"wrote {Path(args.out) / name}")
    print(f"wrote {Path(args.out) / 'manifest.json'}")
    return 0


_COMMANDS = {
    "mmdist": (_cmd_mmdist, "transport and Prokhorov distances between two measures"),
    "obsdiam": (_cmd_obsdiam, "observable diameters of one space at several alphas"),
    "levy-scan": (_cmd_levy_scan, "observable-diameter decay across a family of spaces"),
    "invariance-defect": (_cmd_invariance_defect, "transport defects of group translations"),
    "flow-check": (_cmd_flow_check, "orbit displacement bound reports for group flows"),
    "concentrate": (_cmd_concentrate, "convergence diagnostics for a sequence of quotient maps"),
    "generate": (_cmd_generate, "expand a generator spec into explicit JSON tables"),
    "run": (_cmd_run, "run a built-in scenario"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmconc",
        description="metric measure space and group flow toolkit",
    )
    parser.add_argument("--version", action="version", version=f"mmconc {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (handler, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        if name == "run":
            p.add_argument("--scenario", required=True, choices=scenario_names())
        else:
            p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--oracle", action="store_true", help="use the exact small-space optimizer")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold those into the config-error code
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except PartialFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        for name, msg in exc.failures:
            print(f"  {name}: {msg}", file=sys.stderr)
        return 3
    except (ConfigError, UnknownGenerator, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MmconcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
