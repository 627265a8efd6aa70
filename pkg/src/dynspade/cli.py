"""Command line interface.

Subcommands:

* fi-curve        information versus separation for one motion scenario
* limit           small-separation limits for offset axes and star pairs
* oscillation     the three oscillating-separation variants side by side
* compare-direct  mode sorting versus ideal direct imaging
* simulate        draw one experiment's worth of photon counts
* estimate        repeated maximum likelihood runs against the bound
* check           built-in numerical health and reference-value checks

Scenario and geometry can be given as flags or collected in a TOML file
passed with --config; flags win over file values.  Tabular output is CSV
(first line ``# dynspade-table v1``) or JSON (``dynspade-json v1``); both
are deterministic byte-for-byte for a given invocation.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical health
failure, 3 reference-value mismatch from ``check``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .direct_imaging import ImagingGrid, di_fisher_information
from .dynamics import (
    DynamicsModel,
    QuadratureConvergenceError,
    QuadratureSpec,
    SeparationOscillation,
    Static,
    model_from_dict,
)
from .fisher import (
    NumericalHealthError,
    StarPair,
    asymptotic_fi,
    derivative_consistency,
    fisher_information,
    small_separation_limit,
)
from .modes import SourceGeometry, hg_mode_amplitude, mode_indices, static_mode_probabilities
from .montecarlo import ExperimentConfig, crb_consistency, sample_counts

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HEALTH = 2
EXIT_CHECK = 3

CSV_HEADER = "# dynspade-table v1"
JSON_FORMAT = "dynspade-json v1"

SCENARIO_KINDS = (
    "static",
    "phi-rotation",
    "phi-oscillation",
    "theta-rotation",
    "uniform-sphere",
    "custom-density",
    "oscillation-proportional",
    "oscillation-fixed",
)


class UsageError(Exception):
    """Bad flag combination or configuration content."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# configuration assembly
# ---------------------------------------------------------------------------


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config file {path} is not valid TOML: {exc}")


def _pick(flag_value, table: dict, key: str, default):
    """Flag beats config file beats default."""
    if flag_value is not None:
        return flag_value
    if key in table:
        return table[key]
    return default


def _scenario_dict(args, config) -> dict:
    table = dict(config.get("scenario", {}))
    kind = _pick(getattr(args, "scenario", None), table, "kind", "static")
    if kind not in SCENARIO_KINDS:
        raise UsageError(f"unknown scenario kind {kind!r}; choose from {', '.join(SCENARIO_KINDS)}")
    spec = {"kind": kind}
    for key in ("theta", "phi", "period", "a1", "a2"):
        val = _pick(getattr(args, key, None), table, key, None)
        if val is not None:
            spec[key] = float(val)
    if "density-table" in table:
        spec["density-table"] = table["density-table"]
    return spec


def _build_model(spec: dict) -> DynamicsModel:
    try:
        return model_from_dict(spec)
    except ValueError as exc:
        raise UsageError(str(exc))


def _geometry(args, config, x: float = None) -> SourceGeometry:
    table = dict(config.get("geometry", {}))
    w = float(_pick(getattr(args, "w", None), table, "w", 1.0))
    v = float(_pick(getattr(args, "v", None), table, "v", 0.5))
    xi = float(_pick(getattr(args, "xi", None), table, "xi", 0.0))
    if x is None:
        d_flag = getattr(args, "d", None)
        x_flag = getattr(args, "x", None)
        if d_flag is not None and x_flag is not None:
            raise UsageError("give either --d or --x, not both")
        if d_flag is not None:
            d = float(d_flag)
        elif x_flag is not None:
            d = 2.0 * w * float(x_flag)
        elif "d" in table and "x" in table:
            raise UsageError("config [geometry] sets both d and x; keep one")
        elif "d" in table:
            d = float(table["d"])
        elif "x" in table:
            d = 2.0 * w * float(table["x"])
        else:
            raise UsageError("no separation given; pass --d or --x (or set [geometry] in the config)")
    else:
        d = 2.0 * w * x
    try:
        return SourceGeometry(d=d, w=w, v=v, xi=xi)
    except ValueError as exc:
        raise UsageError(str(exc))


def _quadrature(args, config) -> QuadratureSpec:
    table = dict(config.get("quadrature", {}))
    nodes = int(_pick(getattr(args, "quad_nodes", None), table, "nodes", 256))
    tol = float(_pick(getattr(args, "quad_tol", None), table, "tol", 1e-10))
    dbl = int(_pick(None, table, "max-doublings", 3))
    try:
        return QuadratureSpec(nodes=nodes, tol=tol, max_doublings=dbl)
    except ValueError as exc:
        raise UsageError(str(exc))


def _sweep(args, config, default_min, default_max, default_points, default_spacing="log"):
    table = dict(config.get("sweep", {}))
    lo = float(_pick(getattr(args, "x_min", None), table, "x-min", default_min))
    hi = float(_pick(getattr(args, "x_max", None), table, "x-max", default_max))
    pts = int(_pick(getattr(args, "points", None), table, "points", default_points))
    spacing = _pick(getattr(args, "spacing", None), table, "spacing", default_spacing)
    if not 0 <= lo < hi:
        raise UsageError("sweep needs 0 <= x-min < x-max")
    if pts < 2:
        raise UsageError("sweep needs at least 2 points")
    if spacing == "log":
        if lo <= 0:
            raise UsageError("log spacing needs x-min > 0")
        return np.geomspace(lo, hi, pts)
    if spacing == "linear":
        return np.linspace(lo, hi, pts)
    raise UsageError(f"unknown spacing {spacing!r}; use 'log' or 'linear'")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _emit(args, config, columns, rows, meta=None):
    table = dict(config.get("output", {}))
    fmt = _pick(getattr(args, "format", None), table, "format", "csv")
    path = _pick(getattr(args, "out", None), table, "path", None)
    if fmt == "csv":
        lines = [CSV_HEADER, ",".join(columns)]
        for row in rows:
            lines.append(",".join(_format_cell(cell) for cell in row))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = {"format": JSON_FORMAT, "columns": list(columns), "rows": [list(r) for r in rows]}
        if meta:
            payload["meta"] = meta
        text = json.dumps(payload, sort_keys=True) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}; use 'csv' or 'json'")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _format_cell(cell):
    if isinstance(cell, bool):
        return "1" if cell else "0"
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    if isinstance(cell, float):
        return f"{cell:.9g}"
    return str(cell)


def _emit_json_object(args, config, payload: dict):
    table = dict(config.get("output", {}))
    path = _pick(getattr(args, "out", None), table, "path", None)
    payload = dict(payload)
    payload["format"] = JSON_FORMAT
    text = json.dumps(payload, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# sweep workers (top level so they survive pickling for --jobs)
# ---------------------------------------------------------------------------


def _fi_point(task):
    (spec, x, w, v, xi, cutoff, kind, overflow, qnodes, qtol, qdbl) = task
    model = model_from_dict(spec)
    g = SourceGeometry(d=2.0 * w * x, w=w, v=v, xi=xi)
    quad = QuadratureSpec(nodes=qnodes, tol=qtol, max_doublings=qdbl)
    res = fisher_information(
        g, model, cutoff=cutoff, quad=quad, cutoff_kind=kind, overflow=overflow
    )
    w2 = w * w
    per_mode = tuple(w2 * res.per_mode[mi] for mi in sorted(res.per_mode))
    return res.scaled(), per_mode


def _compare_point(task):
    (spec, x, w, v, xi, cutoff, kind, qnodes, qtol, qdbl, grid_nodes) = task
    model = model_from_dict(spec)
    g = SourceGeometry(d=2.0 * w * x, w=w, v=v, xi=xi)
    quad = QuadratureSpec(nodes=qnodes, tol=qtol, max_doublings=qdbl)
    spade = fisher_information(g, model, cutoff=cutoff, quad=quad, cutoff_kind=kind).scaled()
    imaging = di_fisher_information(model, g, grid=ImagingGrid(nodes=grid_nodes)) * g.w**2
    return spade, imaging


def _map_tasks(worker, tasks, jobs):
    if jobs <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_fi_curve(args):
    config = _load_config(args.config)
    spec = _scenario_dict(args, config)
    _build_model(spec)  # validate before the sweep
    quad = _quadrature(args, config)
    xs = _sweep(args, config, 1e-3, 2.0, 200)
    table = dict(config.get("geometry", {}))
    w = float(_pick(args.w, table, "w", 1.0))
    v = float(_pick(args.v, table, "v", 0.5))
    xi = float(_pick(args.xi, table, "xi", 0.0))
    tasks = [
        (spec, float(x), w, v, xi, args.modes, args.cutoff_kind, args.overflow,
         quad.nodes, quad.tol, quad.max_doublings)
        for x in xs
    ]
    vals = _map_tasks(_fi_point, tasks, args.jobs)
    modes = mode_indices(args.modes, args.cutoff_kind)
    columns = ("x", "d") + tuple(f"w2_fi_{mi.n}_{mi.m}" for mi in sorted(modes)) + ("w2_fi",)
    rows = [
        (float(x), 2.0 * w * float(x)) + per_mode + (total,)
        for x, (total, per_mode) in zip(xs, vals)
    ]
    _emit(args, config, columns, rows, meta={"scenario": spec["kind"], "modes": args.modes})
    return EXIT_OK


def _cmd_limit(args):
    config = _load_config(args.config)
    if args.m1 is not None or args.m2 is not None:
        if args.m1 is None or args.m2 is None:
            raise UsageError("star mode needs both --m1 and --m2")
        pair = StarPair(args.m1, args.m2, exponent=args.exponent)
        rows = [(pair.m1, pair.m2, pair.kappa, pair.v, small_separation_limit(pair.kappa, pair.v, args.c))]
        _emit(args, config, ("m1", "m2", "kappa", "v", "limit"), rows)
        return EXIT_OK
    if args.mass_ratio_min is not None or args.mass_ratio_max is not None:
        lo = args.mass_ratio_min if args.mass_ratio_min is not None else 1.0
        hi = args.mass_ratio_max if args.mass_ratio_max is not None else 2.0
        if not 0 < lo < hi:
            raise UsageError("mass-ratio sweep needs 0 < min < max")
        ratios = np.linspace(lo, hi, args.points if args.points else 50)
        rows = []
        for r in ratios:
            pair = StarPair(float(r), 1.0, exponent=args.exponent)
            rows.append((float(r), pair.kappa, pair.v, small_separation_limit(pair.kappa, pair.v, args.c)))
        _emit(args, config, ("mass_ratio", "kappa", "v", "limit"), rows)
        return EXIT_OK
    lo = args.kappa_min if args.kappa_min is not None else -0.9
    hi = args.kappa_max if args.kappa_max is not None else 0.9
    if not -1.0 < lo < hi < 1.0:
        raise UsageError("kappa sweep needs -1 < min < max < 1")
    kappas = np.linspace(lo, hi, args.points if args.points else 50)
    v = args.v if args.v is not None else 0.5
    rows = [(float(k), v, small_separation_limit(float(k), v, args.c)) for k in kappas]
    _emit(args, config, ("kappa", "v", "limit"), rows)
    return EXIT_OK


def _cmd_oscillation(args):
    config = _load_config(args.config)
    quad = _quadrature(args, config)
    xs = _sweep(args, config, 1e-3, 0.5, 80)
    a1 = args.a1 if args.a1 is not None else 0.25
    a2 = args.a2 if args.a2 is not None else 0.1
    if not 0 < a1 < 1:
        raise UsageError("a1 must lie in (0, 1)")
    if not a2 > 0:
        raise UsageError("a2 must be positive")
    if xs[0] <= 0:
        raise UsageError("oscillation sweep needs x > 0 (the scaled variant has amplitude a1*x)")
    table = dict(config.get("geometry", {}))
    w = float(_pick(args.w, table, "w", 1.0))
    rows = []
    for x in xs:
        x = float(x)
        g = SourceGeometry(d=2.0 * w * x, w=w)
        prop = SeparationOscillation.proportional(a1)
        scaled = SeparationOscillation.fixed_amplitude(a1 * x)
        fixed = SeparationOscillation.fixed_amplitude(a2)
        fp = fisher_information(g, prop, cutoff=args.modes, quad=quad).scaled()
        fs = fisher_information(g, scaled, cutoff=args.modes, quad=quad).scaled()
        ff = fisher_information(g, fixed, cutoff=args.modes, quad=quad).scaled()
        rows.append((x, fp, fs, ff, fixed.interchanges(x)))
    _emit(
        args,
        config,
        ("x", "w2_fi_proportional", "w2_fi_scaled", "w2_fi_fixed", "interchange"),
        rows,
        meta={"a1": a1, "a2": a2},
    )
    return EXIT_OK


def _cmd_compare_direct(args):
    config = _load_config(args.config)
    spec = _scenario_dict(args, config)
    model = _build_model(spec)
    quad = _quadrature(args, config)
    xs = _sweep(args, config, 0.02, 0.6, 40, default_spacing="linear")
    table = dict(config.get("geometry", {}))
    w = float(_pick(args.w, table, "w", 1.0))
    v = float(_pick(args.v, table, "v", 0.5))
    xi = float(_pick(args.xi, table, "xi", 0.0))
    # spot-check the imaging grid before burning time on the sweep
    mid = float(xs[len(xs) // 2])
    g_mid = SourceGeometry(d=2.0 * w * mid, w=w, v=v, xi=xi)
    di_fisher_information(model, g_mid, grid=ImagingGrid(nodes=args.grid_nodes), check_grid=True)
    di_quad = QuadratureSpec(nodes=min(quad.nodes, 64), tol=max(quad.tol, 1e-8), max_doublings=quad.max_doublings)
    tasks = [
        (spec, float(x), w, v, xi, args.modes, args.cutoff_kind,
         di_quad.nodes, di_quad.tol, di_quad.max_doublings, args.grid_nodes)
        for x in xs
    ]
    pairs = _map_tasks(_compare_point, tasks, args.jobs)
    rows = []
    for x, (spade, imaging) in zip(xs, pairs):
        ratio = spade / imaging if imaging > 0 else math.inf
        rows.append((float(x), spade, imaging, ratio))
    _emit(
        args,
        config,
        ("x", "w2_fi_modes", "w2_fi_imaging", "ratio"),
        rows,
        meta={"scenario": spec["kind"], "modes": args.modes, "grid_nodes": args.grid_nodes},
    )
    return EXIT_OK


def _cmd_simulate(args):
    if args.n_photons < 0:
        raise UsageError("n-photons must be >= 0")
    config = _load_config(args.config)
    spec = _scenario_dict(args, config)
    model = _build_model(spec)
    g = _geometry(args, config)
    cfg = ExperimentConfig(cutoff=args.modes, cutoff_kind=args.cutoff_kind, overflow=args.overflow)
    rng = np.random.default_rng([args.seed, args.run_index])
    counts = sample_counts(model, g, args.n_photons, rng, cfg)
    payload = {
        "scenario": spec["kind"],
        "d": g.d,
        "w": g.w,
        "v": g.v,
        "xi": g.xi,
        "n_photons": counts.total,
        "seed": args.seed,
        "run_index": args.run_index,
        "modes": args.modes,
        "counts": {f"{mi.n},{mi.m}": c for mi, c in counts.counts.items()},
        "overflow": counts.overflow,
    }
    table = dict(config.get("output", {}))
    fmt = _pick(args.format, table, "format", "json")
    if fmt == "csv":
        rows = [(mi.n, mi.m, c) for mi, c in sorted(counts.counts.items())]
        rows.append(("overflow", "", counts.overflow))
        _emit(args, config, ("n", "m", "count"), rows)
    else:
        _emit_json_object(args, config, payload)
    return EXIT_OK


def _cmd_estimate(args):
    if args.n_photons < 1:
        raise UsageError("n-photons must be positive")
    if args.runs < 1:
        raise UsageError("runs must be positive")
    config = _load_config(args.config)
    spec = _scenario_dict(args, config)
    model = _build_model(spec)
    g = _geometry(args, config)
    cfg = ExperimentConfig(cutoff=args.modes, cutoff_kind=args.cutoff_kind, overflow=args.overflow)
    report = crb_consistency(
        model, g, n_photons=args.n_photons, runs=args.runs, seed=args.seed, config=cfg
    )
    table = dict(config.get("output", {}))
    fmt = _pick(args.format, table, "format", "json")
    if fmt == "csv":
        d = report.to_dict()
        cols = ("scenario", "N", "R", "seed", "d_true", "d_hat_mean", "d_hat_std",
                "crb", "crb_truncated", "efficiency", "flags")
        rows = [tuple(";".join(d[c]) if c == "flags" else d[c] for c in cols)]
        _emit(args, config, cols, rows)
    else:
        _emit_json_object(args, config, report.to_dict())
    return EXIT_OK


def _cmd_check(args):
    failures = []

    def ok(name, got, want, tol):
        good = abs(got - want) <= tol
        status = "ok" if good else "FAIL"
        print(f"{status} - {name}: {got:.12g} (expected {want:.12g}, tol {tol:g})")
        if not good:
            failures.append(name)

    # reference values recomputed from scratch
    ok("fundamental mode peak", hg_mode_amplitude(0, 0, (0.0, 0.0)),
       math.sqrt(2.0 / math.pi), 1e-12)
    g5 = SourceGeometry(d=1.0)
    ok("static first-mode probability at x=0.5",
       static_mode_probabilities(g5, cutoff=1)[(1, 0)], 0.19470019576785122, 1e-12)
    from .dynamics import PhiRotation, UniformSphere

    rot = PhiRotation.constant_rate()
    g2 = SourceGeometry(d=0.4)
    ok("rotating information at x=0.2",
       fisher_information(g2, rot).scaled(), asymptotic_fi("phi-rotation", 0.2), 1e-9)
    gs = SourceGeometry(d=2e-3)
    ok("spinning-axis small-x limit",
       fisher_information(gs, UniformSphere(), quad=QuadratureSpec(nodes=32)).scaled(),
       2.0 / 3.0, 5e-3)
    ok("star-pair limit", small_separation_limit(*__star()), 0.9923195739923708, 1e-9)

    # numerical health
    try:
        gap = derivative_consistency(g2, rot)
        print(f"ok - analytic/finite-difference agreement: gap {gap:.2e}")
        di_fisher_information(rot, g2, grid=ImagingGrid(nodes=120), check_grid=True)
        print("ok - imaging grid convergence")
    except (NumericalHealthError, QuadratureConvergenceError) as exc:
        print(f"FAIL - numerical health: {exc}")
        return EXIT_HEALTH

    if failures:
        print(f"{len(failures)} reference check(s) failed")
        return EXIT_CHECK
    print("all checks passed")
    return EXIT_OK


def __star():
    pair = StarPair(1.2, 1.0)
    return pair.kappa, pair.v


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def _add_common(p, seed=False):
    p.add_argument("--config", help="TOML file with scenario/geometry/sweep/output tables")
    p.add_argument("--out", help="write output to this path instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--modes", type=int, default=1, help="mode cutoff M (default 1)")
    p.add_argument("--cutoff-kind", choices=("per-index", "total-order"), default="per-index")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    if seed:
        p.add_argument("--seed", type=int, default=0)


def _add_scenario_flags(p):
    p.add_argument("--scenario", choices=SCENARIO_KINDS, help="motion model kind")
    p.add_argument("--theta", type=float, help="inclination (radians)")
    p.add_argument("--phi", type=float, help="azimuth (radians)")
    p.add_argument("--period", type=float, help="motion period")
    p.add_argument("--a1", type=float, help="proportional oscillation amplitude")
    p.add_argument("--a2", type=float, help="fixed oscillation amplitude (units of w)")


def _add_geometry_flags(p, separation=True):
    if separation:
        p.add_argument("--d", type=float, help="source separation")
        p.add_argument("--x", type=float, help="reduced separation d / 2w")
    p.add_argument("--w", type=float, help="beam width (default 1)")
    p.add_argument("--v", type=float, help="brightness share of the first source")
    p.add_argument("--xi", type=float, help="axis-point offset (units of w)")


def _add_quad_flags(p):
    p.add_argument("--quad-nodes", type=int, help="starting quadrature nodes")
    p.add_argument("--quad-tol", type=float, help="quadrature refinement tolerance")


def _add_sweep_flags(p):
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--spacing", choices=("log", "linear"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dynspade", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fi-curve", help="information versus separation")
    _add_common(p)
    _add_scenario_flags(p)
    _add_geometry_flags(p, separation=False)
    _add_quad_flags(p)
    _add_sweep_flags(p)
    p.add_argument("--overflow", choices=("exclude", "include", "condition"), default="exclude")
    p.set_defaults(func=_cmd_fi_curve)

    p = sub.add_parser("limit", help="small-separation limits")
    _add_common(p)
    p.add_argument("--kappa-min", type=float)
    p.add_argument("--kappa-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--v", type=float, help="brightness share")
    p.add_argument("--c", type=float, default=1.0, help="motion coefficient")
    p.add_argument("--m1", type=float, help="first mass (star mode)")
    p.add_argument("--m2", type=float, help="second mass (star mode)")
    p.add_argument("--mass-ratio-min", type=float)
    p.add_argument("--mass-ratio-max", type=float)
    p.add_argument("--exponent", type=float, default=4.0, help="luminosity-mass exponent")
    p.set_defaults(func=_cmd_limit)

    p = sub.add_parser("oscillation", help="oscillating-separation variants")
    _add_common(p)
    _add_geometry_flags(p, separation=False)
    _add_quad_flags(p)
    _add_sweep_flags(p)
    p.add_argument("--a1", type=float, help="proportional amplitude (default 0.25)")
    p.add_argument("--a2", type=float, help="fixed amplitude (default 0.1)")
    p.set_defaults(func=_cmd_oscillation)

    p = sub.add_parser("compare-direct", help="mode sorting versus direct imaging")
    _add_common(p)
    _add_scenario_flags(p)
    _add_geometry_flags(p, separation=False)
    _add_quad_flags(p)
    _add_sweep_flags(p)
    p.add_argument("--grid-nodes", type=int, default=120, help="imaging grid nodes per axis")
    p.set_defaults(func=_cmd_compare_direct)

    p = sub.add_parser("simulate", help="draw photon counts for one experiment")
    _add_common(p, seed=True)
    _add_scenario_flags(p)
    _add_geometry_flags(p)
    p.add_argument("--n-photons", type=int, default=100_000)
    p.add_argument("--run-index", type=int, default=0)
    p.add_argument("--overflow", choices=("include", "discard"), default="include")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="repeated MLE runs against the bound")
    _add_common(p, seed=True)
    _add_scenario_flags(p)
    _add_geometry_flags(p)
    p.add_argument("--n-photons", type=int, default=100_000)
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--overflow", choices=("include", "discard"), default="include")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("check", help="numerical health and reference values")
    p.set_defaults(func=_cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dynspade: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalHealthError as exc:
        print(f"dynspade: numerical health failure: {exc}", file=sys.stderr)
        return EXIT_HEALTH
    except QuadratureConvergenceError as exc:
        print(f"dynspade: numerical health failure: {exc}", file=sys.stderr)
        return EXIT_HEALTH


if __name__ == "__main__":
    sys.exit(main())
