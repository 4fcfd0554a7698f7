"""Command-line entry point: run scenarios, parameter scans, spectral
analysis and engine benchmarks from declarative JSON configs, writing CSV
results plus a JSON manifest that fully determines a re-run.

Exit codes: 0 success, 2 invalid configuration (message names the offending
field), 3 runtime numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .linalg import DefectiveMatrixError, eig_biorthogonal
from .liouville import lep_detect, liouvillian_spectrum, period_average, \
    composite_log_generator, vectorize
from .scenarios import (
    ConfigError,
    benchmark_map_vs_qme,
    build_setup,
    merge_config,
    qme_generators,
    run_scenario,
    slot_manifest,
    _scan_point,
)


def fmt(x):
    """Full round-trip precision for floats; strings pass through."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float) or isinstance(x, np.floating):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv_column(path, name):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        idx = header.index(name)
        return [line.strip().split(",")[idx] for line in fh if line.strip()]


def trajectory_rows(traj):
    names = list(traj.observables)
    header = ["step", "t", "trace"] + names
    cols = [traj.steps, traj.times, traj.traces] + [traj.observables[n] for n in names]
    rows = [tuple(col[k] for col in cols) for k in range(len(traj.steps))]
    return header, rows


def write_manifest(path, cfg, engine, slots, wall_time, extra=None):
    doc = {
        "version": __version__,
        "engine": engine,
        "wall_time_s": wall_time,
        "config": cfg,
        "slots": slots,
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, default=lambda o: float(o))


def load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}")


def cmd_run(args):
    cfg = load_config(args.config)
    if args.engine:
        cfg["engine"] = args.engine
    cfg = merge_config(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.get("name", cfg["scenario"])

    t0 = time.time()
    results = run_scenario(cfg)
    wall = time.time() - t0

    engines = ("collision", "qme") if cfg["engine"] == "both" else (cfg["engine"],)
    if len(engines) == 1:
        header, rows = trajectory_rows(results[engines[0]])
        write_csv(out / f"{name}_traj.csv", header, rows)
    else:
        for eng in engines:
            header, rows = trajectory_rows(results[eng])
            write_csv(out / f"{name}_traj_{eng}.csv", header, rows)
        a, b = results["collision"], results["qme"]
        names = [n for n in a.observables
                 if n != "c12" and not np.all(np.isnan(a.observables[n]))]
        header = ["step", "t"] + [f"dev_{n}" for n in names]
        rows = []
        for k in range(len(a.steps)):
            rows.append(tuple([a.steps[k], a.times[k]] + [
                abs(a.observables[n][k] - b.observables[n][k]) for n in names]))
        write_csv(out / f"{name}_dev.csv", header, rows)

    if "g2" in results:
        header = ["n_base", "lag_steps", "tau", "pair", "value"]
        rows = []
        t_bar = cfg["schedule"]["t_bar"]
        for curve in results["g2"]:
            pair = f"{curve.pair[0]}{curve.pair[1]}"
            for lag, val in zip(curve.lags, curve.values):
                rows.append((curve.n_base, lag, lag * t_bar, pair, val))
        write_csv(out / f"{name}_g2.csv", header, rows)

    extra = {}
    for key in ("c12_final", "amplitude_final", "flux", "population_ratio"):
        if key in results:
            extra[key] = results[key]
    write_manifest(out / f"{name}_manifest.json", cfg, cfg["engine"],
                   results["slots"], wall, extra)
    return 0


def cmd_scan(args):
    cfg = load_config(args.config)
    cfg = merge_config(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.get("name", cfg["scenario"])
    path = out / f"{name}_scan.csv"

    if "bench" in cfg and "scan" not in cfg:
        return cmd_bench(args)

    scan = cfg.get("scan") or {}
    phi0s = scan.get("phi0", [cfg["reservoir"]["phi0"]])
    betas = scan.get("beta")
    if betas is None and "T" in scan:
        betas = [1.0 / t if t > 0 else 50.0 for t in scan["T"]]
    if betas is None:
        betas = [cfg["reservoir"]["beta"]]
    steps = int(scan.get("steps", 50000))
    points = [(i, p, b) for i, (p, b) in enumerate(
        (p, b) for p in phi0s for b in betas)]

    done = set()
    existing = []
    if args.resume and path.exists():
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                if line.strip():
                    vals = line.strip().split(",")
                    done.add(int(vals[0]))
                    existing.append(line.strip())

    header = ["grid_index", "phi0", "beta", "temperature", "steps",
              "amplitude", "c12", "in_qs_region"]
    t0 = time.time()
    todo = [(i, p, b) for (i, p, b) in points if i not in done]
    rows = {}
    if args.workers > 1 and todo:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            for (i, _, _), row in zip(
                    todo, pool.map(_scan_point, [(cfg, p, b, steps) for (_, p, b) in todo])):
                rows[i] = row
    else:
        for (i, p, b) in todo:
            rows[i] = _scan_point((cfg, p, b, steps))
    threshold = float(scan.get("amplitude_threshold", 1e-3))

    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for line in existing:
            fh.write(line + "\n")
        for i in sorted(rows):
            r = rows[i]
            fh.write(",".join(fmt(v) for v in (
                i, r["phi0"], r["beta"], r["temperature"], r["steps"],
                r["amplitude"], r["c12"], r["amplitude"] > threshold)) + "\n")

    write_manifest(out / f"{name}_manifest.json", cfg, cfg["engine"], [],
                   time.time() - t0, {"points": len(points)})
    return 0


def cmd_spectrum(args):
    cfg = load_config(args.config)
    cfg = merge_config(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.get("name", cfg["scenario"])

    t0 = time.time()
    model, a_op, schedule, sector = build_setup(cfg)
    gens = qme_generators(cfg, model, schedule)   # spectrum of the bare system space
    mats = [vectorize(g) for g in gens]
    source = cfg.get("spectrum", {}).get("source", "period_average")
    if source == "composite":
        lm = composite_log_generator(mats, schedule.t_bar)
    else:
        lm = period_average(mats)
    tol_cluster = cfg.get("spectrum", {}).get("tol_cluster")
    scale = cfg.get("spectrum", {}).get("tol_cluster_scale")
    if tol_cluster is None and scale is not None:
        tol_cluster = float(scale) * float(np.linalg.norm(lm.matrix, 2))
    tol_rank = cfg.get("spectrum", {}).get("tol_rank", 1e-6)
    report = lep_detect(lm, tol_cluster=tol_cluster, tol_rank=tol_rank)
    values, _ = liouvillian_spectrum(lm)

    cluster_of = {}
    for ci, cluster in enumerate(report.clusters):
        for m in cluster.members:
            cluster_of[m] = (ci, cluster.geometric, cluster.lep_order)
    # liouvillian_spectrum ordering == member indexing used by lep_detect
    header = ["index", "re", "im", "cluster", "geometric_mult", "lep_order"]
    rows = []
    for k, val in enumerate(values):
        ci, geo, order = cluster_of[k]
        rows.append((k, val.real, val.imag, ci, geo, order))
    write_csv(out / f"{name}_spectrum.csv", header, rows)

    # reporting threshold is stricter than the library error default: flag
    # biorthogonal data as unreliable once ~half the digits are gone
    cond_threshold = float(cfg.get("spectrum", {}).get("cond_threshold", 1e8))
    defective = False
    try:
        eig_biorthogonal(lm.matrix, cond_threshold=cond_threshold)
    except DefectiveMatrixError:
        defective = True

    lep_doc = {
        "source": lm.source,
        "defective_biorthogonal": defective,
        "stationary_eigenvalue": bool(
            np.min(np.abs(values)) < 1e-8 * max(1.0, float(np.max(np.abs(values))))),
        "oscillation_pair": (
            [[report.oscillation_pair[0].real, report.oscillation_pair[0].imag],
             [report.oscillation_pair[1].real, report.oscillation_pair[1].imag]]
            if report.oscillation_pair else None),
        "clusters": [
            {"center_re": c.center.real, "center_im": c.center.imag,
             "algebraic": c.algebraic, "geometric": c.geometric,
             "lep_order": c.lep_order}
            for c in report.clusters
        ],
    }
    with open(out / f"{name}_lep.json", "w") as fh:
        json.dump(lep_doc, fh, indent=2)
    write_manifest(out / f"{name}_manifest.json", cfg, cfg["engine"],
                   slot_manifest(schedule), time.time() - t0)
    return 0


def cmd_bench(args):
    cfg = load_config(args.config)
    cfg = merge_config(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = cfg.get("name", cfg["scenario"])
    t0 = time.time()
    rows = benchmark_map_vs_qme(cfg)
    write_csv(out / f"{name}_bench.csv",
              ["parameter", "sweep_value", "steps", "max_dev"],
              [(r["parameter"], r["sweep_value"], r["steps"], r["max_dev"])
               for r in rows])
    write_manifest(out / f"{name}_manifest.json", cfg, "both", [],
                   time.time() - t0)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cbtsim",
        description="Collision-model thermalization simulator (hbar = k_B = 1; "
                    "time in units of inverse energy)")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, fn in (("run", cmd_run), ("scan", cmd_scan),
                    ("spectrum", cmd_spectrum), ("bench", cmd_bench)):
        p = sub.add_parser(cmd)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--engine", choices=["collision", "qme", "both"],
                       help="override the config engine")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--resume", action="store_true")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DefectiveMatrixError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
