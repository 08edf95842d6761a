"""Command-line driver: one command, one machine-readable report.

Every stochastic command requires an explicit --seed so published numbers are
reproducible; reports embed the full run configuration and a schema tag.
Output is JSON by default; tabular commands also emit CSV with --format csv.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .addresses import (
    PointAddress,
    chart_coordinate,
    format_fraction,
    is_vertex_point,
    project_point,
)
from .certificates import (
    affinity_factor,
    doubling_estimate,
    hellinger_affinity,
    pencil_sample,
    poincare_estimate,
    tv_distance,
    tv_lower_bound,
)
from .graphs import BudgetError, build_level, sweep_distances
from .measures import MeasureSpec, level_masses, level_records
from .selftest import run_selftest
from .stochastic import (
    empirical_rate,
    negativity_certificate,
    rate_trace,
    sample_path,
    slln_report,
    theoretical_rate,
    weight_grid,
)

SCHEMA = "diamondlim-report/1"


@dataclass
class RunConfig:
    """Everything needed to reproduce a run; embedded in every report."""

    command: str
    level: int | None = None
    w: float | None = None
    w2: float | None = None
    n: int | None = None
    samples: int | None = None
    trials: int | None = None
    seed: int | None = None
    stream: int | None = None
    lam: float | str | None = None
    roughness: float | None = None
    radii: list[str] | None = None
    grid: int | None = None
    lo: float | None = None
    hi: float | None = None
    count: int | None = None
    every: int | None = None
    word: str | None = None
    offset: str | None = None
    to_level: int | None = None
    export_json: str | None = None
    export_csv: str | None = None
    sweeps: int | None = None
    fmt: str = "json"
    out: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _emit(config: RunConfig, result: dict, rows=None, header=None) -> None:
    if config.fmt == "csv":
        if rows is None:
            raise ValueError(f"command {config.command!r} has no CSV table; use --format json")
        buf = io.StringIO()
        buf.write("# config: " + json.dumps(config.to_dict()) + "\n")
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(rows)
        _write(buf.getvalue(), config.out)
    else:
        report = {
            "schema": SCHEMA,
            "command": config.command,
            "config": config.to_dict(),
            "result": result,
        }
        _write(json.dumps(report, indent=2) + "\n", config.out)


# --------------------------------------------------------------------------
# subcommands


def _cmd_build(args) -> int:
    config = _config_from(args)
    g = build_level(args.level)
    if args.export_json:
        with open(args.export_json, "w") as fh:
            g.export_json(fh)
    if args.export_csv:
        with open(args.export_csv, "w") as fh:
            g.export_csv(fh)
    result = {
        "level": g.level,
        "n_vertices": g.n_vertices,
        "n_edges": g.n_edges,
        "edge_length": format_fraction(g.edge_len),
    }
    _emit(config, result)
    return 0


def _cmd_measure(args) -> int:
    config = _config_from(args)
    m = MeasureSpec(args.w)
    rows = [(r.word, repr(r.density), repr(r.mass)) for r in level_records(args.level, m)]
    total = float(level_masses(args.level, m).sum())
    result = {
        "level": args.level,
        "w": m.w,
        "n_edges": len(rows),
        "total_mass": total,
    }
    if len(rows) <= 6**5:
        result["edges"] = [
            {"word": w, "density": float(d), "mass": float(mass)} for w, d, mass in rows
        ]
    else:
        result["edges"] = None
        result["note"] = "table too large for JSON embedding; use --format csv"
    _emit(config, result, rows=rows, header=["word", "density", "mass"])
    return 0


def _cmd_project(args) -> int:
    config = _config_from(args)
    p = PointAddress(args.word, Fraction(args.offset))
    q = project_point(p, args.to_level)
    result = {
        "input": p.to_json(),
        "to_level": args.to_level,
        "projected": q.to_json(),
        "chart": format_fraction(chart_coordinate(p)),
        "chart_float": float(chart_coordinate(p)),
        "is_vertex_point": is_vertex_point(p),
    }
    _emit(config, result)
    return 0


def _cmd_sample(args) -> int:
    config = _config_from(args)
    path = sample_path(args.seed, MeasureSpec(args.w), args.n, stream=args.stream)
    rows_d = slln_report(path)
    rows = [
        (r["digit"], r["count"], repr(r["frequency"]), repr(r["limit"]), repr(r["deviation"]))
        for r in rows_d
    ]
    result = {"n": path.n, "w": path.w, "table": rows_d}
    _emit(config, result, rows=rows, header=["digit", "count", "frequency", "limit", "deviation"])
    return 0


def _cmd_rate(args) -> int:
    config = _config_from(args)
    m, m2 = MeasureSpec(args.w), MeasureSpec(args.w2)
    path = sample_path(args.seed, m2, args.n, stream=args.stream)
    trace = rate_trace(path, m, m2, every=args.every)
    theo = theoretical_rate(m, m2)
    final = empirical_rate(path, m, m2)
    rows = [(r["n"], repr(r["empirical_rate"]), repr(r["theoretical_rate"])) for r in trace]
    result = {
        "w": m.w,
        "w2": m2.w,
        "n": path.n,
        "theoretical_rate": theo,
        "final_empirical_rate": final,
        "abs_error": abs(final - theo),
        "trace": trace,
    }
    _emit(config, result, rows=rows, header=["n", "empirical_rate", "theoretical_rate"])
    return 0


def _cmd_tv(args) -> int:
    config = _config_from(args)
    value = tv_distance(args.level, args.w, args.w2)
    result = {
        "level": args.level,
        "w": args.w,
        "w2": args.w2,
        "tv_distance": value,
        "lower_bound": tv_lower_bound(args.level, args.w, args.w2),
        "rho": affinity_factor(args.w, args.w2),
    }
    _emit(config, result)
    return 0


def _cmd_affinity(args) -> int:
    config = _config_from(args)
    exhaustive = hellinger_affinity(args.level, args.w, args.w2)
    rho = affinity_factor(args.w, args.w2)
    result = {
        "level": args.level,
        "w": args.w,
        "w2": args.w2,
        "affinity": exhaustive,
        "closed_form": rho**args.level,
        "residual": abs(exhaustive - rho**args.level),
        "rho": rho,
    }
    _emit(config, result)
    return 0


def _cmd_negativity(args) -> int:
    config = _config_from(args)
    report = negativity_certificate(weight_grid(args.grid, args.lo, args.hi))
    _emit(config, report.to_json())
    if not report.all_negative:
        sys.stderr.write(
            f"negativity certificate FAILED: {len(report.failures)} nonnegative rates\n"
        )
        return 1
    return 0


def _cmd_doubling(args) -> int:
    config = _config_from(args)
    g = build_level(args.level)
    radii = [Fraction(r) for r in args.radii] if args.radii else None
    report = doubling_estimate(g, args.w, samples=args.samples, radii=radii, seed=args.seed)
    _emit(config, report.to_json())
    return 0


def _cmd_poincare(args) -> int:
    config = _config_from(args)
    g = build_level(args.level)
    radii = [Fraction(r) for r in args.radii] if args.radii else None
    report = poincare_estimate(
        g,
        args.w,
        trials=args.trials,
        lam=Fraction(args.lam),
        seed=args.seed,
        roughness=args.roughness,
        radii=radii,
    )
    _emit(config, report.to_json())
    return 0


def _cmd_pencil(args) -> int:
    config = _config_from(args)
    curves = [pencil_sample(args.seed + i, args.w, args.level) for i in range(args.count)]
    top_first = sum(1 for c in curves if c.level > 0 and bool(c.choices[0][0])) / max(len(curves), 1)
    first = curves[0]
    result = {
        "level": args.level,
        "w": args.w,
        "count": args.count,
        "edges_per_curve": int(first.edge_indices.size),
        "curve_length": format_fraction(first.length),
        "first_diamond_top_frequency": top_first,
        "first_curve_words": first.edge_words() if args.level <= 3 else None,
    }
    _emit(config, result)
    return 0


def _cmd_selftest(args) -> int:
    config = _config_from(args)
    results = run_selftest()
    payload = [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results]
    failed = [r.name for r in results if not r.ok]
    _emit(config, {"checks": payload, "failed": failed, "ok": not failed})
    if failed:
        sys.stderr.write("selftest FAILED: " + ", ".join(failed) + "\n")
        return 1
    return 0


def _cmd_bench(args) -> int:
    config = _config_from(args)
    g = build_level(args.level)
    rng = np.random.default_rng(args.seed)
    centers = [
        PointAddress(g.edge_word(int(rng.integers(g.n_edges))), Fraction(int(rng.integers(64)), 64) * g.edge_len)
        for _ in range(args.sweeps)
    ]
    radius = Fraction(1, 4)
    timings: dict[str, float] = {}
    reference = None
    agree = True
    for name, kernel in kernels.backends().items():
        saved = kernels.bounded_dijkstra
        kernels.bounded_dijkstra = kernel
        try:
            t0 = time.perf_counter()
            sums = []
            for c in centers:
                dist, _ = sweep_distances(g, c, radius)
                sums.append(int(dist[dist >= 0].sum()))
            timings[name] = (time.perf_counter() - t0) / args.sweeps
        finally:
            kernels.bounded_dijkstra = saved
        if reference is None:
            reference = sums
        elif sums != reference:
            agree = False
    result = {
        "level": args.level,
        "sweeps": args.sweeps,
        "active_backend": kernels.BACKEND,
        "seconds_per_sweep": timings,
        "speedup": (timings["pure"] / timings["compiled"]) if "compiled" in timings else None,
        "backends_agree": agree,
    }
    _emit(config, result)
    return 0 if agree else 1


# --------------------------------------------------------------------------
# wiring


def _config_from(args) -> RunConfig:
    known = {f.name for f in RunConfig.__dataclass_fields__.values()}
    data = {k: v for k, v in vars(args).items() if k in known and v is not None}
    data["command"] = args.command
    data["fmt"] = getattr(args, "fmt", "json")
    return RunConfig(**data)


def _add_output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help="write the report to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diamondlim",
        description="Diamond-graph towers, their measures, and numerical certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a level graph and report its size")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--export-json", default=None)
    p.add_argument("--export-csv", default=None)
    _add_output_options(p)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("measure", help="per-edge density/mass table for one level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    _add_output_options(p)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("project", help="project an address and report its chart position")
    p.add_argument("--word", required=True)
    p.add_argument("--offset", default="0", help='exact fraction, e.g. "1/32"')
    p.add_argument("--to-level", type=int, default=0)
    _add_output_options(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("sample", help="digit frequencies of a sampled path vs their limits")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stream", type=int, default=None)
    _add_output_options(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("rate", help="empirical vs theoretical log density-ratio rate")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--w2", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--stream", type=int, default=None)
    p.add_argument("--every", type=int, default=1000)
    _add_output_options(p)
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("tv", help="total variation between level marginals")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--w2", type=float, required=True)
    _add_output_options(p)
    p.set_defaults(func=_cmd_tv)

    p = sub.add_parser("affinity", help="exhaustive Hellinger affinity vs closed form")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--w2", type=float, required=True)
    _add_output_options(p)
    p.set_defaults(func=_cmd_affinity)

    p = sub.add_parser("negativity", help="rate negativity certificate on a weight grid")
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--lo", type=float, default=0.02)
    p.add_argument("--hi", type=float, default=0.98)
    _add_output_options(p)
    p.set_defaults(func=_cmd_negativity)

    p = sub.add_parser("doubling", help="max doubling ratio over sampled balls")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--radii", nargs="*", default=None, help='fractions, e.g. 1/16 3/32')
    _add_output_options(p)
    p.set_defaults(func=_cmd_doubling)

    p = sub.add_parser("poincare", help="max averaged-oscillation ratio over random trials")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--lam", default="2", help="ball dilation for the gradient average")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--roughness", type=float, default=0.25)
    p.add_argument("--radii", nargs="*", default=None)
    _add_output_options(p)
    p.set_defaults(func=_cmd_poincare)

    p = sub.add_parser("pencil", help="sample monotone geodesics weighted by w")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    _add_output_options(p)
    p.set_defaults(func=_cmd_pencil)

    p = sub.add_parser("selftest", help="run the exact-identity suite")
    _add_output_options(p)
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("bench", help="compare the compiled and pure distance kernels")
    p.add_argument("--level", type=int, default=5)
    p.add_argument("--sweeps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    _add_output_options(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        sys.stderr.write(f"resource error: {exc}\n")
        return 3
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
