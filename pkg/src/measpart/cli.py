"""Command line front end.

    measpart run SPEC -o DIR [--mode rational|float] [--bits] [--dump-normalized]
    measpart plotdata SPEC --task {isomorphism,square-chart,peano} --depth N

Exit codes: 0 success, 2 parse error, 3 semantic error, 4 depth limit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import conditional as cond
from . import entropy as ent
from . import measures as ms
from . import partitions as pt
from . import rokhlin as rk
from . import toral
from .runspec import PARSE, SEMANTIC, RunSpec, SpecError, check_depth, load
from .scalars import RATIONAL, fmt_decimal, fmt_exact, is_zero, zero
from .symbolic import Alphabet, make_cylinder, make_system, widen

PLOT_TASKS = ("isomorphism", "square-chart", "peano")


@dataclass
class Context:
    spec: RunSpec
    mode: str
    bits: bool
    system: object = None
    measures: dict = None
    partitions: dict = None


def build(spec: RunSpec, mode: str = RATIONAL, bits: bool = False) -> Context:
    ctx = Context(spec, mode, bits)
    s = spec.system
    try:
        ctx.system = make_system(Alphabet(tuple(s["alphabet"])), s.get("transition"), s["sidedness"])
    except ValueError as e:
        raise SpecError(f"system: {e}", SEMANTIC) from None
    ctx.measures = {}
    for name, m in spec.measures.items():
        try:
            if m["kind"] == "bernoulli":
                mu = ms.bernoulli(ctx.system, m["weights"], mode)
            elif m["kind"] == "markov":
                mu = ms.markov_measure(ctx.system, m["P"], m.get("p"), mode)
            else:
                mu = ms.table_measure(ctx.system, m["weights"], m["start"], mode)
        except (ValueError, KeyError) as e:
            raise SpecError(f"measures.{name}: {e}", SEMANTIC) from None
        ctx.measures[name] = mu
    ctx.partitions = {}
    for name, p in spec.partitions.items():
        try:
            if p["kind"] == "trivial":
                xi = pt.trivial_partition(ctx.system)
            elif p["kind"] == "symbol":
                xi = pt.symbol_partition(ctx.system, p["coord"])
            elif p["kind"] == "points":
                xi = pt.point_partition(ctx.system, p["length"], p["start"])
            else:
                xi = pt.partition_from_words(ctx.system, p["elements"], p["start"])
        except (ValueError, KeyError) as e:
            raise SpecError(f"partitions.{name}: {e}", SEMANTIC) from None
        ctx.partitions[name] = xi
    return ctx


# task runners: each returns (header, rows, summary)

def _f(x) -> str:
    return fmt_exact(x)


def _d(x) -> str:
    return fmt_decimal(x)


def _log_scale(ctx: Context) -> float:
    return 1 / math.log(2) if ctx.bits else 1.0


def task_entropy(ctx: Context, t: dict):
    mu, xi = ctx.measures[t["measure"]], ctx.partitions[t["partition"]]
    rep = ent.entropy_rate(mu, xi, max(t["depth"], 1))
    header = ["n", "H_n", "increment", "rate"]
    rows = [[n, repr(h), "" if inc is None else repr(inc), repr(r)] for n, h, inc, r in rep.rows(ctx.bits)]
    summary = {"unit": "bits" if ctx.bits else "nats", "n_max": rep.n_max,
               "rate": rep.rate * _log_scale(ctx), "stabilized": rep.stabilized,
               "stabilized_from": rep.stabilized_from, "invariant": rep.invariant}
    if rep.exact is not None:
        summary["H_exact"] = [str(e) for e in rep.exact]
    return header, rows, summary


def _generators(system, depth: int, offset: int = 0):
    per = max(1, math.ceil(math.log2(system.size))) if system.size > 1 else 1
    coords = range(offset, offset + math.ceil(depth / per))
    return rk.coordinate_generators(system, coords)[:depth]


def task_isomorphism(ctx: Context, t: dict):
    mu = ctx.measures[t["measure"]]
    n = t["depth"]
    imap = rk.rho_map(mu, _generators(ctx.system, n), n)
    header = ["cell", "left", "right", "left_decimal", "right_decimal", "length"]
    rows = [[lab, _f(a), _f(b), _d(a), _d(b), _f(b - a)] for lab, a, b in imap]
    return header, rows, {"depth": n, "cells": len(imap), "tiles_unit_interval": imap.tiles_unit_interval()}


def task_square_chart(ctx: Context, t: dict):
    mu = ctx.measures[t["measure"]]
    m, k = t["depth"], t.get("fiber_depth", 1)
    base = _generators(ctx.system, m)
    per = max(1, math.ceil(math.log2(ctx.system.size))) if ctx.system.size > 1 else 1
    fiber = _generators(ctx.system, k, offset=math.ceil(m / per))
    chart = rk.square_chart(mu, base, fiber, m, k, null=t.get("null", "error"))
    header = ["column", "fiber", "x0", "x1", "y0", "y1",
              "x0_decimal", "x1_decimal", "y0_decimal", "y1_decimal", "area"]
    rows = [[r.column, r.fiber, _f(r.x0), _f(r.x1), _f(r.y0), _f(r.y1),
             _d(r.x0), _d(r.x1), _d(r.y0), _d(r.y1), _f(r.area)] for r in chart.rects]
    return header, rows, {"m": m, "k": k, "rects": len(chart.rects), "total_area": _f(chart.total_area())}


def task_peano(ctx: Context, t: dict):
    n = t["depth"]
    cells = rk.peano_cells(n)
    header = ["index", "t0", "t1", "x0", "y0", "side", "t0_decimal", "x0_decimal", "y0_decimal", "area"]
    rows = [[c.index, _f(c.t0), _f(c.t1), _f(c.x0), _f(c.y0), _f(c.side),
             _d(c.t0), _d(c.x0), _d(c.y0), _f(c.area)] for c in cells]
    seen = {(c.x0, c.y0) for c in cells}
    return header, rows, {"depth": n, "cells": len(cells), "tiles_unit_square": len(seen) == 4 ** n,
                          "total_area": _f(sum(c.area for c in cells))}


def task_conditional(ctx: Context, t: dict):
    mu, xi = ctx.measures[t["measure"]], ctx.partitions[t["partition"]]
    cs = cond.condition(mu, xi, t["depth"])
    a, b = cs.window
    header = ["element", "cell", "conditional", "conditional_decimal"]
    rows = []
    for label, mu_c in cs.conditionals.items():
        for w in sorted(ctx.system.words(b - a)):
            v = mu_c.window_weights(a, b - a).get(w, 0)
            if not is_zero(v):
                rows.append([label, ctx.system.label(w), _f(v), _d(v)])
    worst = zero(ctx.mode)
    for w in ctx.system.words(b - a):
        r = cs.residual(make_cylinder(ctx.system, a, b - a, [w]))
        worst = max(worst, abs(r))
    summary = {"window": [a, b - 1], "factor": {k: _f(v) for k, v in cs.factor.items()},
               "dropped": cs.dropped, "max_residual": _f(worst),
               "conditional_totals": {k: _f(c.mass()) for k, c in cs.conditionals.items()}}
    return header, rows, summary


def task_decompose(ctx: Context, t: dict):
    mu, xi = ctx.measures[t["measure"]], ctx.partitions[t["partition"]]
    try:
        check = ent.tail_zero_entropy_check(mu, xi, max(t["depth"], 2))
    except pt.PartitionError as e:
        raise SpecError(f"task {t['name']}: {e}", SEMANTIC) from None
    pi = check.pi
    a, b = pi.window
    header = ["element", "weight", "weight_decimal", "cells"]
    rows, elements = [], []
    for label, c in pi:
        w = mu.of(c)
        cells = " ".join(sorted(ctx.system.label(x) for x in widen(c, a, b))) if b > a else ""
        rows.append([label, _f(w), _d(w), cells])
        elements.append({"label": label, "weight": _f(w)})
    summary = {"pi": elements, "tail_zero_entropy": check.passed,
               "increments": [x * _log_scale(ctx) for x in check.report.increments]}
    if isinstance(mu, (ms.MarkovMeasure, ms.BernoulliMeasure)) and mu.invariant():
        depth = min(max(t["depth"], 1), 4)
        summary["pinsker"] = {"depth": depth, "elements": ent.pinsker_sft(mu, depth).labels}
    return header, rows, summary


def task_pesin(ctx: Context, t: dict):
    try:
        system = toral.toral_automorphism(t["matrix"])
    except toral.ToralError as e:
        raise SpecError(f"task {t['name']}: {e}", SEMANTIC) from None
    spec = toral.lyapunov(system)
    res = toral.pesin_check(system)
    k = _log_scale(ctx)
    header = ["chi", "multiplicity"]
    rows = [[repr(c * k), d] for c, d in spec.exponents]
    summary = {"exponents": [[c * k, d] for c, d in spec.exponents], "h_haar": res.h_haar * k,
               "positive_sum": res.positive_sum * k, "equal": res.equal,
               "unit": "bits" if ctx.bits else "nats"}
    return header, rows, summary


def task_rn(ctx: Context, t: dict):
    nu, mu = ctx.measures[t["nu"]], ctx.measures[t["mu"]]
    n = t["depth"]
    ac, sing = ms.rn_decompose(nu, mu, n)
    table = ms.rn_derivative(ac, mu, n)
    nw, mw = nu.window_weights(0, n), mu.window_weights(0, n)
    header = ["cell", "density", "density_decimal", "nu", "mu"]
    rows = []
    for w in sorted(ctx.system.words(n)):
        d = table.values.get(w)
        rows.append([ctx.system.label(w), "" if d is None else _f(d), "" if d is None else _d(d),
                     _f(nw.get(w, 0)), _f(mw.get(w, 0))])
    summary = {"depth": n, "reconstruction": _f(table.integrate()), "ac_mass": _f(ac.mass()),
               "singular_mass": _f(sing.mass()), "absolutely_continuous": is_zero(sing.mass())}
    return header, rows, summary


RUNNERS = {"entropy": task_entropy, "isomorphism": task_isomorphism, "square-chart": task_square_chart,
           "peano": task_peano, "conditional": task_conditional, "decompose": task_decompose,
           "pesin": task_pesin, "rn": task_rn}


def run_task(ctx: Context, t: dict):
    try:
        return RUNNERS[t["type"]](ctx, t)
    except SpecError:
        raise
    except (ValueError, ArithmeticError) as e:
        raise SpecError(f"task {t['name']} ({t['type']}): {e}", SEMANTIC) from None


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def run(spec_path, output_dir, mode: str = RATIONAL, bits: bool = False) -> int:
    spec = load(spec_path)
    ctx = build(spec, mode, bits)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for t in spec.tasks:
        header, rows, summary = run_task(ctx, t)
        doc = {"task": t, "mode": mode, "summary": summary}
        (out / f"{t['name']}.csv").write_text(_csv_text(header, rows), encoding="utf-8")
        (out / f"{t['name']}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def plotdata(spec_path, task: str, depth: int, fiber_depth: int | None = None,
             mode: str = RATIONAL, stream=None) -> int:
    stream = stream or sys.stdout
    spec = load(spec_path)
    check_depth(depth, spec.max_depth, "--depth")
    if fiber_depth is not None:
        check_depth(fiber_depth, spec.max_depth, "--fiber-depth")
    ctx = build(spec, mode)
    t = next((dict(x) for x in spec.tasks if x["type"] == task), None)
    if t is None:
        t = {"type": task, "name": task}
        if task != "peano":
            if not spec.measures:
                raise SpecError(f"plotdata {task}: no measure is defined", SEMANTIC)
            t["measure"] = sorted(spec.measures)[0]
    t["depth"] = depth
    if task == "square-chart":
        t["fiber_depth"] = t.get("fiber_depth", 1) if fiber_depth is None else fiber_depth
    header, rows, _ = run_task(ctx, t)
    stream.write(_csv_text(header, rows))
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("rational", "float"), default="rational")
    common.add_argument("--bits", action="store_true", help="report logarithms in bits instead of nats")
    p = argparse.ArgumentParser(prog="measpart", description="Finite-depth Rokhlin theory on subshifts.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run every task of a spec")
    r.add_argument("spec")
    r.add_argument("-o", "--output", help="output directory")
    r.add_argument("--dump-normalized", action="store_true", help="print the normalized spec as JSON and exit")
    q = sub.add_parser("plotdata", parents=[common], help="CSV plot data on stdout")
    q.add_argument("spec")
    q.add_argument("--task", required=True, choices=PLOT_TASKS)
    q.add_argument("--depth", required=True, type=int)
    q.add_argument("--fiber-depth", type=int)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            if args.dump_normalized:
                sys.stdout.write(load(args.spec).dumps())
                return 0
            if not args.output:
                raise SpecError("run: -o/--output is required", PARSE)
            return run(args.spec, args.output, args.mode, args.bits)
        return plotdata(args.spec, args.task, args.depth, args.fiber_depth, args.mode)
    except SpecError as e:
        print(f"measpart: error: {e}", file=sys.stderr)
        return e.code
    except OSError as e:
        print(f"measpart: error: {e}", file=sys.stderr)
        return SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
