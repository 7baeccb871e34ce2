"""Command-line interface: ``novikov <command> ...``.

Exit status: 0 on success, 1 when a check fails, 2 on unreadable input,
3 when verify-main stops because the actions are not generic.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import io
from .complex import validate
from .equivariant import evaluate_h1, validate_equivariant
from .graph import arrows_json, build_equivariant_graph, build_graph, export_dot, shortest_arrows
from .harness import check_main_theorem, doubling_tower
from .persistence import singular_decomposition
from .pop import Unsatisfiable, check_all, generate_synthetic

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_STOPPED = 0, 1, 2, 3


def _default_seed() -> int:
    try:
        return int(os.environ.get("NOVIKOV_SEED", "0"))
    except ValueError:
        return 0


def _num(x):
    return "inf" if x == math.inf else float(x)


def _emit(obj) -> None:
    sys.stdout.write(io.dumps(obj))


def cmd_validate(args) -> int:
    data = io.read_json(args.file)
    if "corrections" in data:
        report = validate_equivariant(io.equivariant_from_dict(data))
    else:
        report = validate(io.complex_from_dict(data))
    _emit(report.as_dict())
    return EXIT_OK if report.ok else EXIT_FAIL


def _load_for_barcode(path, h1: bool):
    data = io.read_json(path)
    if "corrections" in data:
        E = io.equivariant_from_dict(data)
        return evaluate_h1(E) if h1 else E.base
    return io.complex_from_dict(data)


def barcode_report(C, method: str = "auto") -> dict:
    B = singular_decomposition(C, method=method)
    bars = [p.length for p in B.pairs]
    return {
        "bars": [float(b) for b in bars],
        "barsExact": [str(b) for b in bars],
        "beta": float(bars[-1]) if bars else 0.0,
        "betaMin": _num(bars[0]) if bars else "inf",
        "infiniteBarCount": len(B.cycles),
        "pairs": [{"source": p.source, "target": p.target, "length": float(p.length)}
                  for p in B.pairs],
    }


def cmd_barcode(args) -> int:
    C = _load_for_barcode(args.file, args.h1)
    report = barcode_report(C, args.method)
    if args.format == "text":
        print(" ".join(report["barsExact"]) or "(no finite bars)")
        print(f"beta_min={report['betaMin']} infinite={report['infiniteBarCount']}")
    else:
        _emit(report)
    return EXIT_OK


def _graph_out(G, args) -> int:
    if args.dot:
        sys.stdout.write(export_dot(G))
    else:
        short = shortest_arrows(G)
        _emit({"vertices": G.vertices, "arrows": arrows_json(G),
               "shortest": arrows_json(type(G)(G.vertices, short, G.equivariant))})
    return EXIT_OK


def cmd_graph(args) -> int:
    return _graph_out(build_graph(_load_for_barcode(args.file, False)), args)


def cmd_eq_graph(args) -> int:
    return _graph_out(build_equivariant_graph(io.read_equivariant(args.file)), args)


def cmd_generate(args) -> int:
    bars = [b for b in args.bars.split(",") if b] if args.bars else None
    seed = args.seed
    for attempt in range(100):
        try:
            T = generate_synthetic(args.orbits, bars, seed + attempt, args.model, n=args.n)
            break
        except Unsatisfiable:
            continue
    else:
        print("error: no satisfiable instance found", file=sys.stderr)
        return EXIT_FAIL
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "complex.json", io.complex_to_dict(T.C))
    io.write_json(out / "equivariant.json", io.equivariant_to_dict(T.E))
    io.write_json(out / "pop.json", io.pop_to_dict(T.P))
    _emit({"model": T.model, "seed": seed + attempt, "out": str(out),
           "orbits": len(T.C), "entries": T.C.entry_count()})
    return EXIT_OK


def cmd_verify_pop(args) -> int:
    C = io.read_complex(args.complex)
    E = io.read_equivariant(args.equivariant)
    P = io.read_pop(args.pop)
    table = None
    if args.table:
        table = {(v["x"], v["y"]): v for v in io.read_json(args.table).get("values", [])}
        table = {k: io.pop_from_dict({"squaring": [], "values": [v]}).image(*k).h_part(0)
                 for k, v in table.items()}
    reports = check_all(P, C, E, table)
    _emit({"ok": all(r.ok for r in reports), "axioms": [r.as_dict() for r in reports]})
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def _batch_one(job):
    seed, orbits, model = job
    try:
        T = generate_synthetic(orbits, None, seed, model, denominator=10**6)
    except Unsatisfiable as exc:
        return {"seed": seed, "skipped": str(exc)}
    rep = check_main_theorem(T.C, T.E, T.P).as_dict()
    rep["seed"] = seed
    return rep


def cmd_verify_main(args) -> int:
    if args.batch:
        jobs = [(args.seed + i, args.orbits, args.model) for i in range(args.batch)]
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                results = list(pool.map(_batch_one, jobs, chunksize=8))
        else:
            results = [_batch_one(j) for j in jobs]
        results.sort(key=lambda r: r["seed"])
        failed = [r["seed"] for r in results if "ok" in r and not r["ok"] and not r["stopped"]]
        _emit({"instances": len(results), "failed": failed, "reports": results})
        return EXIT_FAIL if failed else EXIT_OK
    if not (args.complex and args.equivariant and args.pop):
        print("error: verify-main needs COMPLEX EQUIVARIANT POP or --batch", file=sys.stderr)
        return EXIT_INPUT
    C = io.read_complex(args.complex)
    E = io.read_equivariant(args.equivariant)
    P = io.read_pop(args.pop)
    report = check_main_theorem(C, E, P)
    _emit(report.as_dict())
    if report.stopped:
        return EXIT_STOPPED
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_tower(args) -> int:
    C = io.read_complex(args.file)
    report = doubling_tower(C, args.k, cap=args.cap)
    if args.format == "text":
        print(" ".join(str(b) for b in report.sequence))
        if args.cap is not None:
            print(f"first level exceeding {args.cap}: {report.first_exceeding}")
    else:
        _emit(report.as_dict())
    return EXIT_OK if report.bound_ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="novikov", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check d^2 = 0, action and index rules")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("barcode", help="finite bars, beta, beta_min")
    s.add_argument("file")
    s.add_argument("--method", choices=["auto", "graded", "greedy"], default="auto")
    s.add_argument("--h1", action="store_true", help="for equivariant files, use the h=1 complex")
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.set_defaults(func=cmd_barcode)

    for name, func, helptext in (("graph", cmd_graph, "reduced Floer graph"),
                                 ("eq-graph", cmd_eq_graph, "equivariant Floer graph")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("file")
        s.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
        s.set_defaults(func=func)

    s = sub.add_parser("generate", help="write a synthetic (C, E, P) triple")
    s.add_argument("--model", choices=["pseudo-rotation", "frobenius-double"],
                   default="frobenius-double")
    s.add_argument("--orbits", type=int, default=6)
    s.add_argument("--bars", help="comma-separated bar lengths to plant")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out-dir", default=".")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("verify-pop", help="check the pair-of-pants axioms")
    s.add_argument("complex")
    s.add_argument("equivariant")
    s.add_argument("pop")
    s.add_argument("--table", help="classical product table (pair-of-pants file format)")
    s.set_defaults(func=cmd_verify_pop)

    s = sub.add_parser("verify-main", help="replay the shortest-arrow correspondence")
    s.add_argument("complex", nargs="?")
    s.add_argument("equivariant", nargs="?")
    s.add_argument("pop", nargs="?")
    s.add_argument("--batch", type=int, default=0, help="generate and check this many instances")
    s.add_argument("--orbits", type=int, default=8)
    s.add_argument("--model", choices=["pseudo-rotation", "frobenius-double"],
                   default="frobenius-double")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_verify_main)

    s = sub.add_parser("tower", help="beta_min along iterated squaring")
    s.add_argument("file")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--cap", help="report the first level whose beta_min exceeds this")
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.set_defaults(func=cmd_tower)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    try:
        return args.func(args)
    except (io.FormatError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
