"""Command line front end: ``gallery solve|csp|gen|viz|views``.

Exit codes: 0 yes / satisfiable / success, 1 no / unsatisfiable,
2 bad input, 3 disagreement with the brute-force oracle.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .csp import InvalidInstance, load_instance, save_instance, solve_csp
from .geom import GeometryError, format_number, format_polygon, load_polygon
from .oracle import GenerationFailed, PolygonSpec, TooLarge, brute_force_problem, random_polygon
from .regions import ConvexPolygonShortcut, build_workspace, dump_views
from .structured import Variant, default_threads, make_problem, solve_problem
from .svg import render

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_ORACLE = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load(path: str):
    try:
        return load_polygon(path)
    except (OSError, ValueError) as exc:
        _err(f"{path}: {exc}")
        return None


def _report(fmt: str, data: dict) -> None:
    if fmt == "json":
        print(json.dumps(data, sort_keys=True))
        return
    for key in ("answer", "k", "variant", "guards", "guessesTried", "elapsedMs"):
        val = data[key]
        if key == "guards":
            val = "; ".join(f"{g['vertex']}=({g['x']}, {g['y']})" for g in val) or "-"
        print(f"{key}: {val}")
    if data.get("witness"):
        print(f"witness: {data['witness']}")


def cmd_solve(args: argparse.Namespace) -> int:
    P = _load(args.polygon)
    if P is None:
        return EXIT_INPUT
    if args.k is None and not args.min_k:
        _err("--k is required unless --min-k is given")
        return EXIT_INPUT
    if args.k is not None and args.k < 0:
        _err("--k must be non-negative")
        return EXIT_INPUT
    threads = args.threads if args.threads is not None else default_threads()
    problem = make_problem(P, args.variant)

    hook = None
    dump_dir: Optional[Path] = None
    index_lines: list[str] = []
    if args.dump_csp:
        dump_dir = Path(args.dump_csp)
        dump_dir.mkdir(parents=True, exist_ok=True)

        def dump(guess, inst, sat):
            name = f"guess{len(index_lines) + 1:06d}.csp"
            save_instance(inst, dump_dir / name)
            index_lines.append(f"{name} {'sat' if sat else 'unsat'} {guess.describe()}")

        hook = dump

    progress = None
    if args.progress:
        def report_progress(tried, done, total):
            print(f"\rblocks {done}/{total}, guesses {tried}", end="", file=sys.stderr, flush=True)

        progress = report_progress

    start = time.perf_counter()
    ks = range(0, problem.polygon.r + 1) if args.min_k else [args.k]
    tried = 0
    result = None
    for k in ks:
        result = solve_problem(problem, k, threads, progress, hook)
        tried += result.guesses_tried
        if result.answer:
            break
    if args.min_k and not result.answer:
        # r reflex vertices always suffice; reaching here means r = 0 and k = 0 failed
        result = solve_problem(problem, 1, threads, progress, hook)
    elapsed = int((time.perf_counter() - start) * 1000)
    if progress:
        print(file=sys.stderr)
    if dump_dir is not None:
        (dump_dir / "index.txt").write_text("".join(ln + "\n" for ln in index_lines))

    guards = []
    if result.solution:
        for g, pt in zip(result.solution.guards, result.solution.points):
            guards.append({"vertex": g, "original": problem.to_original(g),
                           "x": format_number(pt.x), "y": format_number(pt.y)})
    data = {
        "answer": "yes" if result.answer else "no",
        "k": result.k,
        "variant": problem.variant.value,
        "guards": guards,
        "guessesTried": tried,
        "elapsedMs": elapsed,
        "route": result.route,
        "witness": result.solution.witness.describe() if result.solution and result.solution.witness else None,
    }

    code = EXIT_YES if result.answer else EXIT_NO
    if args.oracle:
        try:
            ref = brute_force_problem(problem, result.k)
        except TooLarge as exc:
            _err(f"oracle skipped: {exc}")
        else:
            data["oracle"] = "yes" if ref.answer else "no"
            if ref.answer != result.answer:
                code = EXIT_ORACLE
    if args.svg:
        Path(args.svg).write_text(render(problem.polygon, result.solution.guards if result.solution else ()))
    _report(args.report, data)
    if code == EXIT_ORACLE:
        _err("solver and brute-force oracle disagree")
    return code


def cmd_csp(args: argparse.Namespace) -> int:
    try:
        inst = load_instance(args.instance)
    except (OSError, InvalidInstance) as exc:
        _err(f"{args.instance}: {exc}")
        return EXIT_INPUT
    values = solve_csp(inst)
    if args.report == "json":
        print(json.dumps({"satisfiable": values is not None, "assignment": values}, sort_keys=True))
    elif values is None:
        print("unsatisfiable")
    else:
        print("satisfiable")
        for i, v in enumerate(values):
            print(f"x{i} = {v}")
    return EXIT_YES if values is not None else EXIT_NO


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        P = random_polygon(PolygonSpec(args.n, args.seed, args.reflex))
    except (GenerationFailed, ValueError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    text = format_polygon(P)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"r = {P.r}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_YES


def cmd_viz(args: argparse.Namespace) -> int:
    P = _load(args.polygon)
    if P is None:
        return EXIT_INPUT
    guards: list[int] = []
    if args.guards:
        try:
            guards = [int(g) for g in args.guards.split(",") if g.strip()]
        except ValueError:
            _err(f"bad guard list {args.guards!r}")
            return EXIT_INPUT
        bad = [g for g in guards if not 1 <= g <= P.n]
        if bad:
            _err(f"guard indices out of range: {bad}")
            return EXIT_INPUT
    Path(args.out).write_text(render(P, guards, sight_lines=not args.no_sight))
    return EXIT_YES


def cmd_views(args: argparse.Namespace) -> int:
    P = _load(args.polygon)
    if P is None:
        return EXIT_INPUT
    try:
        ws = build_workspace(P)
    except ConvexPolygonShortcut:
        print("convex polygon: no regions to report")
        return EXIT_YES
    sys.stdout.write(dump_views(ws, tables=args.tables))
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gallery", description="Exact vertex guarding of simple polygons.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide whether k vertex guards suffice")
    s.add_argument("--polygon", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--variant", choices=[v.value for v in Variant], default="vv")
    s.add_argument("--min-k", action="store_true", help="report the smallest k that works")
    s.add_argument("--oracle", action="store_true", help="cross-check with brute force")
    s.add_argument("--svg")
    s.add_argument("--dump-csp", metavar="DIR")
    s.add_argument("--report", choices=["json", "text"], default="text")
    s.add_argument("--threads", type=int, help="worker processes (default: $GALLERY_THREADS or 1)")
    s.add_argument("--progress", action="store_true")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("csp", help="solve a monotone 2-CSP instance file")
    c.add_argument("--instance", required=True)
    c.add_argument("--report", choices=["json", "text"], default="text")
    c.set_defaults(func=cmd_csp)

    g = sub.add_parser("gen", help="write a random simple polygon")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--reflex", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("viz", help="draw a polygon and guards as SVG")
    v.add_argument("--polygon", required=True)
    v.add_argument("--guards")
    v.add_argument("--out", required=True)
    v.add_argument("--no-sight", action="store_true", help="omit sight lines from guards")
    v.set_defaults(func=cmd_viz)

    w = sub.add_parser("views", help="print region view orientations")
    w.add_argument("--polygon", required=True)
    w.add_argument("--tables", action="store_true")
    w.set_defaults(func=cmd_views)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GeometryError as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
