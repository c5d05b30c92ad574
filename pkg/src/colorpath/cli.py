"""Command line entry point: ``colorpath <command> ...``.

Exit codes: 0 yes (or success), 1 no, 2 input error, 3 resource cap hit.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path as FsPath
from typing import List, Optional, Sequence, Tuple

from . import generators as gen
from .bounded import solve_bounded
from .geometry import SceneError, parse_scene, rasterize_scene, render_svg
from .graph import (
    ColoredGraph,
    InstanceError,
    NotColorConnected,
    colors_of,
    is_color_connected,
    popcount,
    validate_instance,
)
from .io import (
    FormatError,
    format_instance,
    format_solution,
    parse_decomposition,
    parse_instance,
    parse_solution,
)
from .oracles import bounded_pareto, pareto_exact, xp_subset_solver
from .repset import DEFAULT_CAP, Solution, TableCapExceeded, solve_colored_path
from .treedecomp import STRATEGIES, validate_decomposition

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
ALGS = ("repset", "bounded", "xp", "pareto")
CSV_HEADER = ["instance", "alg", "k", "ell", "decision", "width", "max_table", "nodes", "millis"]


class CapError(RuntimeError):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _is_scene(text: str) -> bool:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if line:
            return line[0] == "scene"
    return False


def load_problem(path: str, k: Optional[int], ell: Optional[int]):
    """Read an instance or a scene; returns (graph, scene or None)."""
    text = _read(path)
    scene = None
    if _is_scene(text):
        scene = parse_scene(text)
        g = rasterize_scene(scene, k or 0)
    else:
        g = parse_instance(text)
    if k is not None:
        g = g.with_budget(k)
    if ell is not None:
        g = g.with_length_bound(ell)
    return g, scene


# --- solving --------------------------------------------------------------


def _oracle_solution(res, g: ColoredGraph) -> Solution:
    if res.found and res.value <= g.budget:
        return Solution(True, res.path, res.colors, {"width": -1, "max_table": 0, "nodes": 0})
    return Solution(False, stats={"width": -1, "max_table": 0, "nodes": 0})


def decide(g: ColoredGraph, alg: str, td=None, fallback: bool = False, cap: int = DEFAULT_CAP,
           strategy: str = "min-fill") -> Solution:
    """Run one decision solver; raises on input or resource problems."""
    ell = g.length_bound
    if alg in ("repset", "bounded"):
        rep = validate_instance(g)
        if not rep.ok:
            raise InstanceError("; ".join(rep.violations))
        ok, bad = is_color_connected(g)
        if not ok:
            if not fallback:
                raise NotColorConnected(bad)
            alg = "pareto"
    if alg == "repset":
        return solve_colored_path(g, td=td, strategy=strategy, cap=cap)
    if alg == "bounded":
        if ell is None:
            raise InstanceError("the bounded solver needs --ell or a length bound in the p line")
        return solve_bounded(g, ell, td=td, strategy=strategy, cap=cap)
    if alg == "pareto":
        res = bounded_pareto(g, ell) if ell is not None else pareto_exact(g)
        return _oracle_solution(res, g)
    if alg == "xp":
        if ell is not None:
            raise InstanceError("the xp oracle ignores length bounds; use pareto or bounded")
        try:
            res = xp_subset_solver(g, g.budget)
        except ValueError as exc:
            raise CapError(str(exc)) from None
        return _oracle_solution(res, g)
    raise InstanceError(f"unknown algorithm {alg!r}")


def optimize(g: ColoredGraph, run) -> Tuple[Optional[int], Solution]:
    """Binary search for the least budget with a yes answer."""
    used = 0
    for m in g.chi:
        used |= m
    lo, hi = 0, popcount(used)
    top = run(g.with_budget(hi))
    if not top.found:
        return None, top
    best = top
    while lo < hi:
        mid = (lo + hi) // 2
        sol = run(g.with_budget(mid))
        if sol.found:
            hi, best = mid, sol
        else:
            lo = mid + 1
    return hi, best


def cmd_solve(args) -> int:
    g, scene = load_problem(args.input, args.k, args.ell)
    td = parse_decomposition(_read(args.td)) if args.td else None
    if td is not None:
        rep = validate_decomposition(g, td)
        if not rep.ok:
            raise InstanceError("decomposition: " + "; ".join(rep.violations))
    run = lambda h: decide(h, args.alg, td, args.fallback_oracle, args.cap, args.strategy)
    opt = None
    if args.optimize:
        opt, sol = optimize(g, run)
    else:
        sol = run(g)
    length = sol.length if (sol.found and (args.alg == "bounded" or g.length_bound is not None)) else None
    text = format_solution(
        sol.found, sol.path, colors_of(sol.colors), sol.stats if args.stats else None, length
    )
    if args.optimize:
        text += f"optimum {opt if opt is not None else 'none'}\n"
    _emit(text, args.output)
    if args.svg:
        if scene is None:
            raise InstanceError("--svg needs a scene input")
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_svg(scene, sol.path if sol.found else None))
    return EXIT_YES if sol.found else EXIT_NO


# --- other commands -------------------------------------------------------


def parse_edge_file(text: str):
    """Edge list: optional ``n <count>`` line, optional ``class v ...`` lines,
    then one ``u v`` pair per line."""
    n = None
    classes: List[List[int]] = []
    edges = []
    for no, raw in enumerate(text.splitlines(), 1):
        tok = raw.split("#", 1)[0].split()
        if not tok:
            continue
        try:
            if tok[0] == "n":
                n = int(tok[1])
            elif tok[0] == "class":
                classes.append([int(x) for x in tok[1:]])
            elif len(tok) == 2:
                edges.append((int(tok[0]), int(tok[1])))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise FormatError(f"line {no}: cannot parse {raw.strip()!r}") from None
    if n is None:
        vs = [v for e in edges for v in e] + [v for c in classes for v in c]
        n = max(vs) + 1 if vs else 0
    return n, classes, edges


def cmd_generate(args) -> int:
    rng = random.Random(args.seed)
    fam = args.family
    if fam == "vc":
        if args.input:
            n, _, edges = parse_edge_file(_read(args.input))
        else:
            n = args.n
            edges = gen.random_edges(n, args.p, rng) or [(0, 1)]
        g = gen.gen_vertex_cover(n, edges, args.k or 0)
    elif fam == "mcc":
        if args.input:
            _, classes, edges = parse_edge_file(_read(args.input))
        else:
            size = args.class_size
            classes = [list(range(j * size, (j + 1) * size)) for j in range(args.classes)]
            edges = gen.random_edges(args.classes * size, args.p, rng)
        g = gen.gen_multicolored_clique(classes, edges)
        if args.k is not None:
            g = g.with_budget(args.k)
    elif fam == "apex":
        base = parse_instance(_read(args.input)) if args.input else gen.gen_random_planar(
            args.n, args.colors, args.seed, k=args.k or 0)
        g = gen.gen_apex_connected(base)
    else:
        g = gen.gen_random_planar(args.n, args.colors, args.seed, k=args.k or 0)
    if args.ell is not None:
        g = g.with_length_bound(args.ell)
    _emit(format_instance(g), args.output)
    return 0


def cmd_validate(args) -> int:
    g = parse_instance(_read(args.input))
    rep = validate_instance(g)
    lines = [f"violation: {v}" for v in rep.violations]
    lines += [f"warning: {w}" for w in rep.warnings]
    ok = rep.ok
    if ok:
        cc, bad = is_color_connected(g)
        if not cc:
            lines.append(f"not color-connected: color {bad} is not connected")
            ok = False
    if args.td:
        trep = validate_decomposition(g, parse_decomposition(_read(args.td)))
        lines += [f"decomposition: {v}" for v in trep.violations]
        ok = ok and trep.ok
    lines.append("OK" if ok else "INVALID")
    print("\n".join(lines))
    return 0 if ok else EXIT_INPUT


def cmd_rasterize(args) -> int:
    scene = parse_scene(_read(args.input))
    _emit(format_instance(rasterize_scene(scene, args.k or 0)), args.output)
    return 0


def cmd_render(args) -> int:
    scene = parse_scene(_read(args.input))
    path = None
    if args.solution:
        sol = parse_solution(_read(args.solution))
        path = sol.get("path") if sol["found"] else None
    elif args.k is not None:
        sol = solve_colored_path(rasterize_scene(scene, args.k))
        path = sol.path if sol.found else None
    _emit(render_svg(scene, path), args.output)
    return 0


def _bench_one(job):
    path, alg, k, ell, cap = job
    name = FsPath(path).name
    try:
        g = parse_instance(_read(path))
        if k is not None:
            g = g.with_budget(k)
        if ell is not None:
            g = g.with_length_bound(ell)
        elif alg != "bounded" and alg != "pareto":
            g = g.with_length_bound(None)
    except (FormatError, OSError):
        return [name, alg, k if k is not None else "", ell if ell is not None else "", "error", -1, 0, 0, 0]
    t0 = time.perf_counter()
    try:
        sol = decide(g, alg, cap=cap)
        decision = "yes" if sol.found else "no"
        st = sol.stats
    except (CapError, TableCapExceeded):
        decision, st = "cap", {}
    except InstanceError:
        decision, st = "error", {}
    millis = int(round((time.perf_counter() - t0) * 1000))
    return [name, alg, g.budget, "" if g.length_bound is None else g.length_bound, decision,
            st.get("width", -1), st.get("max_table", 0), st.get("nodes", 0), millis]


def cmd_bench(args) -> int:
    files = sorted(str(p) for p in FsPath(args.corpus).glob(args.glob))
    algs = [a.strip() for a in args.algs.split(",") if a.strip()]
    for a in algs:
        if a not in ALGS:
            raise InstanceError(f"unknown algorithm {a!r}")
    jobs = [(f, a, args.k, args.ell, args.cap) for f in files for a in algs]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# --- argument parsing -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="colorpath", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide an instance or scene")
    p.add_argument("input", help="instance or scene file ('-' for stdin)")
    p.add_argument("--alg", choices=ALGS, default="repset")
    p.add_argument("--k", type=int, help="override the color budget")
    p.add_argument("--ell", type=int, help="length bound")
    p.add_argument("--fallback-oracle", action="store_true",
                   help="use the exact oracle on input that is not color-connected")
    p.add_argument("--td", help="tree decomposition file to use instead of computing one")
    p.add_argument("--strategy", choices=STRATEGIES, default="min-fill")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--optimize", action="store_true", help="binary-search the least budget")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="per-pattern table size cap")
    p.add_argument("--svg", help="with a scene input, also write an SVG here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="emit a generated instance")
    p.add_argument("--family", choices=("vc", "mcc", "apex", "random"), default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="edge list (vc, mcc) or instance (apex)")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--p", type=float, default=0.4, help="edge probability for random inputs")
    p.add_argument("--colors", type=int, default=4)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--class-size", type=int, default=2)
    p.add_argument("--k", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="check an instance (and a decomposition)")
    p.add_argument("input")
    p.add_argument("--td")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("rasterize", help="turn a scene into an instance")
    p.add_argument("input")
    p.add_argument("--k", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("render", help="draw a scene as SVG")
    p.add_argument("input")
    p.add_argument("--solution", help="solution file whose path is drawn")
    p.add_argument("--k", type=int, help="solve at this budget and draw the path")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="run solvers over a corpus, CSV out")
    p.add_argument("corpus", help="directory of instance files")
    p.add_argument("--glob", default="*.col")
    p.add_argument("--algs", default="repset,pareto,xp")
    p.add_argument("--k", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotColorConnected as exc:
        print(f"error: input is not color-connected: color {exc.color} is not connected "
              "(use --fallback-oracle to solve it with the exact oracle)", file=sys.stderr)
        return EXIT_INPUT
    except (FormatError, SceneError, InstanceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TableCapExceeded, CapError) as exc:
        print(f"error: resource cap reached: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
