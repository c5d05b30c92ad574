"""Line-oriented text formats: instances, decompositions and solutions."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .graph import ColoredGraph, colors_of


class FormatError(ValueError):
    pass


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _ints(tokens: Sequence[str], no: int) -> List[int]:
    try:
        return [int(x) for x in tokens]
    except ValueError:
        raise FormatError(f"line {no}: expected integers, got {' '.join(tokens)!r}") from None


# --- instances ------------------------------------------------------------


def parse_instance(text: str) -> ColoredGraph:
    header = None
    edges: List[Tuple[int, int]] = []
    colors: Dict[int, List[int]] = {}
    s = t = None
    for no, tok in _lines(text):
        kind, rest = tok[0], tok[1:]
        if kind == "p":
            if header is not None:
                raise FormatError(f"line {no}: duplicate p line")
            if len(rest) not in (4, 5) or rest[0] != "colpath":
                raise FormatError(f"line {no}: expected 'p colpath n n_colors k [ell]'")
            header = _ints(rest[1:], no)
        elif kind == "e":
            vals = _ints(rest, no)
            if len(vals) != 2:
                raise FormatError(f"line {no}: edge needs two endpoints")
            edges.append((vals[0], vals[1]))
        elif kind == "c":
            vals = _ints(rest, no)
            if not vals:
                raise FormatError(f"line {no}: color line needs a vertex")
            if vals[0] in colors:
                raise FormatError(f"line {no}: duplicate color line for vertex {vals[0]}")
            colors[vals[0]] = vals[1:]
        elif kind in ("s", "t"):
            vals = _ints(rest, no)
            if len(vals) != 1:
                raise FormatError(f"line {no}: expected one vertex")
            if (s if kind == "s" else t) is not None:
                raise FormatError(f"line {no}: duplicate {kind} line")
            if kind == "s":
                s = vals[0]
            else:
                t = vals[0]
        else:
            raise FormatError(f"line {no}: unknown record {kind!r}")
    if header is None:
        raise FormatError("missing p line")
    if s is None or t is None:
        raise FormatError("missing s or t line")
    n, n_colors, k = header[:3]
    ell = header[3] if len(header) == 4 else None
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"edge {u} {v} out of range")
    for v, cs in colors.items():
        if not 0 <= v < n:
            raise FormatError(f"color line for vertex {v} out of range")
        if any(c < 0 for c in cs):
            raise FormatError(f"negative color at vertex {v}")
    # keep duplicate edges and loops visible to the validator
    adj: List[List[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        if u != v:
            adj[v].append(u)
    chi = [0] * n
    for v, cs in colors.items():
        for c in cs:
            chi[v] |= 1 << c
    return ColoredGraph(
        n=n,
        adj=tuple(tuple(sorted(a)) for a in adj),
        chi=tuple(chi),
        n_colors=n_colors,
        source=s,
        target=t,
        budget=k,
        length_bound=ell,
    )


def format_instance(g: ColoredGraph) -> str:
    head = f"p colpath {g.n} {g.n_colors} {g.budget}"
    if g.length_bound is not None:
        head += f" {g.length_bound}"
    out = [head]
    out += [f"e {u} {v}" for u, v in g.edges()]
    for v in range(g.n):
        if g.chi[v]:
            out.append("c " + " ".join(map(str, (v,) + colors_of(g.chi[v]))))
    out.append(f"s {g.source}")
    out.append(f"t {g.target}")
    return "\n".join(out) + "\n"


def read_instance(path) -> ColoredGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def write_instance(g: ColoredGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_instance(g))


# --- tree decompositions --------------------------------------------------


def parse_decomposition(text: str):
    from .treedecomp import TreeDecomposition

    header = None
    bags: Dict[int, Tuple[int, ...]] = {}
    arcs: List[Tuple[int, int]] = []
    for no, tok in _lines(text):
        kind, vals = tok[0], tok[1:]
        if kind == "td":
            if header is not None:
                raise FormatError(f"line {no}: duplicate td line")
            header = _ints(vals, no)
            if len(header) != 2:
                raise FormatError(f"line {no}: expected 'td n_bags width'")
        elif kind == "b":
            nums = _ints(vals, no)
            if not nums:
                raise FormatError(f"line {no}: bag needs an id")
            if nums[0] in bags:
                raise FormatError(f"line {no}: duplicate bag {nums[0]}")
            bags[nums[0]] = tuple(sorted(set(nums[1:])))
        elif kind == "a":
            nums = _ints(vals, no)
            if len(nums) != 2:
                raise FormatError(f"line {no}: arc needs parent and child")
            arcs.append((nums[0], nums[1]))
        else:
            raise FormatError(f"line {no}: unknown record {kind!r}")
    if header is None:
        raise FormatError("missing td line")
    n_bags = header[0]
    if sorted(bags) != list(range(n_bags)):
        raise FormatError(f"expected bags 0..{n_bags - 1}")
    parent = [-1] * n_bags
    for p, c in arcs:
        if not (0 <= p < n_bags and 0 <= c < n_bags) or p == c:
            raise FormatError(f"bad arc {p} {c}")
        if parent[c] != -1:
            raise FormatError(f"bag {c} has two parents")
        parent[c] = p
    roots = [i for i in range(n_bags) if parent[i] == -1]
    if n_bags and len(roots) != 1:
        raise FormatError("decomposition tree must have exactly one root")
    return TreeDecomposition([bags[i] for i in range(n_bags)], parent)


def format_decomposition(td) -> str:
    out = [f"td {len(td.bags)} {td.width}"]
    for i, bag in enumerate(td.bags):
        out.append(" ".join(map(str, ("b", i) + tuple(sorted(bag)))))
    for c, p in enumerate(td.parent):
        if p >= 0:
            out.append(f"a {p} {c}")
    return "\n".join(out) + "\n"


# --- solutions ------------------------------------------------------------


def format_solution(
    found: bool,
    path: Optional[Sequence[int]] = None,
    colors: Sequence[int] = (),
    stats: Optional[Dict[str, int]] = None,
    length: Optional[int] = None,
) -> str:
    out = ["SOLUTION " + ("yes" if found else "no")]
    if found and path is not None:
        out.append("path " + " ".join(map(str, path)))
        out.append("colors " + " ".join(map(str, colors)) if colors else "colors")
        if length is not None:
            out.append(f"length {length}")
    if stats is not None:
        out.append(
            "stats width={} max_table={} nodes={}".format(
                stats.get("width", -1), stats.get("max_table", 0), stats.get("nodes", 0)
            )
        )
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> Dict[str, object]:
    sol: Dict[str, object] = {}
    for no, tok in _lines(text):
        kind, vals = tok[0], tok[1:]
        if kind == "SOLUTION":
            if vals not in (["yes"], ["no"]):
                raise FormatError(f"line {no}: expected yes or no")
            sol["found"] = vals[0] == "yes"
        elif kind == "path":
            sol["path"] = tuple(_ints(vals, no))
        elif kind == "colors":
            sol["colors"] = tuple(_ints(vals, no))
        elif kind == "length":
            sol["length"] = _ints(vals, no)[0]
        elif kind == "optimum":
            sol["optimum"] = None if vals == ["none"] else _ints(vals, no)[0]
        elif kind == "stats":
            sol["stats"] = {k: int(v) for k, v in (x.split("=", 1) for x in vals)}
        else:
            raise FormatError(f"line {no}: unknown record {kind!r}")
    if "found" not in sol:
        raise FormatError("missing SOLUTION line")
    return sol
