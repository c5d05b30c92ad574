"""Instance generators: the hardness gadgets and a random planar family."""

from __future__ import annotations

import random
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import Delaunay

from .graph import ColoredGraph

Edge = Tuple[int, int]


def _simple_edges(edges: Sequence[Edge]) -> List[Edge]:
    out = sorted({(min(u, v), max(u, v)) for u, v in edges})
    if any(u == v for u, v in out):
        raise ValueError("loops are not allowed")
    return out


def gen_vertex_cover(n: int, edges: Sequence[Edge], k: int = 0) -> ColoredGraph:
    """Chain of triangles whose optimum equals the minimum vertex cover of (n, edges).

    Vertex layout: ``z_i = 3i``, ``x_i = 3i - 2``, ``y_i = 3i - 1``.  For the
    i-th edge ``(p, j)`` with ``p < j``, ``x_i`` gets color ``j`` and ``y_i``
    gets color ``p``, so a color is a vertex of the input graph.
    """
    es = _simple_edges(edges)
    if not es:
        raise ValueError("the input graph needs at least one edge")
    if any(not 0 <= v < n for e in es for v in e):
        raise ValueError("edge endpoint out of range")
    m = len(es)
    gadget: List[Edge] = []
    colors: Dict[int, List[int]] = {}
    for i, (p, j) in enumerate(es, 1):
        z0, x, y, z1 = 3 * i - 3, 3 * i - 2, 3 * i - 1, 3 * i
        gadget += [(z0, x), (z0, y), (x, y), (z1, x), (z1, y)]
        colors[x] = [j]
        colors[y] = [p]
    return ColoredGraph.from_edges(3 * m + 1, gadget, colors, n_colors=n, source=0, target=3 * m, budget=k)


def gen_apex_connected(g: ColoredGraph) -> ColoredGraph:
    """Add one vertex carrying every used color, adjacent to everything."""
    apex = g.n
    used = 0
    for m in g.chi:
        used |= m
    edges = g.edges() + [(v, apex) for v in range(g.n)]
    colors = {v: [c for c in range(g.n_colors) if g.chi[v] >> c & 1] for v in range(g.n)}
    colors[apex] = [c for c in range(used.bit_length()) if used >> c & 1]
    return ColoredGraph.from_edges(
        g.n + 1, edges, colors, n_colors=g.n_colors, source=g.source, target=g.target,
        budget=g.budget, length_bound=g.length_bound,
    )


def gen_multicolored_clique(classes: Sequence[Sequence[int]], edges: Sequence[Edge]) -> ColoredGraph:
    """Gadget instance with budget C(k, 2) that is YES iff a multicolored k-clique exists.

    ``classes`` partitions the input vertices; edges inside a class are ignored.
    Each color stands for one input edge.  Every input vertex u of class j gets
    a gadget holding, for each other class in ascending order, one copy of each
    neighbor of u in that class, colored with the edge to u.  Consecutive copy
    layers are linked through an empty vertex, and the gadgets of class j all
    hang between the empty vertices z_{j-1} and z_j.
    """
    k = len(classes)
    if k < 2:
        raise ValueError("need at least two classes")
    cls_of = {}
    for j, members in enumerate(classes):
        for v in members:
            if v in cls_of:
                raise ValueError(f"vertex {v} in two classes")
            cls_of[v] = j
    es = [e for e in _simple_edges(edges) if cls_of[e[0]] != cls_of[e[1]]]
    color = {e: i for i, e in enumerate(es)}
    nbrs: Dict[int, set] = {v: set() for v in cls_of}
    for u, v in es:
        nbrs[u].add(v)
        nbrs[v].add(u)

    count = 0
    colors: Dict[int, List[int]] = {}
    out_edges: List[Edge] = []

    def new_vertex(cs=()):
        nonlocal count
        count += 1
        if cs:
            colors[count - 1] = list(cs)
        return count - 1

    z = [new_vertex() for _ in range(k + 1)]
    for j, members in enumerate(classes):
        for u in sorted(members):
            layers = []
            for jj in range(k):
                if jj == j:
                    continue
                layer = [new_vertex([color[(min(u, v), max(u, v))]]) for v in sorted(nbrs[u]) if cls_of[v] == jj]
                layers.append(layer)
            prev = [z[j]]
            for r, layer in enumerate(layers):
                out_edges += [(a, b) for a in prev for b in layer]
                if r + 1 < len(layers):
                    y = new_vertex()
                    out_edges += [(b, y) for b in layer]
                    prev = [y]
                else:
                    out_edges += [(b, z[j + 1]) for b in layer]
    return ColoredGraph.from_edges(
        count, out_edges, colors, n_colors=len(es), source=z[0], target=z[k], budget=k * (k - 1) // 2
    )


def min_vertex_cover(n: int, edges: Sequence[Edge]) -> int:
    """Brute-force minimum vertex cover size."""
    es = _simple_edges(edges)
    for r in range(n + 1):
        for cover in combinations(range(n), r):
            cs = set(cover)
            if all(u in cs or v in cs for u, v in es):
                return r
    return n


def has_multicolored_clique(classes: Sequence[Sequence[int]], edges: Sequence[Edge]) -> bool:
    es = set(_simple_edges(edges))

    def pick(j, chosen):
        if j == len(classes):
            return True
        for v in classes[j]:
            if all((min(u, v), max(u, v)) in es for u in chosen):
                if pick(j + 1, chosen + [v]):
                    return True
        return False

    return pick(0, [])


# --- random planar instances ----------------------------------------------


def _connected(n: int, edges) -> bool:
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def _grid_edges(n: int) -> List[Edge]:
    w = max(1, int(np.ceil(np.sqrt(n))))
    edges = []
    for v in range(n):
        if v % w + 1 < w and v + 1 < n:
            edges.append((v, v + 1))
        if v + w < n:
            edges.append((v, v + w))
    return edges


def random_planar_edges(n: int, rng: random.Random, keep: float = 0.75) -> List[Edge]:
    """Delaunay triangulation of random points, thinned while staying connected."""
    if n <= 1:
        return []
    if n == 2:
        return [(0, 1)]
    if n == 3:
        return [(0, 1), (1, 2)] if rng.random() < 0.5 else [(0, 1), (1, 2), (0, 2)]
    pts = np.array([[rng.random(), rng.random()] for _ in range(n)])
    try:
        tri = Delaunay(pts)
        edges = set()
        for a, b, c in tri.simplices:
            for u, v in ((a, b), (b, c), (a, c)):
                edges.add((int(min(u, v)), int(max(u, v))))
        edges = sorted(edges)
    except Exception:  # degenerate point sets (collinear input)
        edges = _grid_edges(n)
    if not _connected(n, edges):
        edges = _grid_edges(n)
    order = list(edges)
    rng.shuffle(order)
    current = set(edges)
    for e in order:
        if rng.random() < keep:
            continue
        current.discard(e)
        if not _connected(n, current):
            current.add(e)
    return sorted(current)


def gen_random_planar(
    n: int,
    n_colors: int,
    seed: int,
    k: int = 0,
    max_region: Optional[int] = None,
    keep: float = 0.75,
) -> ColoredGraph:
    """Random connected planar graph with color-connected random regions.

    s and t are empty and nonadjacent whenever the graph allows it.  Each
    color covers a random subtree grown inside G - {s, t}.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    rng = random.Random(seed)
    edges = random_planar_edges(n, rng, keep)
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n) if b not in adj[a]]
    if pairs:
        s, t = rng.choice(pairs)
    else:
        s, t = 0, 1
    if rng.random() < 0.5:
        s, t = t, s
    inner = [v for v in range(n) if v not in (s, t)]
    colors: Dict[int, List[int]] = {}
    if inner:
        cap = max_region or max(1, (n + 2) // 3)
        for c in range(n_colors):
            size = rng.randint(1, cap)
            start = rng.choice(inner)
            region = [start]
            seen = {start}
            frontier = [y for y in sorted(adj[start]) if y not in (s, t)]
            while frontier and len(region) < size:
                y = frontier.pop(rng.randrange(len(frontier)))
                if y in seen:
                    continue
                seen.add(y)
                region.append(y)
                frontier += [z for z in sorted(adj[y]) if z not in seen and z not in (s, t)]
            for v in region:
                colors.setdefault(v, []).append(c)
    return ColoredGraph.from_edges(n, edges, colors, n_colors=n_colors, source=s, target=t, budget=k)


def random_edges(n: int, p: float, rng: random.Random) -> List[Edge]:
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
