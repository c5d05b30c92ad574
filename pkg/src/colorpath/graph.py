"""Colored graph instances, validation, normalization and color contraction.

Color sets are plain ``int`` bitmasks: bit ``c`` is set iff color ``c`` is a
member.  All union/intersection/subset arithmetic is done with ``|``, ``&`` and
``int.bit_count``.  Vertex ids are ``0 .. n-1``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Path = Tuple[int, ...]


class InstanceError(ValueError):
    """Raised when an instance or path violates an operation's precondition."""


class NotColorConnected(InstanceError):
    def __init__(self, color: int):
        super().__init__(f"color {color} is not connected")
        self.color = color


# --- color sets -----------------------------------------------------------


def mask_of(colors: Iterable[int]) -> int:
    m = 0
    for c in colors:
        m |= 1 << c
    return m


def colors_of(mask: int) -> Tuple[int, ...]:
    out = []
    c = 0
    while mask:
        if mask & 1:
            out.append(c)
        mask >>= 1
        c += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return mask.bit_count()


# --- instance -------------------------------------------------------------


@dataclass(frozen=True)
class ColoredGraph:
    """An instance (G, C, chi, s, t, k[, ell]).

    ``adj[v]`` is the sorted neighbor tuple of ``v``; ``chi[v]`` its color mask.
    Instances are not validated on construction so that malformed input can
    still be represented and reported on by :func:`validate_instance`.
    """

    n: int
    adj: Tuple[Tuple[int, ...], ...]
    chi: Tuple[int, ...]
    n_colors: int
    source: int
    target: int
    budget: int = 0
    length_bound: Optional[int] = None
    _nbr_sets: Tuple[frozenset, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if not self._nbr_sets:
            object.__setattr__(self, "_nbr_sets", tuple(frozenset(a) for a in self.adj))

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int]],
        colors: Optional[Dict[int, Iterable[int]]] = None,
        n_colors: Optional[int] = None,
        source: int = 0,
        target: int = 1,
        budget: int = 0,
        length_bound: Optional[int] = None,
    ) -> "ColoredGraph":
        adj: List[List[int]] = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            if u != v:
                adj[v].append(u)
        chi = [0] * n
        for v, cs in (colors or {}).items():
            chi[v] = mask_of(cs)
        if n_colors is None:
            n_colors = max((m.bit_length() for m in chi), default=0)
        return cls(
            n=n,
            adj=tuple(tuple(sorted(a)) for a in adj),
            chi=tuple(chi),
            n_colors=n_colors,
            source=source,
            target=target,
            budget=budget,
            length_bound=length_bound,
        )

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as sorted ``(min, max)`` pairs, each listed once."""
        return sorted({(min(u, v), max(u, v)) for u in range(self.n) for v in self.adj[u]})

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbr_sets[u]

    def neighbors(self, v: int) -> frozenset:
        return self._nbr_sets[v]

    def with_budget(self, k: int) -> "ColoredGraph":
        return replace(self, budget=k)

    def with_length_bound(self, ell: Optional[int]) -> "ColoredGraph":
        return replace(self, length_bound=ell)


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        # truthy when there is something to report
        return bool(self.violations)


def validate_instance(g: ColoredGraph) -> ValidationReport:
    rep = ValidationReport()
    if len(g.adj) != g.n or len(g.chi) != g.n:
        rep.violations.append("vertex count mismatch")
        return rep
    for v in range(g.n):
        seen = set()
        for u in g.adj[v]:
            if not 0 <= u < g.n:
                rep.violations.append(f"neighbor {u} of {v} out of range")
                continue
            if u == v:
                rep.violations.append(f"loop at {v}")
            elif u in seen:
                rep.violations.append(f"multi-edge {v}-{u}")
            elif v not in g.neighbors(u):
                rep.violations.append(f"asymmetric adjacency {v}-{u}")
            seen.add(u)
        if g.chi[v] >> g.n_colors:
            bad = [c for c in colors_of(g.chi[v]) if c >= g.n_colors]
            rep.violations.append(f"color out of range at {v}: {bad}")
    for name, x in (("source", g.source), ("target", g.target)):
        if not 0 <= x < g.n:
            rep.violations.append(f"{name} {x} out of range")
    if g.source == g.target:
        rep.violations.append("s = t")
    if g.budget < 0:
        rep.violations.append("negative budget")
    if g.length_bound is not None and g.length_bound < 0:
        rep.violations.append("negative length bound")
    m = len(g.edges())
    if g.n >= 3 and m > 3 * g.n - 6:
        rep.warnings.append(f"not planar: {m} edges > 3n-6 = {3 * g.n - 6}")
    return rep


# --- basic queries --------------------------------------------------------


def bfs_distances(g: ColoredGraph, start: int, allowed=None) -> List[Optional[int]]:
    dist: List[Optional[int]] = [None] * g.n
    dist[start] = 0
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in g.adj[v]:
            if dist[u] is None and (allowed is None or u in allowed):
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def shortest_path(g: ColoredGraph, u: int, v: int, allowed=None) -> Optional[Path]:
    """BFS path from u to v with neighbors scanned in ascending order.

    ``allowed`` restricts intermediate vertices (u and v are always allowed).
    """
    if u == v:
        return (u,)
    prev = {u: u}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in g.adj[x]:
            if y in prev:
                continue
            if y != v and allowed is not None and y not in allowed:
                continue
            prev[y] = x
            if y == v:
                out = [v]
                while out[-1] != u:
                    out.append(prev[out[-1]])
                return tuple(reversed(out))
            queue.append(y)
    return None


def color_classes(g: ColoredGraph) -> List[List[int]]:
    classes: List[List[int]] = [[] for _ in range(g.n_colors)]
    for v in range(g.n):
        for c in colors_of(g.chi[v]):
            if c < g.n_colors:
                classes[c].append(v)
    return classes


def is_color_connected(g: ColoredGraph) -> Tuple[bool, Optional[int]]:
    """Return ``(True, None)`` or ``(False, smallest disconnected color)``."""
    for c, members in enumerate(color_classes(g)):
        if len(members) <= 1:
            continue
        inside = set(members)
        seen = {members[0]}
        stack = [members[0]]
        while stack:
            x = stack.pop()
            for y in g.adj[x]:
                if y in inside and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(inside):
            return False, c
    return True, None


def require_color_connected(g: ColoredGraph) -> None:
    ok, bad = is_color_connected(g)
    if not ok:
        raise NotColorConnected(bad)


def is_valid_path(g: ColoredGraph, p: Sequence[int]) -> bool:
    if len(set(p)) != len(p):
        return False
    if any(not 0 <= v < g.n for v in p):
        return False
    return all(g.has_edge(a, b) for a, b in zip(p, p[1:]))


def chi_of_path(g: ColoredGraph, p: Sequence[int]) -> int:
    if not is_valid_path(g, p):
        raise InstanceError(f"not a path: {tuple(p)}")
    m = 0
    for v in p:
        m |= g.chi[v]
    return m


def intersection_number(g: ColoredGraph) -> int:
    """Largest number of vertices carrying one color (0 if colorless)."""
    return max((len(vs) for vs in color_classes(g)), default=0)


# --- normalization --------------------------------------------------------


@dataclass(frozen=True)
class Normalized:
    graph: ColoredGraph
    early: Optional[bool] = None  # None: solve further; True/False: decided
    path: Optional[Path] = None


def normalize_st(g: ColoredGraph) -> Normalized:
    """Make s and t empty (charging their colors to the budget) and nonadjacent.

    The colors of s and t lie on every s-t path, so they are removed from every
    vertex and the budget drops by their number.
    """
    st = g.chi[g.source] | g.chi[g.target]
    k = g.budget - popcount(st)
    h = replace(g, chi=tuple(m & ~st for m in g.chi), budget=k)
    if k < 0:
        return Normalized(h, early=False)
    if g.has_edge(g.source, g.target):
        return Normalized(h, early=True, path=(g.source, g.target))
    return Normalized(h)


def compact_colors(g: ColoredGraph) -> Tuple[ColoredGraph, Tuple[int, ...]]:
    """Drop unused colors; returns the new graph and ``new id -> old id``."""
    used = 0
    for m in g.chi:
        used |= m
    old_ids = colors_of(used)
    remap = {old: new for new, old in enumerate(old_ids)}
    chi = tuple(mask_of(remap[c] for c in colors_of(m)) for m in g.chi)
    return replace(g, chi=chi, n_colors=len(old_ids)), old_ids


# --- contraction ----------------------------------------------------------


@dataclass(frozen=True)
class ContractionTrace:
    """How a contracted graph arose from an original one.

    ``merges`` lists ``(kept, absorbed)`` pairs of original vertex ids; uniting
    them (see :func:`replay`) yields the blobs of the contracted graph.
    ``vertex_map[v]`` is the contracted vertex holding original vertex ``v``.
    """

    merges: Tuple[Tuple[int, int], ...]
    vertex_map: Tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "ContractionTrace":
        return cls((), tuple(range(n)))

    def blobs(self) -> List[List[int]]:
        out: List[List[int]] = [[] for _ in range(max(self.vertex_map, default=-1) + 1)]
        for v, z in enumerate(self.vertex_map):
            out[z].append(v)
        return out

    def then(self, later: "ContractionTrace") -> "ContractionTrace":
        """Compose with a trace applied to this trace's contracted graph."""
        blobs = self.blobs()
        merges = list(self.merges)
        for kept, absorbed in later.merges:
            merges.append((blobs[kept][0], blobs[absorbed][0]))
        vmap = tuple(later.vertex_map[z] for z in self.vertex_map)
        return ContractionTrace(tuple(merges), vmap)


def _union_find(n: int):
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    return parent, find


def quotient(g: ColoredGraph, label: Sequence[int], merges=()) -> Tuple[ColoredGraph, ContractionTrace]:
    """Contract every group of vertices sharing a label into one vertex.

    New ids are ordered by the smallest original member of each group; a group's
    color set is the union of its members' sets.
    """
    first: Dict[int, int] = {}
    for v in range(g.n):
        first.setdefault(label[v], v)
    order = sorted(first.values())
    new_id = {label[v]: i for i, v in enumerate(order)}
    vmap = tuple(new_id[label[v]] for v in range(g.n))
    m = len(order)
    adj = [set() for _ in range(m)]
    chi = [0] * m
    for v in range(g.n):
        z = vmap[v]
        chi[z] |= g.chi[v]
        for u in g.adj[v]:
            y = vmap[u]
            if y != z:
                adj[z].add(y)
    h = replace(
        g,
        n=m,
        adj=tuple(tuple(sorted(a)) for a in adj),
        chi=tuple(chi),
        source=vmap[g.source],
        target=vmap[g.target],
        _nbr_sets=(),
    )
    return h, ContractionTrace(tuple(merges), vmap)


def replay(g: ColoredGraph, merges: Iterable[Tuple[int, int]]) -> Tuple[ColoredGraph, ContractionTrace]:
    merges = tuple(merges)
    parent, find = _union_find(g.n)
    for a, b in merges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return quotient(g, [find(v) for v in range(g.n)], merges)


def color_contract(g: ColoredGraph, x: int, y: int) -> Tuple[ColoredGraph, ContractionTrace]:
    """Contract the edge xy of two vertices with equal color sets."""
    if x == y or not g.has_edge(x, y):
        raise InstanceError(f"{x} and {y} are not adjacent")
    if g.chi[x] != g.chi[y]:
        raise InstanceError(f"color sets of {x} and {y} differ")
    lo = min(x, y)
    label = [lo if v in (x, y) else v for v in range(g.n)]
    return quotient(g, label, ((x, y),))


def reduce_to_irreducible(g: ColoredGraph) -> Tuple[ColoredGraph, ContractionTrace]:
    """Exhaustively apply color contraction.

    Repeated contraction collapses each connected class of equal-color-set
    vertices to a single vertex, so the classes are computed directly.  The one
    exception is a class containing both s and t: it is split along an edge of
    a BFS tree into an s-part and a t-part, leaving s and t adjacent.
    """
    parent, find = _union_find(g.n)
    for v in range(g.n):
        for u in g.adj[v]:
            if u > v and g.chi[u] == g.chi[v]:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[max(ru, rv)] = min(ru, rv)
    label = [find(v) for v in range(g.n)]
    s, t = g.source, g.target
    if label[s] == label[t]:
        cls = label[s]
        tree = {s: None}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.adj[x]:
                if y not in tree and label[y] == cls:
                    tree[y] = x
                    queue.append(y)
        cut = t
        while tree[cut] != s:
            cut = tree[cut]
        # the subtree hanging below `cut` (which contains t) becomes its own blob
        below = {cut}
        changed = True
        while changed:
            changed = False
            for y, p in tree.items():
                if p in below and y not in below:
                    below.add(y)
                    changed = True
        t_label = g.n + min(below)
        for y in below:
            label[y] = t_label
    groups: Dict[int, List[int]] = {}
    for v in range(g.n):
        groups.setdefault(label[v], []).append(v)
    merges = []
    for members in groups.values():
        for v in members[1:]:
            merges.append((members[0], v))
    merges.sort()
    return quotient(g, label, merges)


def lift_path(trace: ContractionTrace, g_original: ColoredGraph, p: Sequence[int]) -> Path:
    """Map a path of the contracted graph back into the original graph.

    Each contracted vertex stands for a connected blob of original vertices; the
    lifted path walks through the blobs in order, entering each blob next to
    the previous exit and leaving towards the next blob.
    """
    blobs = trace.blobs()
    if any(not 0 <= z < len(blobs) for z in p) or len(set(p)) != len(p):
        raise InstanceError(f"not a path of the contracted graph: {tuple(p)}")
    s, t = g_original.source, g_original.target
    if not p or trace.vertex_map[s] != p[0] or trace.vertex_map[t] != p[-1]:
        raise InstanceError("path does not join the contracted s and t")
    out: List[int] = []
    cur = s
    for i, z in enumerate(p):
        members = set(blobs[z])
        if cur not in members:
            raise InstanceError(f"no edge into blob {z}")
        if i + 1 < len(p):
            nxt = set(blobs[p[i + 1]])
            exits = [x for x in sorted(members) if any(y in nxt for y in g_original.adj[x])]
            if not exits:
                raise InstanceError(f"blobs {z} and {p[i + 1]} are not adjacent")
            goal = exits[0] if cur not in exits else cur
        else:
            goal = t
        seg = shortest_path(g_original, cur, goal, allowed=members)
        if seg is None:
            raise InstanceError(f"blob {z} is not connected")
        out.extend(seg)
        if i + 1 < len(p):
            cur = min(y for y in g_original.adj[goal] if y in set(blobs[p[i + 1]]))
    return tuple(out)
