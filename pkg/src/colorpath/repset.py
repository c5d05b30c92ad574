"""Representative-set dynamic programming over a nice tree decomposition.

A table maps each pattern of a bag to a small set of path sequences that
stands in for every conforming sequence below the bag.  The same engine runs
the length-bounded variant when an ``ell`` is supplied: sequences then also
carry their total length and dominance becomes two-coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .graph import (
    ColoredGraph,
    InstanceError,
    Path,
    colors_of,
    compact_colors,
    chi_of_path,
    lift_path,
    normalize_st,
    popcount,
    reduce_to_irreducible,
    require_color_connected,
    shortest_path,
    validate_instance,
)
from .treedecomp import NiceDecomposition, TreeDecomposition, decompose, make_nice

DEFAULT_CAP = 10**6

# (vertex sequence s..t, presence bit per consecutive pair)
Pattern = Tuple[Tuple[int, ...], Tuple[int, ...]]


class PathSequence(NamedTuple):
    paths: Tuple[Path, ...]
    chi: int
    length: int


Table = Dict[Pattern, List[PathSequence]]


class TableCapExceeded(RuntimeError):
    pass


def make_sequence(g: ColoredGraph, paths: Sequence[Sequence[int]]) -> PathSequence:
    """Build a sequence from explicit paths (or walks); empty tuples are gaps."""
    chi = 0
    length = 0
    for p in paths:
        for v in p:
            chi |= g.chi[v]
        if p:
            length += len(p) - 1
    return PathSequence(tuple(tuple(p) for p in paths), chi, length)


def _chi(x) -> int:
    return x.chi if isinstance(x, PathSequence) else x


def preceq(s1, s2, bag_chi: int) -> bool:
    """S1 dominates S2 when S1's colors plus S2's bag-visible colors are no more
    than S2's colors.  Arguments may be sequences or bare color masks."""
    c1, c2 = _chi(s1), _chi(s2)
    return popcount(c1 | (c2 & bag_chi)) <= popcount(c2)


def preceq_with_length(s1: PathSequence, s2: PathSequence, bag_chi: int) -> bool:
    return s1.length <= s2.length and preceq(s1, s2, bag_chi)


def bag_colors(g: ColoredGraph, bag: Iterable[int]) -> int:
    m = 0
    for v in bag:
        m |= g.chi[v]
    return m


def useful(g: ColoredGraph, v: int, k: int) -> bool:
    return popcount(g.chi[v]) <= k


def enumerate_patterns(g: ColoredGraph, bag: Iterable[int], k: int) -> List[Pattern]:
    """Every pattern over the useful vertices of a bag, in lexicographic order."""
    s, t = g.source, g.target
    inner = sorted(v for v in bag if v not in (s, t) and useful(g, v, k))
    out = []
    for r in range(len(inner) + 1):
        for mid in permutations(inner, r):
            verts = (s,) + mid + (t,)
            for bits in product((0, 1), repeat=len(verts) - 1):
                out.append((verts, bits))
    out.sort()
    return out


# --- refinement -----------------------------------------------------------


class _Refiner:
    """Per-node refinement with a cache of minimal paths keyed by
    (endpoints, color budget of the walk)."""

    def __init__(self, g: ColoredGraph, bag: Iterable[int], below: Iterable[int], ell: Optional[int]):
        self.g = g
        self.bag_chi = bag_colors(g, bag)
        self.below = list(below)
        self.ell = ell
        self.cache: Dict[Tuple[int, int, int], Path] = {}

    def allowed(self, budget: int) -> set:
        chi = self.g.chi
        return {x for x in self.below if not chi[x] & ~budget}

    def path_for(self, walk: Path) -> Path:
        u, v = walk[0], walk[-1]
        chi = self.g.chi
        cw = 0
        for x in walk:
            cw |= chi[x]
        key = (u, v, cw)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if self.ell is not None:
            p = shortest_path(self.g, u, v, self.allowed(cw))
        else:
            p = self._min_color_path(u, v, cw)
        if p is None:  # the walk itself witnesses a path; this cannot happen
            raise AssertionError(f"walk {walk} not reproducible")
        self.cache[key] = p
        return p

    def _min_color_path(self, u: int, v: int, cw: int) -> Optional[Path]:
        base = self.g.chi[u] | self.g.chi[v]
        extra = colors_of(cw & ~base)
        for r in range(len(extra) + 1):
            for combo in combinations(extra, r):
                budget = base
                for c in combo:
                    budget |= 1 << c
                p = shortest_path(self.g, u, v, self.allowed(budget))
                if p is not None:
                    return p
        return None

    def refine_sequence(self, seq: PathSequence) -> PathSequence:
        paths = tuple(self.path_for(p) if p else () for p in seq.paths)
        return make_sequence(self.g, paths)

    def thin(self, seqs: List[PathSequence]) -> List[PathSequence]:
        bx = self.bag_chi
        if self.ell is None:
            order = lambda q: (popcount(q.chi), q.chi, q.paths)
            bucket = lambda q: q.chi & bx
        else:
            order = lambda q: (popcount(q.chi), q.length, q.chi, q.paths)
            bucket = lambda q: (q.chi & bx, tuple(len(p) for p in q.paths))
        seqs = sorted(set(seqs), key=order)
        # inside one bucket the first sequence dominates the rest
        firsts: Dict[object, PathSequence] = {}
        for q in seqs:
            firsts.setdefault(bucket(q), q)
        cands = list(firsts.values())
        if self.ell is None:
            dom = lambda a, b: popcount(a.chi | (b.chi & bx)) <= popcount(b.chi)
        else:
            dom = lambda a, b: a.length <= b.length and popcount(a.chi | (b.chi & bx)) <= popcount(b.chi)
        kept: List[PathSequence] = []
        for i, q in enumerate(cands):
            if any(dom(r, q) for r in kept):
                continue
            if any(dom(r, q) and not dom(q, r) for r in cands[i + 1:]):
                continue
            kept.append(q)
        return kept

    def refine(self, seqs: Iterable[PathSequence]) -> List[PathSequence]:
        refined = []
        for q in seqs:
            r = self.refine_sequence(q)
            if self.ell is not None and r.length > self.ell:
                continue
            refined.append(r)
        return self.thin(refined)


def refine(
    sequences: Iterable[PathSequence],
    bag: Iterable[int],
    pattern: Pattern,
    g: ColoredGraph,
    below: Optional[Iterable[int]] = None,
    ell: Optional[int] = None,
) -> List[PathSequence]:
    """Replace each walk by a minimal path, then thin by dominance.

    ``below`` is the vertex set strictly under the bag; when omitted, every
    vertex outside the bag may be used.  With ``ell`` set, walks are replaced
    by shortest paths within their own color set, sequences longer than
    ``ell`` are dropped and dominance also compares lengths.
    """
    bag = set(bag)
    if below is None:
        below = [v for v in range(g.n) if v not in bag]
    seqs = list(sequences)
    if ell is not None:
        seqs = [q for q in seqs if q.length <= ell]
    for q in seqs:
        if len(q.paths) != len(pattern[1]):
            raise InstanceError("sequence does not match the pattern")
    return _Refiner(g, bag, below, ell).refine(seqs)


def dominated_by_some(outputs: Sequence[PathSequence], s: PathSequence, bag_chi: int, with_length: bool = False) -> bool:
    test = preceq_with_length if with_length else preceq
    return any(test(w, s, bag_chi) for w in outputs)


# --- the dynamic program --------------------------------------------------


@dataclass
class DPStats:
    width: int = -1
    max_table: int = 0
    nodes: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {"width": self.width, "max_table": self.max_table, "nodes": self.nodes}


class RepsetDP:
    """Runs the table recurrences bottom-up over a nice decomposition."""

    def __init__(
        self,
        g: ColoredGraph,
        nice: NiceDecomposition,
        k: Optional[int] = None,
        ell: Optional[int] = None,
        cap: int = DEFAULT_CAP,
    ):
        self.g = g
        self.nice = nice
        self.k = g.budget if k is None else k
        self.ell = ell
        self.cap = cap
        self.stats = DPStats(width=nice.width, nodes=len(nice.nodes))
        self.below: List[FrozenSet[int]] = []
        for node in nice.nodes:
            kids = [self.below[c] for c in node.children]
            if node.kind == "leaf":
                self.below.append(frozenset())
            elif node.kind == "introduce":
                self.below.append(kids[0])
            elif node.kind == "forget":
                self.below.append(kids[0] | {node.vertex})
            else:
                self.below.append(kids[0] | kids[1])

    # -- helpers

    def _fits(self, chi: int, length: int) -> bool:
        if popcount(chi) > self.k:
            return False
        return self.ell is None or length <= self.ell

    def _finish(self, i: int, raw: Dict[Pattern, List[PathSequence]], keep: Iterable[Pattern] = ()) -> Table:
        node = self.nice.nodes[i]
        ref = _Refiner(self.g, node.bag, self.below[i], self.ell)
        keep = set(keep)
        table: Table = {}
        for pat in sorted(raw):
            seqs = raw[pat]
            if not seqs:
                continue
            if len(seqs) > self.cap:
                raise TableCapExceeded(
                    f"{len(seqs)} sequences for one pattern at node {i} exceed the cap {self.cap}"
                )
            table[pat] = list(seqs) if pat in keep else ref.refine(seqs)
        size = sum(len(v) for v in table.values())
        self.stats.max_table = max(self.stats.max_table, size)
        return table

    # -- node kinds

    def leaf(self, i: int) -> Table:
        s, t = self.g.source, self.g.target
        table = {((s, t), (0,)): [PathSequence(((),), 0, 0)]}
        self.stats.max_table = max(self.stats.max_table, 1)
        return table

    def introduce(self, i: int, child: Table) -> Table:
        g = self.g
        v = self.nice.nodes[i].vertex
        raw: Dict[Pattern, List[PathSequence]] = {pat: list(seqs) for pat, seqs in child.items()}
        kept = set(raw)
        if useful(g, v, self.k):
            cv = g.chi[v]
            for (verts, bits), seqs in child.items():
                for q, b in enumerate(bits):
                    if b:
                        continue
                    left, right = verts[q], verts[q + 1]
                    for a, c in ((0, 0), (0, 1), (1, 0), (1, 1)):
                        if a and not g.has_edge(left, v):
                            continue
                        if c and not g.has_edge(v, right):
                            continue
                        pat = (
                            verts[: q + 1] + (v,) + verts[q + 1:],
                            bits[:q] + (a, c) + bits[q + 1:],
                        )
                        extra = 0
                        if a:
                            extra |= cv | g.chi[left]
                        if c:
                            extra |= cv | g.chi[right]
                        out = raw.setdefault(pat, [])
                        pa = (left, v) if a else ()
                        pc = (v, right) if c else ()
                        for sq in seqs:
                            chi = sq.chi | extra
                            length = sq.length + a + c
                            if not self._fits(chi, length):
                                continue
                            paths = sq.paths[:q] + (pa, pc) + sq.paths[q + 1:]
                            out.append(PathSequence(paths, chi, length))
        return self._finish(i, raw, keep=kept)

    def forget(self, i: int, child: Table) -> Table:
        v = self.nice.nodes[i].vertex
        raw: Dict[Pattern, List[PathSequence]] = {}
        for (verts, bits), seqs in child.items():
            if v not in verts:
                raw.setdefault((verts, bits), []).extend(seqs)
                continue
            p = verts.index(v)
            if not (bits[p - 1] and bits[p]):
                continue
            pat = (verts[:p] + verts[p + 1:], bits[: p - 1] + (1,) + bits[p + 1:])
            out = raw.setdefault(pat, [])
            for sq in seqs:
                glued = sq.paths[p - 1] + sq.paths[p][1:]
                paths = sq.paths[: p - 1] + (glued,) + sq.paths[p + 1:]
                out.append(PathSequence(paths, sq.chi, sq.length))
        return self._finish(i, raw)

    def join(self, i: int, left: Table, right: Table) -> Table:
        by_verts: Dict[Tuple[int, ...], List[Tuple[Tuple[int, ...], List[PathSequence]]]] = {}
        for (verts, bits), seqs in right.items():
            by_verts.setdefault(verts, []).append((bits, seqs))
        raw: Dict[Pattern, List[PathSequence]] = {}
        for (verts, tau), seqs1 in left.items():
            for mu, seqs2 in by_verts.get(verts, ()):
                if any(a and b for a, b in zip(tau, mu)):
                    continue
                sigma = tuple(a | b for a, b in zip(tau, mu))
                out = raw.setdefault((verts, sigma), [])
                for s1 in seqs1:
                    for s2 in seqs2:
                        chi = s1.chi | s2.chi
                        length = s1.length + s2.length
                        if not self._fits(chi, length):
                            continue
                        paths = tuple(a if a else b for a, b in zip(s1.paths, s2.paths))
                        out.append(PathSequence(paths, chi, length))
        return self._finish(i, raw)

    def step(self, i: int, child_tables: Sequence[Table]) -> Table:
        node = self.nice.nodes[i]
        if len(child_tables) != len(node.children):
            raise ValueError(f"node {i} expects {len(node.children)} child tables")
        if node.kind == "leaf":
            return self.leaf(i)
        if node.kind == "introduce":
            return self.introduce(i, child_tables[0])
        if node.kind == "forget":
            return self.forget(i, child_tables[0])
        if node.kind == "join":
            return self.join(i, child_tables[0], child_tables[1])
        raise ValueError(f"unknown node kind {node.kind!r}")

    def run(self, keep_tables: bool = False):
        """Fill all tables; returns the root table (and all tables if asked)."""
        tables: Dict[int, Table] = {}
        pending = [0] * len(self.nice.nodes)
        for node in self.nice.nodes:
            for c in node.children:
                pending[c] += 1
        kept: Dict[int, Table] = {}
        for i, node in enumerate(self.nice.nodes):
            tables[i] = self.step(i, [tables[c] for c in node.children])
            if keep_tables:
                kept[i] = tables[i]
            else:
                for c in node.children:
                    del tables[c]
        root = tables[self.nice.root]
        return (root, kept) if keep_tables else root

    def answer(self, root_table: Table) -> Optional[PathSequence]:
        s, t = self.g.source, self.g.target
        seqs = root_table.get(((s, t), (1,)), [])
        if not seqs:
            return None
        return min(seqs, key=lambda q: (popcount(q.chi), q.length, q.paths))


def dp_step(dp: RepsetDP, i: int, child_tables: Sequence[Table]) -> Table:
    return dp.step(i, child_tables)


# --- solver ---------------------------------------------------------------


@dataclass
class Solution:
    found: bool
    path: Optional[Path] = None
    colors: int = 0
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def length(self) -> Optional[int]:
        return None if self.path is None else len(self.path) - 1


def map_decomposition(td: TreeDecomposition, vertex_map: Sequence[int]) -> TreeDecomposition:
    """Push a decomposition of the original graph through a contraction."""
    bags = [tuple(sorted({vertex_map[v] for v in bag})) for bag in td.bags]
    return TreeDecomposition(bags, list(td.parent))


def prepare(g: ColoredGraph):
    """Checks plus s/t normalization and color compaction.

    Returns ``(graph, early)`` where ``early`` is a finished :class:`Solution`
    when the answer is already known.
    """
    rep = validate_instance(g)
    if not rep.ok:
        raise InstanceError("; ".join(rep.violations))
    require_color_connected(g)
    norm = normalize_st(g)
    if norm.early is not None:
        path = norm.path if norm.early else None
        colors = chi_of_path(g, path) if path else 0
        return norm.graph, Solution(norm.early, path, colors, {"width": -1, "max_table": 0, "nodes": 0})
    h, _ = compact_colors(norm.graph)
    return h, None


def run_dp(
    h: ColoredGraph,
    td: Optional[TreeDecomposition],
    strategy: str,
    ell: Optional[int],
    cap: int,
) -> Tuple[Optional[PathSequence], DPStats]:
    if td is None:
        td = decompose(h, strategy)
    nice = make_nice(td, h.source, h.target)
    dp = RepsetDP(h, nice, h.budget, ell, cap)
    best = dp.answer(dp.run())
    return best, dp.stats


def solve_colored_path(
    g: ColoredGraph,
    td: Optional[TreeDecomposition] = None,
    strategy: str = "min-fill",
    cap: int = DEFAULT_CAP,
) -> Solution:
    """Decide whether some s-t path uses at most ``g.budget`` colors.

    ``td``, when given, must decompose ``g`` itself; it is carried through the
    internal contraction.  The returned path lives in ``g``.
    """
    h, early = prepare(g)
    if early is not None:
        return early
    r, trace = reduce_to_irreducible(h)
    stats = DPStats()
    if r.has_edge(r.source, r.target):
        zpath: Optional[Path] = (r.source, r.target)
    else:
        rtd = map_decomposition(td, trace.vertex_map) if td is not None else None
        best, stats = run_dp(r, rtd, strategy, None, cap)
        zpath = best.paths[0] if best is not None else None
    if zpath is None:
        return Solution(False, stats=stats.as_dict())
    path = lift_path(trace, h, zpath)
    colors = chi_of_path(g, path)
    if popcount(colors) > g.budget:
        raise AssertionError("solver produced a path over budget")
    return Solution(True, path, colors, stats.as_dict())
