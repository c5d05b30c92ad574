"""Tree decompositions: elimination heuristics, an exact search, validation and
conversion to nice form with s and t in every bag."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .graph import ColoredGraph, ValidationReport

STRATEGIES = ("min-fill", "min-degree", "exact-small")
EXACT_LIMIT = 20


@dataclass
class TreeDecomposition:
    """Bags plus a parent array (``-1`` marks the root)."""

    bags: List[Tuple[int, ...]]
    parent: List[int]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def children(self) -> List[List[int]]:
        out: List[List[int]] = [[] for _ in self.bags]
        for c, p in enumerate(self.parent):
            if p >= 0:
                out[p].append(c)
        return out

    @property
    def root(self) -> int:
        roots = [i for i, p in enumerate(self.parent) if p < 0]
        return roots[0] if roots else -1


# --- elimination orderings ------------------------------------------------


def _adjacency_sets(g: ColoredGraph) -> List[set]:
    return [set(a) for a in g.adj]


def _heuristic_order(g: ColoredGraph, strategy: str) -> List[int]:
    nbrs = _adjacency_sets(g)
    alive = set(range(g.n))
    order = []
    while alive:
        best, best_key = None, None
        for v in sorted(alive):
            if strategy == "min-degree":
                key = len(nbrs[v])
            else:
                ns = sorted(nbrs[v])
                key = sum(
                    1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in nbrs[a]
                )
            if best_key is None or key < best_key:
                best, best_key = v, key
        ns = nbrs[best]
        for a in ns:
            nbrs[a] |= ns
            nbrs[a].discard(a)
            nbrs[a].discard(best)
        alive.discard(best)
        nbrs[best] = set()
        order.append(best)
    return order


def _exact_order(g: ColoredGraph) -> List[int]:
    """Minimum-width elimination order by iterative deepening on the width.

    The graph left after eliminating a set of vertices does not depend on the
    order in which they were eliminated, so failed sets are memoized.
    """
    n = g.n
    base = [0] * n
    for v in range(n):
        for u in g.adj[v]:
            base[v] |= 1 << u
    full = (1 << n) - 1
    upper = elimination_width(g, _heuristic_order(g, "min-fill"))

    def eliminate(adj, v):
        adj = list(adj)
        nv = adj[v]
        x = nv
        while x:
            low = x & -x
            a = low.bit_length() - 1
            adj[a] = (adj[a] | nv) & ~(1 << a) & ~(1 << v)
            x ^= low
        adj[v] = 0
        return adj

    for k in range(0, max(upper, 0) + 1):
        failed = set()

        def search(remaining, adj, order):
            if remaining.bit_count() <= k + 1:
                rest = [v for v in range(n) if remaining >> v & 1]
                return order + rest
            if remaining in failed:
                return None
            # a simplicial vertex of small degree can always be eliminated first
            x = remaining
            while x:
                low = x & -x
                v = low.bit_length() - 1
                x ^= low
                nv = adj[v]
                if nv.bit_count() <= k and all(
                    (adj[a] | (1 << a)) & nv == nv for a in _bits(nv)
                ):
                    res = search(remaining & ~low, eliminate(adj, v), order + [v])
                    if res is None:
                        failed.add(remaining)
                    return res
            x = remaining
            while x:
                low = x & -x
                v = low.bit_length() - 1
                x ^= low
                if adj[v].bit_count() <= k:
                    res = search(remaining & ~low, eliminate(adj, v), order + [v])
                    if res is not None:
                        return res
            failed.add(remaining)
            return None

        res = search(full, base, [])
        if res is not None:
            return res
    return _heuristic_order(g, "min-fill")


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def elimination_width(g: ColoredGraph, order: Sequence[int]) -> int:
    return decomposition_from_order(g, order).width


def decomposition_from_order(g: ColoredGraph, order: Sequence[int]) -> TreeDecomposition:
    pos = {v: i for i, v in enumerate(order)}
    nbrs = _adjacency_sets(g)
    later: Dict[int, set] = {}
    for v in order:
        hi = {u for u in nbrs[v] if pos[u] > pos[v]}
        later[v] = hi
        for a in hi:
            nbrs[a] |= hi
            nbrs[a].discard(a)
    bags = [tuple(sorted({v} | later[v])) for v in order]
    parent = [-1] * len(order)
    for i, v in enumerate(order):
        if later[v]:
            parent[i] = min(pos[u] for u in later[v])
    # chain the roots of separate components together
    roots = [i for i, p in enumerate(parent) if p < 0]
    for a, b in zip(roots, roots[1:]):
        parent[a] = b
    return TreeDecomposition(bags, parent)


def decompose(g: ColoredGraph, strategy: str = "min-fill") -> TreeDecomposition:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if g.n == 0:
        return TreeDecomposition([], [])
    if strategy == "exact-small":
        if g.n > EXACT_LIMIT:
            raise ValueError(f"exact-small accepts at most {EXACT_LIMIT} vertices, got {g.n}")
        order = _exact_order(g)
    else:
        order = _heuristic_order(g, strategy)
    return decomposition_from_order(g, order)


def validate_decomposition(g: ColoredGraph, td: TreeDecomposition) -> ValidationReport:
    rep = ValidationReport()
    m = len(td.bags)
    if len(td.parent) != m:
        rep.violations.append("parent array length mismatch")
        return rep
    roots = [i for i, p in enumerate(td.parent) if p < 0]
    if m and len(roots) != 1:
        rep.violations.append(f"expected one root, found {len(roots)}")
    # every node must reach the root without cycling
    for i in range(m):
        seen = set()
        x = i
        while x >= 0 and x not in seen:
            seen.add(x)
            x = td.parent[x] if x < m else -1
        if x >= 0:
            rep.violations.append(f"cycle through bag {i}")
            return rep
    holders: List[List[int]] = [[] for _ in range(g.n)]
    for i, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                rep.violations.append(f"bag {i} holds unknown vertex {v}")
            else:
                holders[v].append(i)
    for v in range(g.n):
        if not holders[v]:
            rep.violations.append(f"vertex {v} not covered")
    bagsets = [set(b) for b in td.bags]
    for u, v in g.edges():
        if not any(v in bagsets[i] for i in holders[u]):
            rep.violations.append(f"edge {u}-{v} not covered")
    for v in range(g.n):
        hs = set(holders[v])
        if len(hs) <= 1:
            continue
        # the holders form a subtree iff exactly one of them has its parent outside
        tops = [i for i in hs if td.parent[i] not in hs]
        if len(tops) != 1:
            rep.violations.append(f"running intersection fails for vertex {v}")
    return rep


# --- nice decompositions --------------------------------------------------


@dataclass(frozen=True)
class NiceNode:
    bag: FrozenSet[int]
    kind: str  # leaf | introduce | forget | join
    vertex: Optional[int] = None
    children: Tuple[int, ...] = ()


@dataclass
class NiceDecomposition:
    """Nodes are stored children-first, so index order is a postorder."""

    nodes: List[NiceNode]
    root: int
    source: int
    target: int

    @property
    def width(self) -> int:
        return max(len(nd.bag) for nd in self.nodes) - 1

    def as_tree_decomposition(self) -> TreeDecomposition:
        parent = [-1] * len(self.nodes)
        for i, nd in enumerate(self.nodes):
            for c in nd.children:
                parent[c] = i
        return TreeDecomposition([tuple(sorted(nd.bag)) for nd in self.nodes], parent)


def make_nice(td: TreeDecomposition, s: int, t: int) -> NiceDecomposition:
    nodes: List[NiceNode] = []
    st = frozenset((s, t))

    def add(node: NiceNode) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def transition(idx: int, target: FrozenSet[int]) -> int:
        bag = nodes[idx].bag
        for v in sorted(bag - target):
            bag = bag - {v}
            idx = add(NiceNode(bag, "forget", v, (idx,)))
        for v in sorted(target - bag):
            bag = bag | {v}
            idx = add(NiceNode(bag, "introduce", v, (idx,)))
        return idx

    if not td.bags:
        root = add(NiceNode(st, "leaf"))
        return NiceDecomposition(nodes, root, s, t)

    children = td.children()
    built: Dict[int, int] = {}
    # iterative postorder over the input tree
    stack = [(td.root, False)]
    while stack:
        i, done = stack.pop()
        if not done:
            stack.append((i, True))
            for c in reversed(children[i]):
                stack.append((c, False))
            continue
        bag = frozenset(td.bags[i]) | st
        if not children[i]:
            built[i] = transition(add(NiceNode(st, "leaf")), bag)
            continue
        subs = [transition(built[c], bag) for c in children[i]]
        cur = subs[0]
        for other in subs[1:]:
            cur = add(NiceNode(bag, "join", None, (cur, other)))
        built[i] = cur
    root = transition(built[td.root], st)
    return NiceDecomposition(nodes, root, s, t)


def check_nice(nd: NiceDecomposition) -> List[str]:
    """Kind-specific bag relations; an empty list means the form is nice."""
    st = {nd.source, nd.target}
    problems = []
    for i, node in enumerate(nd.nodes):
        if not st <= node.bag:
            problems.append(f"node {i} misses s or t")
        kids = [nd.nodes[c].bag for c in node.children]
        if node.kind == "leaf":
            if kids or node.bag != st:
                problems.append(f"leaf {i} malformed")
        elif node.kind == "introduce":
            if len(kids) != 1 or kids[0] | {node.vertex} != node.bag or node.vertex in kids[0]:
                problems.append(f"introduce {i} malformed")
        elif node.kind == "forget":
            if len(kids) != 1 or node.bag | {node.vertex} != kids[0] or node.vertex in node.bag:
                problems.append(f"forget {i} malformed")
        elif node.kind == "join":
            if len(kids) != 2 or any(k != node.bag for k in kids):
                problems.append(f"join {i} malformed")
        else:
            problems.append(f"node {i} has unknown kind {node.kind!r}")
    if nd.nodes[nd.root].bag != st:
        problems.append("root bag is not {s, t}")
    return problems
