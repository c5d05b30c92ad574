"""Exact reference solvers, independent of the tree-decomposition code.

They are exponential in the number of colors and meant for small instances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import List, NamedTuple, Optional, Tuple

from .graph import ColoredGraph, Path, popcount, shortest_path

XP_COLOR_LIMIT = 24
ENUM_VERTEX_LIMIT = 14


class ParetoLabel(NamedTuple):
    colors: int
    length: int
    predecessor: Optional[Tuple[int, int]]  # (vertex, label index) or None at s


@dataclass
class OracleResult:
    found: bool
    value: Optional[int] = None  # minimum number of colors
    path: Optional[Path] = None
    colors: int = 0


def _loop_erase(walk: List[int]) -> Path:
    out: List[int] = []
    pos = {}
    for v in walk:
        if v in pos:
            cut = pos[v]
            for x in out[cut + 1:]:
                del pos[x]
            del out[cut + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return tuple(out)


def pareto_labels(g: ColoredGraph, ell: Optional[int] = None, check: bool = False) -> List[List[ParetoLabel]]:
    """Label-correcting search over (color set, length) from s.

    Labels are produced in breadth-first order, so a new label can only be
    dominated by existing ones or tie with them on length.  Dead labels stay
    in the lists (their indices are referenced by predecessors) but are
    flagged in a parallel structure.
    """
    labels: List[List[ParetoLabel]] = [[] for _ in range(g.n)]
    alive: List[List[bool]] = [[] for _ in range(g.n)]
    s = g.source
    labels[s].append(ParetoLabel(g.chi[s], 0, None))
    alive[s].append(True)
    queue = deque([(s, 0)])
    while queue:
        v, idx = queue.popleft()
        if not alive[v][idx]:
            continue
        lab = labels[v][idx]
        if ell is not None and lab.length >= ell:
            continue
        for u in g.adj[v]:
            mask = lab.colors | g.chi[u]
            length = lab.length + 1
            here = labels[u]
            if any(a and (m.colors & ~mask) == 0 and m.length <= length for m, a in zip(here, alive[u])):
                continue
            for j, m in enumerate(here):
                if alive[u][j] and (mask & ~m.colors) == 0 and length <= m.length:
                    alive[u][j] = False
            here.append(ParetoLabel(mask, length, (v, idx)))
            alive[u].append(True)
            queue.append((u, len(here) - 1))
            if check:
                live = [m for m, a in zip(here, alive[u]) if a]
                for a in live:
                    for b in live:
                        if a is not b and (a.colors & ~b.colors) == 0 and a.length <= b.length:
                            raise AssertionError("label antichain broken")
    for v in range(g.n):
        labels[v] = [m if a else m._replace(colors=-1) for m, a in zip(labels[v], alive[v])]
    return labels


def _best_at_target(g: ColoredGraph, labels) -> OracleResult:
    t = g.target
    live = [(popcount(m.colors), m.length, i) for i, m in enumerate(labels[t]) if m.colors >= 0]
    if not live:
        return OracleResult(False)
    _, _, idx = min(live)
    walk = []
    v, i = t, idx
    while True:
        walk.append(v)
        pred = labels[v][i].predecessor
        if pred is None:
            break
        v, i = pred
    path = _loop_erase(walk[::-1])
    mask = 0
    for x in path:
        mask |= g.chi[x]
    return OracleResult(True, popcount(mask), path, mask)


def pareto_exact(g: ColoredGraph) -> OracleResult:
    """Minimum number of colors on an s-t path, with a witness path."""
    return _best_at_target(g, pareto_labels(g))


def bounded_pareto(g: ColoredGraph, ell: int) -> OracleResult:
    """Minimum colors over s-t paths with at most ``ell`` edges."""
    res = _best_at_target(g, pareto_labels(g, ell))
    if res.found and len(res.path) - 1 > ell:
        raise AssertionError("witness exceeds the length bound")
    return res


def xp_subset_solver(g: ColoredGraph, k: int) -> OracleResult:
    """Try every color subset of size at most k, smallest first."""
    nc = g.n_colors
    if nc > XP_COLOR_LIMIT and k >= 4:
        raise ValueError(f"refusing {nc} colors with k={k}")
    need = g.chi[g.source] | g.chi[g.target]
    for r in range(min(k, nc) + 1):
        for combo in combinations(range(nc), r):
            sub = 0
            for c in combo:
                sub |= 1 << c
            if need & ~sub:
                continue
            allowed = {v for v in range(g.n) if not g.chi[v] & ~sub}
            p = shortest_path(g, g.source, g.target, allowed)
            if p is not None:
                mask = 0
                for x in p:
                    mask |= g.chi[x]
                return OracleResult(True, popcount(mask), p, mask)
    return OracleResult(False)


def xp_optimum(g: ColoredGraph) -> Optional[int]:
    res = xp_subset_solver(g, g.n_colors)
    return res.value if res.found else None


def all_paths(g: ColoredGraph, u: int, v: int, banned=(), k: Optional[int] = None):
    """All simple u-v paths avoiding ``banned``, by DFS with ascending neighbors."""
    banned = set(banned)
    if u in banned or v in banned:
        return
    path = [u]
    on = {u}

    def dfs(x, mask):
        if x == v:
            yield tuple(path)
            return
        for y in g.adj[x]:
            if y in on or y in banned:
                continue
            m = mask | g.chi[y]
            if k is not None and popcount(m) > k:
                continue
            path.append(y)
            on.add(y)
            yield from dfs(y, m)
            path.pop()
            on.discard(y)

    if k is not None and popcount(g.chi[u]) > k:
        return
    yield from dfs(u, g.chi[u])


def enumerate_minimal_set(g: ColoredGraph, u: int, v: int, w: int, k: int) -> List[Path]:
    """A maximal set of k-valid u-v paths in G-w that is minimal w.r.t. w.

    Paths are scanned in DFS order.  A path is taken when no path in G-w has a
    strictly smaller color set, and its colors neither share the w-signature
    with nor contain or sit inside those of an already chosen path.
    """
    if g.n > ENUM_VERTEX_LIMIT:
        raise ValueError(f"enumeration limited to {ENUM_VERTEX_LIMIT} vertices")
    masks = {}
    for p in all_paths(g, u, v, banned=(w,)):
        m = 0
        for x in p:
            m |= g.chi[x]
        masks[p] = m
    distinct = set(masks.values())
    minimal = {m for m in distinct if not any(o != m and (o & ~m) == 0 for o in distinct)}
    cw = g.chi[w]
    chosen: List[Path] = []
    for p in all_paths(g, u, v, banned=(w,), k=k):
        m = masks[p]
        if m not in minimal:
            continue
        clash = False
        for q in chosen:
            mq = masks[q]
            if (m & cw) == (mq & cw) or (m & ~mq) == 0 or (mq & ~m) == 0:
                clash = True
                break
        if not clash:
            chosen.append(p)
    return chosen


def is_minimal_set(g: ColoredGraph, paths: List[Path], w: int, k: int) -> bool:
    """Re-check the three defining properties of a minimal path set."""
    if not paths:
        return True
    u, v = paths[0][0], paths[0][-1]
    masks = []
    for p in paths:
        if w in p or p[0] != u or p[-1] != v:
            return False
        m = 0
        for x in p:
            m |= g.chi[x]
        if popcount(m) > k:
            return False
        masks.append(m)
    cw = g.chi[w]
    for i in range(len(masks)):
        for j in range(len(masks)):
            if i == j:
                continue
            if masks[i] & cw == masks[j] & cw:
                return False
            if masks[i] & ~masks[j] == 0:
                return False
    every = set()
    for p in all_paths(g, u, v, banned=(w,)):
        m = 0
        for x in p:
            m |= g.chi[x]
        every.add(m)
    for m in masks:
        if any(o != m and (o & ~m) == 0 for o in every):
            return False
    return True
