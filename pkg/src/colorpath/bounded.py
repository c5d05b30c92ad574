"""Length-bounded colored paths: distant-vertex contraction and the
length-aware table recurrences (shared with :mod:`colorpath.repset`)."""

from __future__ import annotations

from typing import Iterable, List, Optional, Tuple

from .graph import (
    ColoredGraph,
    ContractionTrace,
    InstanceError,
    Path,
    bfs_distances,
    chi_of_path,
    intersection_number,
    lift_path,
    popcount,
    quotient,
    reduce_to_irreducible,
)
from .repset import (
    DEFAULT_CAP,
    DPStats,
    PathSequence,
    Solution,
    TreeDecomposition,
    map_decomposition,
    prepare,
    preceq_with_length,
    refine,
    run_dp,
)

__all__ = [
    "contract_distant",
    "preceq_with_length",
    "refine_with_length",
    "solve_bounded",
    "solve_via_length_bound",
    "solve_bounded_intersection",
    "length_bound_for",
]


def refine_with_length(
    sequences: Iterable[PathSequence],
    bag: Iterable[int],
    pattern,
    g: ColoredGraph,
    ell: int,
    below: Optional[Iterable[int]] = None,
) -> List[PathSequence]:
    """Length-aware refinement: over-long sequences are dropped, walks become
    shortest paths within their own colors, and thinning is two-coordinate."""
    return refine(sequences, bag, pattern, g, below=below, ell=ell)


def contract_distant(g: ColoredGraph, ell: int) -> Tuple[ColoredGraph, ContractionTrace]:
    """Contract vertices farther than ``ell + 1`` from s until none remain.

    The smallest such vertex is merged into its smallest neighbor and the
    merged vertex carries both color sets.  Vertices unreachable from s are
    left alone.
    """
    label = list(range(g.n))
    merges = []
    h, trace = g, ContractionTrace.identity(g.n)
    while True:
        dist = bfs_distances(h, h.source)
        far = [v for v in range(h.n) if dist[v] is not None and dist[v] > ell + 1]
        if not far:
            return h, trace
        v = far[0]
        u = h.adj[v][0]
        blobs = trace.blobs()
        keep, gone = blobs[u][0], blobs[v][0]
        merges.append((keep, gone))
        for x in blobs[v]:
            label[x] = label[keep]
        h, trace = quotient(g, label, merges)


def _finish(
    g: ColoredGraph,
    trace: ContractionTrace,
    zpath: Optional[Path],
    ell: Optional[int],
    stats: DPStats,
) -> Solution:
    if zpath is None:
        return Solution(False, stats=stats.as_dict())
    path = lift_path(trace, g, zpath)
    colors = chi_of_path(g, path)
    if popcount(colors) > g.budget or (ell is not None and len(path) - 1 > ell):
        raise AssertionError("solver produced a path violating a bound")
    return Solution(True, path, colors, stats.as_dict())


def _solve_bounded_prepared(
    g: ColoredGraph,
    h: ColoredGraph,
    base: ContractionTrace,
    ell: int,
    td: Optional[TreeDecomposition],
    strategy: str,
    cap: int,
    lifted_ell: Optional[int] = None,
) -> Solution:
    """``h`` is the normalized graph obtained from ``g`` through ``base``.

    ``lifted_ell`` is the bound the lifted path must meet in ``g`` (lifting
    through a nontrivial ``base`` may lengthen the path).
    """
    dist = bfs_distances(h, h.source)
    if dist[h.target] is None or dist[h.target] > ell:
        return Solution(False, stats=DPStats().as_dict())
    r, trace = contract_distant(h, ell)
    full = base.then(trace)
    if r.has_edge(r.source, r.target):
        return _finish(g, full, (r.source, r.target), lifted_ell, DPStats())
    rtd = map_decomposition(td, full.vertex_map) if td is not None else None
    best, stats = run_dp(r, rtd, strategy, ell, cap)
    zpath = best.paths[0] if best is not None else None
    return _finish(g, full, zpath, lifted_ell, stats)


def solve_bounded(
    g: ColoredGraph,
    ell: Optional[int] = None,
    td: Optional[TreeDecomposition] = None,
    strategy: str = "min-fill",
    cap: int = DEFAULT_CAP,
) -> Solution:
    """Decide whether an s-t path with at most ``g.budget`` colors and at most
    ``ell`` edges exists (``ell`` defaults to the instance's length bound)."""
    if ell is None:
        ell = g.length_bound
    if ell is None:
        raise InstanceError("no length bound given")
    if ell < 0:
        raise InstanceError("negative length bound")
    h, early = prepare(g)
    if early is not None:
        if early.found and ell < 1:
            return Solution(False, stats=early.stats)
        return early
    return _solve_bounded_prepared(g, h, ContractionTrace.identity(g.n), ell, td, strategy, cap, ell)


def solve_via_length_bound(g: ColoredGraph, h_of_k: int, **kw) -> Solution:
    """Solve with a caller-supplied cap on the path length."""
    return solve_bounded(g, h_of_k, **kw)


def length_bound_for(k: int, iota: int) -> int:
    """On an irreducible graph a k-valid path can be shortened to have at most
    k*iota nonempty vertices and no two consecutive empty ones."""
    return 2 * k * iota + 1


def solve_bounded_intersection(
    g: ColoredGraph,
    strategy: str = "min-fill",
    cap: int = DEFAULT_CAP,
) -> Solution:
    """Unbounded decision via the length-bounded solver, with the length cap
    derived from the intersection number of the reduced instance."""
    h, early = prepare(g)
    if early is not None:
        return early
    r, trace = reduce_to_irreducible(h)
    ell = length_bound_for(r.budget, intersection_number(r))
    sol = _solve_bounded_prepared(g, r, trace, ell, None, strategy, cap)
    sol.stats["ell"] = ell
    return sol
