import random

import pytest

from colorpath.bounded import (
    contract_distant,
    length_bound_for,
    preceq_with_length,
    refine_with_length,
    solve_bounded,
    solve_bounded_intersection,
    solve_via_length_bound,
)
from colorpath.geometry import Disk, ObstacleScene, SceneError, rasterize_scene
from colorpath.graph import (
    ColoredGraph,
    InstanceError,
    NotColorConnected,
    bfs_distances,
    chi_of_path,
    intersection_number,
    is_color_connected,
    is_valid_path,
    popcount,
    reduce_to_irreducible,
)
from colorpath.oracles import all_paths, bounded_pareto, pareto_exact
from colorpath.repset import PathSequence, RepsetDP, make_sequence, prepare, solve_colored_path
from colorpath.treedecomp import decompose, make_nice

from helpers import check_node_table, random_instance


def path_graph(n, colors=None, k=0):
    return ColoredGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)], colors, source=0, target=n - 1, budget=k)


def diamond():
    # s=0, a=1, t=2 with a two-colored; empty detour 0-3-4-5-2 of four edges
    return ColoredGraph.from_edges(
        6, [(0, 1), (1, 2), (0, 3), (3, 4), (4, 5), (5, 2)], {1: [0, 1]}, n_colors=2,
        source=0, target=2, budget=1,
    )


def brute_bounded(g, ell):
    best = None
    for p in all_paths(g, g.source, g.target):
        if len(p) - 1 <= ell:
            c = popcount(chi_of_path(g, p))
            best = c if best is None else min(best, c)
    return best


def test_contract_distant_on_long_path():
    g = path_graph(11)
    h, trace = contract_distant(g, 3)
    dist = bfs_distances(h, h.source)
    assert max(d for d in dist if d is not None) <= 4
    # the s-side stays intact
    assert [trace.vertex_map[v] for v in range(5)] == [0, 1, 2, 3, 4]
    assert len(set(trace.vertex_map[4:])) == 1


def test_contract_distant_merges_colors():
    g = path_graph(6, {4: [0], 5: [1]})
    h, _ = contract_distant(g, 2)
    assert h.n == 4
    assert h.chi[3] == 0b11


def test_contract_distant_fixpoint():
    g = path_graph(4)
    h, trace = contract_distant(g, 3)
    assert h == g and trace.merges == ()


def test_contract_distant_preserves_bounded_answer():
    for seed in range(200):
        g = random_instance(seed)
        ell = random.Random(seed).randint(0, 8)
        h, _ = contract_distant(g, ell)
        assert is_color_connected(h)[0]
        dist = bfs_distances(h, h.source)
        assert all(d is None or d <= ell + 1 for d in dist)
        a, b = bounded_pareto(g, ell), bounded_pareto(h, ell)
        assert a.found == b.found and a.value == b.value


def test_preceq_with_length_examples():
    a = PathSequence(((0, 1),), 0b1, 1)
    assert preceq_with_length(a, a, 0b1)
    longer = PathSequence(((0, 2, 3, 1),), 0b1, 3)
    wider = PathSequence(((0, 4, 1),), 0b11, 2)
    assert not preceq_with_length(longer, wider, 0)
    assert preceq_with_length(a, wider, 0)


def test_refine_with_length_filters_long_sequences():
    g = path_graph(5)
    seq = make_sequence(g, [(0, 1, 2, 3, 4)])
    assert refine_with_length([seq], {0, 4}, ((0, 4), (1,)), g, 3) == []


def test_refine_with_length_shortens_walks():
    g = diamond()
    walk = make_sequence(g, [(0, 3, 4, 3, 0, 1, 2)])
    out = refine_with_length([walk], {0, 2}, ((0, 2), (1,)), g, 8)
    assert len(out) == 1
    assert out[0].length <= walk.length and out[0].chi & ~walk.chi == 0
    assert out[0].paths[0] == (0, 1, 2)


def test_refine_with_length_keeps_both_pareto_options():
    g = diamond()
    short = make_sequence(g, [(0, 1, 2)])
    detour = make_sequence(g, [(0, 3, 4, 5, 2)])
    out = refine_with_length([short, detour], {0, 2}, ((0, 2), (1,)), g, 8)
    assert set(out) == {short, detour}


def test_bounded_tables_match_brute_force():
    checked = 0
    for seed in range(200):
        g = random_instance(seed, max_n=8, max_colors=4, max_k=3)
        h, early = prepare(g)
        if early is not None:
            continue
        ell = 1 + seed % 6
        nice = make_nice(decompose(h), h.source, h.target)
        dp = RepsetDP(h, nice, h.budget, ell)
        _, tables = dp.run(keep_tables=True)
        for i, node in enumerate(nice.nodes):
            assert check_node_table(h, node.bag, dp.below[i], tables[i], h.budget, ell) == [], (seed, i)
        checked += 1
    assert checked >= 60


def test_two_edge_empty_path():
    assert solve_bounded(path_graph(3), 2).found


def test_diamond_examples():
    g = diamond()
    assert brute_bounded(g, 4) == 0 and brute_bounded(g, 2) == 2
    assert bounded_pareto(g, 4).value == 0
    assert bounded_pareto(g, 2).value == 2
    sol = solve_bounded(g, 4)
    assert sol.found and sol.path == (0, 3, 4, 5, 2)
    assert not solve_bounded(g, 2).found
    assert solve_bounded(g.with_budget(2), 2).found


def test_solve_bounded_uses_instance_bound():
    g = diamond().with_length_bound(4)
    assert solve_bounded(g).found
    with pytest.raises(InstanceError):
        solve_bounded(diamond())


def test_solve_bounded_rejects_disconnected_colors():
    g = path_graph(4, {0: [0], 2: [0]}, k=2)
    with pytest.raises(NotColorConnected):
        solve_bounded(g, 4)


def test_solve_bounded_adjacent_endpoints_need_positive_bound():
    g = ColoredGraph.from_edges(2, [(0, 1)], source=0, target=1)
    assert solve_bounded(g, 1).found
    assert not solve_bounded(g, 0).found


def test_solve_bounded_matches_oracle_on_random_suite():
    for seed in range(100):
        g = random_instance(seed)
        ell = random.Random(seed + 7).randint(0, 8)
        sol = solve_bounded(g, ell)
        ref = bounded_pareto(g, ell)
        assert sol.found == (ref.found and ref.value <= g.budget)
        if sol.found:
            assert is_valid_path(g, sol.path) and len(sol.path) - 1 <= ell
            assert popcount(chi_of_path(g, sol.path)) <= g.budget


def test_solve_bounded_monotone_in_length():
    for seed in range(60):
        g = random_instance(seed)
        answers = [solve_bounded(g, ell).found for ell in range(0, 9)]
        first = answers.index(True) if True in answers else len(answers)
        assert all(answers[first:])


def test_length_cap_below_distance_is_no():
    g = path_graph(5, k=3)
    assert not solve_via_length_bound(g, 3).found


def test_length_cap_n_minus_one_is_unbounded():
    for seed in range(60):
        g = random_instance(seed)
        assert solve_via_length_bound(g, g.n - 1).found == solve_colored_path(g).found


def disk_scene(seed):
    rng = random.Random(seed)
    obs = [Disk(rng.uniform(1.5, 8.5), rng.uniform(0.5, 9.5), 1.0) for _ in range(rng.randint(3, 9))]
    return ObstacleScene(10, 10, 3, obs, (0.2, 5.0), (9.8, 5.0))


def test_unit_disk_scenes_within_three_k():
    checked = 0
    for seed in range(40):
        try:
            g = rasterize_scene(disk_scene(seed))
        except SceneError:
            continue
        opt = pareto_exact(g).value
        # the cap applies to the region graph, where each vertex is one face
        r, _ = reduce_to_irreducible(g)
        least = next(k for k in range(r.n_colors + 1)
                     if solve_via_length_bound(r.with_budget(k), max(3 * k, 1)).found)
        assert least == opt
        checked += 1
    assert checked >= 30


def test_intersection_bound_formula():
    g = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)], {1: [0], 2: [1]}, source=0, target=3, budget=2)
    assert intersection_number(g) == 1
    assert length_bound_for(2, 1) == 5


def test_solve_bounded_intersection_matches_unbounded():
    checked = 0
    for seed in range(400):
        g = random_instance(seed)
        if intersection_number(g) > 3:
            continue
        ref = pareto_exact(g)
        assert solve_bounded_intersection(g).found == (ref.found and ref.value <= g.budget)
        checked += 1
        if checked == 50:
            break
    assert checked == 50


def test_optimal_path_fits_intersection_bound():
    for seed in range(150):
        g = random_instance(seed)
        h, early = prepare(g)
        if early is not None:
            continue
        r, _ = reduce_to_irreducible(h)
        ref = pareto_exact(r)
        if not ref.found:
            continue
        ell = length_bound_for(ref.value, intersection_number(r))
        assert bounded_pareto(r, ell).value == ref.value
