"""Shared builders and brute-force checkers for the test suite."""

import random
from itertools import product

from colorpath.generators import gen_random_planar
from colorpath.graph import popcount
from colorpath.oracles import all_paths
from colorpath.repset import enumerate_patterns, make_sequence


def random_instance(seed, max_n=14, max_colors=6, max_k=4, keep=0.75):
    rng = random.Random(seed)
    n = rng.randint(2, max_n)
    nc = rng.randint(0, max_colors)
    k = rng.randint(0, max_k)
    return gen_random_planar(n, nc, seed, k=k, keep=keep)


def path_chi(g, p):
    m = 0
    for v in p:
        m |= g.chi[v]
    return m


def conforming_sequences(g, bag, below, pattern, k, ell=None):
    """Every sequence of simple paths conforming to (bag, pattern)."""
    verts, bits = pattern
    below = set(below)
    options = []
    for q, b in enumerate(bits):
        if not b:
            options.append([()])
            continue
        u, v = verts[q], verts[q + 1]
        banned = [x for x in range(g.n) if x not in below and x not in (u, v)]
        options.append([p for p in all_paths(g, u, v, banned=banned, k=k)])
    out = []
    for combo in product(*options):
        sq = make_sequence(g, combo)
        if popcount(sq.chi) > k:
            continue
        if ell is not None and sq.length > ell:
            continue
        out.append(sq)
    return out


def disjoint_outside(seq, bag):
    seen = set()
    for p in seq.paths:
        for v in p:
            if v in bag:
                continue
            if v in seen:
                return False
            seen.add(v)
    return True


def check_node_table(g, bag, below, table, k, ell=None):
    """Return a list of problems with one node's table (empty when sound)."""
    bag = set(bag)
    bx = 0
    for v in bag:
        bx |= g.chi[v]
    below = set(below)
    problems = []
    dom = (lambda a, b: popcount(a.chi | (b.chi & bx)) <= popcount(b.chi)
           and (ell is None or a.length <= b.length))
    for pat in enumerate_patterns(g, bag, k):
        stored = table.get(pat, [])
        verts, bits = pat
        for sq in stored:
            if popcount(sq.chi) > k or (ell is not None and sq.length > ell):
                problems.append(("over budget", pat, sq))
            for q, b in enumerate(bits):
                p = sq.paths[q]
                if not b:
                    if p:
                        problems.append(("gap filled", pat, sq))
                    continue
                if p[0] != verts[q] or p[-1] != verts[q + 1] or len(set(p)) != len(p):
                    problems.append(("bad endpoints", pat, sq))
                if any(x not in below for x in p[1:-1]):
                    problems.append(("interior above bag", pat, sq))
                if any(not g.has_edge(a, c) for a, c in zip(p, p[1:])):
                    problems.append(("not a path", pat, sq))
                if ell is None:
                    u, v = p[0], p[-1]
                    banned = [x for x in range(g.n) if x not in below and x not in (u, v)]
                    mine = path_chi(g, p)
                    for other in all_paths(g, u, v, banned=banned):
                        oc = path_chi(g, other)
                        if oc != mine and oc & ~mine == 0:
                            problems.append(("path not minimal", pat, sq))
                            break
        for a in stored:
            for b in stored:
                if a is not b and dom(a, b):
                    problems.append(("member dominates member", pat, a, b))
        for sq in conforming_sequences(g, bag, below, pat, k, ell):
            if not disjoint_outside(sq, bag):
                continue
            if not any(dom(w, sq) for w in stored):
                problems.append(("not represented", pat, sq))
    return problems


def random_walk(g, u, v, allowed, rng, max_steps=25):
    """A random walk from u to v through ``allowed`` (None if it gets lost)."""
    walk = [u]
    x = u
    for _ in range(max_steps):
        nbrs = [y for y in g.adj[x] if y in allowed or y == v]
        if not nbrs:
            return None
        x = rng.choice(nbrs)
        walk.append(x)
        if x == v:
            return tuple(walk)
    return None


def random_walk_sequences(g, bag, below, pattern, rng, count):
    verts, bits = pattern
    allowed = set(below)
    out = []
    for _ in range(count * 4):
        paths = []
        for q, b in enumerate(bits):
            if not b:
                paths.append(())
                continue
            w = random_walk(g, verts[q], verts[q + 1], allowed, rng)
            if w is None:
                break
            paths.append(w)
        else:
            out.append(make_sequence(g, paths))
        if len(out) >= count:
            break
    return out
