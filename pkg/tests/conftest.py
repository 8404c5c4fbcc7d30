from __future__ import annotations

import random

import pytest

from pcglab.graph import Graph
from pcglab.tree import WeightedTree
from pcglab.witness import IntervalSet, Witness


def random_tree(rng: random.Random, n_leaves: int, max_degree: int = 6,
                weights: tuple[int, int] = (0, 10)) -> WeightedTree:
    """Random tree with ``n_leaves`` labeled leaves and internal degree 2..max_degree."""
    if n_leaves == 2:
        return WeightedTree(((0, 1, rng.randint(*weights)),), {0: "0", 1: "1"})
    # grow a tree on internal nodes, then hang leaves so that every internal
    # node ends with degree >= 2 (degree-2 nodes are allowed, tests splice them)
    while True:
        n_int = rng.randint(1, max(1, n_leaves - 1))
        parent = {i: rng.randrange(i) for i in range(1, n_int)}
        deg = [0] * n_int
        for i, p in parent.items():
            deg[i] += 1
            deg[p] += 1
        slots = [i for i in range(n_int) for _ in range(max(0, max_degree - deg[i]))]
        need = [i for i in range(n_int) if deg[i] < 2 for _ in range(2 - deg[i])]
        if len(need) > n_leaves or len(slots) < n_leaves:
            continue
        hosts = list(need)
        pool = list(slots)
        for h in hosts:
            pool.remove(h)
        rng.shuffle(pool)
        hosts += pool[:n_leaves - len(hosts)]
        if len(hosts) != n_leaves:
            continue
        break
    edges = [(n_leaves + i, n_leaves + p, rng.randint(*weights)) for i, p in parent.items()]
    edges += [(leaf, n_leaves + h, rng.randint(*weights)) for leaf, h in enumerate(hosts)]
    labels = {i: str(i) for i in range(n_leaves)}
    return WeightedTree(tuple(edges), labels)


def random_graph(rng: random.Random, n: int, p: float | None = None) -> Graph:
    p = rng.random() if p is None else p
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)
                                if rng.random() < p])


def induced_witness(rng: random.Random, n: int, weights=(1, 10)) -> tuple[Graph, Witness]:
    """A random tree and interval, and the graph they realize (1 interval)."""
    from pcglab.tree import leaf_distance_matrix

    tree = random_tree(rng, n, weights=weights)
    perm = list(range(n))
    rng.shuffle(perm)
    assignment = {u: str(perm[u]) for u in range(n)}
    dm = leaf_distance_matrix(tree)
    pos = {lab: i for i, lab in enumerate(dm.labels)}
    vals = sorted({dm.d[i][j] for i in range(n) for j in range(i + 1, n)})
    a = rng.choice(vals)
    b = rng.choice([v for v in vals if v >= a])
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if a <= dm.d[pos[assignment[u]]][pos[assignment[v]]] <= b]
    return Graph.from_edges(n, edges), Witness(tree, assignment, IntervalSet(((a, b),)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)
