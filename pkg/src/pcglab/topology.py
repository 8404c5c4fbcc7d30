"""Unweighted tree shapes used as search skeletons.

A :class:`Topology` is a tree whose leaf slots are the node ids ``0..n-1``
(labeled ``"0"``, ``"1"``, ...) and whose internal nodes all have degree 3.
Only unrooted shapes are enumerated: leaf distances do not depend on where a
tree is rooted, and degree-2 nodes can always be spliced out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterator

from .tree import WeightedTree, suppress_degree_two, to_dot, encode_newick

MIN_ENUM_LEAVES = 3
MAX_ENUM_LEAVES = 10


@dataclass(frozen=True)
class Topology:
    tree: WeightedTree
    name: str = ""
    rooted_tree: WeightedTree | None = None
    automorphisms: tuple[tuple[int, ...], ...] = field(default=(), compare=False)
    edge_maps: tuple[tuple[int, ...], ...] = field(default=(), compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.tree.labels)

    @property
    def edge_count(self) -> int:
        return len(self.tree.edges)

    @property
    def group_order(self) -> int:
        return len(self.automorphisms)

    def newick(self) -> str:
        return encode_newick(self.rooted_tree or self.tree)

    def dot(self) -> str:
        return to_dot(self.rooted_tree or self.tree, self.name or "T")


def make_topology(tree: WeightedTree, name: str = "",
                  rooted_tree: WeightedTree | None = None) -> Topology:
    """Wrap a tree with leaf slots 0..n-1 and compute its symmetry group."""
    n = len(tree.labels)
    if sorted(tree.labels) != list(range(n)):
        raise ValueError("topology leaves must be the nodes 0..n-1")
    autos = leaf_automorphisms(tree)
    splits = edge_splits(tree)
    index = {s: i for i, s in enumerate(splits)}
    maps = []
    for perm in autos:
        maps.append(tuple(index[_canon_split({perm[x] for x in s}, n)] for s in splits))
    return Topology(tree, name, rooted_tree, tuple(autos), tuple(maps))


# shape construction -------------------------------------------------------------

def _slot_tree(n: int, edges: list[tuple[int, int]], root: int | None = None) -> WeightedTree:
    return WeightedTree(tuple((u, v, 1) for u, v in edges),
                        {i: str(i) for i in range(n)}, root)


def star_topology(n: int = 3) -> Topology:
    return make_topology(_slot_tree(n, [(i, n) for i in range(n)]), f"star{n}")


def caterpillar_topology(n: int) -> Topology:
    """Spine of n-2 internal nodes; two leaves on each end, one on every other."""
    if n < 2:
        raise ValueError("caterpillar needs at least 2 leaves")
    if n == 2:
        return make_topology(_slot_tree(2, [(0, 1)]), "caterpillar2")
    if n == 3:
        return make_topology(_slot_tree(3, [(0, 3), (1, 3), (2, 3)]), "caterpillar3")
    spine = list(range(n, 2 * n - 2))
    edges = list(zip(spine, spine[1:]))
    edges += [(0, spine[0]), (1, spine[0])]
    for i in range(2, n - 2):
        edges.append((i, spine[i - 1]))
    edges += [(n - 2, spine[-1]), (n - 1, spine[-1])]
    return make_topology(_slot_tree(n, edges), f"caterpillar{n}")


def complete_binary_topology(n: int) -> Topology:
    """Perfectly balanced rooted binary tree on ``n`` (a power of 2) leaves.

    ``rooted_tree`` keeps the degree-2 root; ``tree`` has it spliced out.
    """
    if n < 2 or n & (n - 1):
        raise ValueError(f"complete binary topology needs a power of 2 >= 2, got {n}")
    if n == 2:
        return make_topology(_slot_tree(2, [(0, 1)]), "complete2")
    # heap numbering: internal heap positions 1..n-1, leaves n..2n-1
    def node_id(h: int) -> int:
        return h - n if h >= n else n + h - 1
    edges = [(node_id(h), node_id(2 * h)) for h in range(1, n)]
    edges += [(node_id(h), node_id(2 * h + 1)) for h in range(1, n)]
    rooted = _slot_tree(n, edges, root=node_id(1))
    return make_topology(suppress_degree_two(rooted), f"complete{n}", rooted)


def tree_canonical_string(tree: WeightedTree) -> str:
    """Isomorphism-invariant encoding of the unlabeled shape (AHU from the center)."""
    n_nodes = tree.node_count
    if n_nodes <= 2:
        return "()" * n_nodes
    deg = [tree.degree(x) for x in range(n_nodes)]
    layer = [x for x in range(n_nodes) if deg[x] == 1]
    remaining = n_nodes
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for x in layer:
            for y, _ in tree.neighbors(x):
                deg[y] -= 1
                if deg[y] == 1:
                    nxt.append(y)
        layer = nxt
    centers = layer

    def encode(x: int, parent: int | None) -> str:
        kids = sorted(encode(y, x) for y, _ in tree.neighbors(x) if y != parent)
        return "(" + "".join(kids) + ")"

    if len(centers) == 1:
        return encode(centers[0], None)
    a, b = centers
    return "".join(sorted((encode(a, b), encode(b, a))))


def _insert_leaf(tree: WeightedTree, edge_index: int) -> WeightedTree:
    # Subdivide one edge with a new internal node and hang a new leaf on it.
    n = len(tree.labels)
    # shift internal ids up by one to make room for new leaf id n
    def shift(x: int) -> int:
        return x if x < n else x + 1
    edges = []
    new_internal = tree.node_count + 1
    for i, (u, v, _) in enumerate(tree.edges):
        if i == edge_index:
            edges += [(shift(u), new_internal), (new_internal, shift(v))]
        else:
            edges.append((shift(u), shift(v)))
    edges.append((n, new_internal))
    return _slot_tree(n + 1, edges)


def enumerate_topologies(n: int) -> list[Topology]:
    """All pairwise non-isomorphic unrooted binary shapes with ``n`` leaves."""
    if not MIN_ENUM_LEAVES <= n <= MAX_ENUM_LEAVES:
        raise ValueError(f"n must be in [{MIN_ENUM_LEAVES}, {MAX_ENUM_LEAVES}], got {n}")
    shapes = {tree_canonical_string(star_topology(3).tree): star_topology(3).tree}
    for m in range(3, n):
        grown: dict[str, WeightedTree] = {}
        for key in sorted(shapes):
            t = shapes[key]
            for i in range(len(t.edges)):
                child = _insert_leaf(t, i)
                grown.setdefault(tree_canonical_string(child), child)
        shapes = grown
    # prefer the named caterpillar layout when it is one of the shapes
    cat = caterpillar_topology(n)
    cat_key = tree_canonical_string(cat.tree)
    out = []
    for idx, key in enumerate(sorted(shapes)):
        if key == cat_key:
            out.append(cat)
        else:
            out.append(make_topology(shapes[key], f"shape{n}_{idx}"))
    out.sort(key=lambda t: (t is not cat, tree_canonical_string(t.tree)))
    return out


# symmetry -----------------------------------------------------------------------

def _hop_matrix(tree: WeightedTree) -> list[list[int]]:
    n = len(tree.labels)
    hops = WeightedTree(tuple((u, v, 1) for u, v, _ in tree.edges), tree.labels)
    return [hops.distances_from(a)[:n] for a in range(n)]


def leaf_automorphisms(tree: WeightedTree) -> list[tuple[int, ...]]:
    """Leaf-slot permutations induced by automorphisms of the shape.

    For trees without degree-2 nodes the leaf hop metric determines the tree,
    so these are exactly the permutations preserving it.
    """
    n = len(tree.labels)
    hop = _hop_matrix(tree)
    out: list[tuple[int, ...]] = []
    perm = [-1] * n
    used = [False] * n

    def extend(i: int) -> None:
        if i == n:
            out.append(tuple(perm))
            return
        for img in range(n):
            if used[img]:
                continue
            if all(hop[i][j] == hop[img][perm[j]] for j in range(i)):
                perm[i] = img
                used[img] = True
                extend(i + 1)
                used[img] = False

    extend(0)
    return out


def _canon_split(side: set[int] | frozenset[int], n: int) -> frozenset[int]:
    side = frozenset(side)
    return side if 0 not in side else frozenset(range(n)) - side


def edge_splits(tree: WeightedTree) -> list[frozenset[int]]:
    """For each edge (in ``tree.edges`` order) the leaves on the side without leaf 0."""
    n = len(tree.labels)
    out = []
    for u, v, _ in tree.edges:
        seen = {u, v}
        stack = [v]
        side = set()
        while stack:
            x = stack.pop()
            if x < n:
                side.add(x)
            for y, _ in tree.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(_canon_split(side, n))
    return out


def assignments_mod_automorphism(topology: Topology, n: int | None = None
                                 ) -> Iterator[tuple[int, ...]]:
    """Lexicographically least member of every automorphism orbit of bijections.

    An assignment is a tuple ``sigma`` with ``sigma[node] = leaf slot``; the
    group acts by ``sigma -> alpha o sigma``.
    """
    n = topology.n if n is None else n
    if n != topology.n:
        raise ValueError(f"topology has {topology.n} leaf slots, not {n}")
    group = [a for a in topology.automorphisms if any(a[i] != i for i in range(n))]
    sigma: list[int] = []
    used = [False] * n

    def extend(active: list[tuple[int, ...]]) -> Iterator[tuple[int, ...]]:
        i = len(sigma)
        if i == n:
            yield tuple(sigma)
            return
        for slot in range(n):
            if used[slot]:
                continue
            still = []
            ok = True
            for a in active:
                img = a[slot]
                if img < slot:
                    ok = False
                    break
                if img == slot:
                    still.append(a)
            if not ok:
                continue
            sigma.append(slot)
            used[slot] = True
            yield from extend(still)
            used[slot] = False
            sigma.pop()

    yield from extend(group)


def orbit(topology: Topology, sigma: tuple[int, ...]) -> set[tuple[int, ...]]:
    return {tuple(a[s] for s in sigma) for a in topology.automorphisms}


def all_assignments(n: int) -> Iterator[tuple[int, ...]]:
    return permutations(range(n))


def topology_from_tree(tree: WeightedTree, name: str = "") -> tuple[Topology, list[str]]:
    """Topology with the shape of ``tree`` (weights ignored, degree-2 nodes spliced).

    Leaves are renumbered to slots 0..n-1 in label order (numeric when every
    label is an integer).  Returns the topology and the original label of
    each slot.
    """
    shape = suppress_degree_two(tree.with_weights([1] * len(tree.edges)))
    labels = list(shape.labels.values())
    if all(lab.lstrip("-").isdigit() for lab in labels):
        labels.sort(key=int)
    else:
        labels.sort()
    slot = {lab: i for i, lab in enumerate(labels)}
    leaf_slot = {x: slot[lab] for x, lab in shape.labels.items()}
    internal = [x for x in range(shape.node_count) if x not in leaf_slot]
    new_id = dict(leaf_slot)
    new_id.update({x: len(labels) + i for i, x in enumerate(internal)})
    edges = [(new_id[u], new_id[v]) for u, v, _ in shape.edges]
    return make_topology(_slot_tree(len(labels), edges), name), labels
