"""Edge-weighted trees with labeled leaves.

Nodes are the integers ``0..N-1``; an edge is ``(u, v, w)`` with ``u < v``
and a non-negative integer weight.  Every degree-1 node is a leaf and
carries a unique string label.  Internal node ids carry no meaning and are
not preserved by the transformations in this module.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping


class TreeError(ValueError):
    """Structural problem with a tree (not a tree, bad labels, bad weights)."""


class NewickError(TreeError):
    pass


@dataclass(frozen=True)
class WeightedTree:
    edges: tuple[tuple[int, int, int], ...]
    labels: Mapping[int, str]
    root: int | None = None
    _adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = tuple(sorted((min(u, v), max(u, v), w) for u, v, w in self.edges))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "labels", dict(self.labels))
        n_nodes = len(edges) + 1
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
        for u, v, w in edges:
            if not (0 <= u < n_nodes and 0 <= v < n_nodes) or u == v:
                raise TreeError(f"edge ({u}, {v}) invalid for a tree on {n_nodes} nodes")
            if not isinstance(w, int) or w < 0:
                raise TreeError(f"edge ({u}, {v}) has weight {w!r}; need integer >= 0")
            adj[u].append((v, w))
            adj[v].append((u, w))
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))
        # connectivity (with |E| = |V| - 1 this makes it a tree)
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y, _ in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n_nodes:
            raise TreeError("edges do not form a connected tree")
        if self.root is not None and not 0 <= self.root < n_nodes:
            raise TreeError(f"root {self.root} is not a node")
        for node, label in self.labels.items():
            if not 0 <= node < n_nodes:
                raise TreeError(f"label {label!r} on missing node {node}")
            if n_nodes > 1 and len(adj[node]) != 1:
                raise TreeError(f"label {label!r} on non-leaf node {node}")
        if len(set(self.labels.values())) != len(self.labels):
            raise TreeError("duplicate leaf labels")
        if n_nodes > 1:
            unlabeled = [x for x in range(n_nodes) if len(adj[x]) == 1 and x not in self.labels]
            if unlabeled:
                raise TreeError(f"leaves without labels: {unlabeled}")

    @property
    def node_count(self) -> int:
        return len(self.edges) + 1

    def neighbors(self, x: int) -> tuple[tuple[int, int], ...]:
        return self._adj[x]

    def degree(self, x: int) -> int:
        return len(self._adj[x])

    @property
    def leaves(self) -> list[int]:
        return sorted(self.labels)

    @property
    def internal_nodes(self) -> list[int]:
        return [x for x in range(self.node_count) if x not in self.labels]

    @property
    def leaf_labels(self) -> list[str]:
        return [self.labels[x] for x in self.leaves]

    def leaf_of(self, label: str) -> int:
        for node, lab in self.labels.items():
            if lab == label:
                return node
        raise KeyError(label)

    def weight(self, u: int, v: int) -> int:
        for y, w in self._adj[u]:
            if y == v:
                return w
        raise KeyError((u, v))

    def distances_from(self, src: int) -> list[int]:
        dist = [-1] * self.node_count
        dist[src] = 0
        queue = deque([src])
        while queue:
            x = queue.popleft()
            for y, w in self._adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + w
                    queue.append(y)
        return dist

    def path_edges(self, a: int, b: int) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` on the unique a-b path."""
        parent = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            for y, _ in self._adj[x]:
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        out = []
        x = b
        while parent[x] is not None:
            p = parent[x]
            out.append((min(p, x), max(p, x)))
            x = p
        return out

    def with_weights(self, weights: Iterable[int]) -> "WeightedTree":
        """Same structure with new weights, given in ``self.edges`` order."""
        weights = list(weights)
        if len(weights) != len(self.edges):
            raise TreeError(f"expected {len(self.edges)} weights, got {len(weights)}")
        return WeightedTree(tuple((u, v, w) for (u, v, _), w in zip(self.edges, weights)),
                            self.labels, self.root)

    def relabel_leaves(self, mapping: Mapping[str, str]) -> "WeightedTree":
        return WeightedTree(self.edges, {x: mapping.get(l, l) for x, l in self.labels.items()},
                            self.root)

    def max_leaf_distance(self) -> int:
        dm = leaf_distance_matrix(self)
        return max((max(row) for row in dm.d), default=0)


@dataclass(frozen=True)
class DistanceMatrix:
    labels: tuple[str, ...]
    d: tuple[tuple[int, ...], ...]

    def __getitem__(self, pair: tuple[str, str]) -> int:
        i = self.labels.index(pair[0])
        j = self.labels.index(pair[1])
        return self.d[i][j]

    def satisfies_four_point(self) -> bool:
        """Check d(a,b)+d(c,d) <= max of the other two pairings for every quadruple."""
        d = self.d
        for a, b, c, e in combinations(range(len(self.labels)), 4):
            s = sorted((d[a][b] + d[c][e], d[a][c] + d[b][e], d[a][e] + d[b][c]))
            if s[1] != s[2]:
                return False
        return True


def leaf_distance_matrix(tree: WeightedTree) -> DistanceMatrix:
    leaves = tree.leaves
    rows = []
    for a in leaves:
        dist = tree.distances_from(a)
        rows.append(tuple(dist[b] for b in leaves))
    return DistanceMatrix(tuple(tree.labels[x] for x in leaves), tuple(rows))


def distance_dict(tree: WeightedTree) -> dict[tuple[str, str], int]:
    """Leaf distances keyed by label pairs (both orders)."""
    dm = leaf_distance_matrix(tree)
    out = {}
    for i, a in enumerate(dm.labels):
        for j, b in enumerate(dm.labels):
            out[a, b] = dm.d[i][j]
    return out


# structure predicates ---------------------------------------------------------

def is_full_binary(tree: WeightedTree, unrooted: bool = False) -> bool:
    """All internal nodes have degree 3.

    In the rooted reading one node of degree 2 is tolerated: the designated
    root if there is one, otherwise any single node.
    """
    twos = []
    for x in tree.internal_nodes:
        deg = tree.degree(x)
        if deg == 2:
            twos.append(x)
        elif deg != 3:
            return False
    if unrooted or not twos:
        return not twos
    if len(twos) > 1:
        return False
    return tree.root is None or twos[0] == tree.root


def is_caterpillar(tree: WeightedTree) -> bool:
    """Removing all leaves leaves a path (hop distance, weights ignored)."""
    inner = set(tree.internal_nodes)
    if len(inner) <= 1:
        return True
    inner_deg = {x: sum(1 for y, _ in tree.neighbors(x) if y in inner) for x in inner}
    # The inner nodes induce a subtree; it is a path iff no node has inner degree > 2.
    return all(d <= 2 for d in inner_deg.values())


# normalization ----------------------------------------------------------------

def _rebuild(adj: dict[int, dict[int, int]], labels: Mapping[int, str],
             root: int | None = None) -> WeightedTree:
    order = sorted(adj, key=lambda x: (x not in labels, x))
    index = {x: i for i, x in enumerate(order)}
    edges = {(min(index[u], index[v]), max(index[u], index[v]), w)
             for u, nbrs in adj.items() for v, w in nbrs.items()}
    return WeightedTree(tuple(edges), {index[x]: lab for x, lab in labels.items()},
                        index[root] if root is not None else None)


def _adjacency(tree: WeightedTree) -> dict[int, dict[int, int]]:
    adj: dict[int, dict[int, int]] = {x: {} for x in range(tree.node_count)}
    for u, v, w in tree.edges:
        adj[u][v] = w
        adj[v][u] = w
    return adj


def suppress_degree_two(tree: WeightedTree) -> WeightedTree:
    """Splice out every internal degree-2 node, adding its two edge weights."""
    adj = _adjacency(tree)
    for x in list(adj):
        if x in tree.labels or len(adj[x]) != 2:
            continue
        (a, wa), (b, wb) = adj[x].items()
        del adj[a][x], adj[b][x], adj[x]
        adj[a][b] = wa + wb
        adj[b][a] = wa + wb
    return _rebuild(adj, tree.labels)


def binarize(tree: WeightedTree) -> WeightedTree:
    """Equivalent unrooted tree whose internal nodes all have degree 3.

    Degree-2 nodes are spliced out; a node of degree d > 3 becomes a chain of
    d - 2 nodes joined by weight-0 edges.  Leaf distances are unchanged.
    """
    if len(tree.labels) < 3:
        raise TreeError("binarize needs at least 3 leaves")
    stree = suppress_degree_two(tree)
    adj = _adjacency(stree)
    labels = dict(stree.labels)
    next_id = len(adj)
    for x in list(adj):
        if x in labels or len(adj[x]) <= 3:
            continue
        nbrs = sorted(adj[x].items())
        for y, _ in nbrs:
            del adj[y][x]
        del adj[x]
        # chain c_0 - c_1 - ... - c_{d-3}; c_0 takes two neighbours, the last
        # takes two, the middle ones one each.
        chain = list(range(next_id, next_id + len(nbrs) - 2))
        next_id += len(chain)
        for c in chain:
            adj[c] = {}
        for c1, c2 in zip(chain, chain[1:]):
            adj[c1][c2] = adj[c2][c1] = 0
        slots = [chain[0], chain[0]] + chain[1:-1] + [chain[-1], chain[-1]]
        for (y, w), c in zip(nbrs, slots):
            adj[c][y] = adj[y][c] = w
    return _rebuild(adj, labels)


# Newick -----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([(),;:]|[^(),;:\s]+)")


def parse_newick(text: str) -> WeightedTree:
    """Parse Newick with integer branch lengths (missing lengths default to 1)."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    if not tokens or tokens[-1][0] != ";":
        raise NewickError("Newick string must end with ';'")

    edges: list[tuple[int, int, int]] = []
    names: dict[int, str] = {}
    counter = [0]
    i = 0

    def peek() -> str:
        return tokens[i][0] if i < len(tokens) else ""

    def take() -> tuple[str, int]:
        nonlocal i
        if i >= len(tokens):
            raise NewickError("unexpected end of input (unbalanced parentheses?)")
        tok = tokens[i]
        i += 1
        return tok

    def node() -> tuple[int, int | None]:
        me = counter[0]
        counter[0] += 1
        children: list[tuple[int, int | None]] = []
        if peek() == "(":
            take()
            children.append(node())
            while peek() == ",":
                take()
                children.append(node())
            tok, at = take()
            if tok != ")":
                raise NewickError(f"expected ')' at offset {at}, got {tok!r}")
        if peek() not in ("(", ")", ",", ";", ":", ""):
            names[me] = take()[0]
        length = None
        if peek() == ":":
            take()
            tok, at = take()
            if not re.fullmatch(r"\d+", tok):
                raise NewickError(f"branch length {tok!r} at offset {at} is not a "
                                  "non-negative integer")
            length = int(tok)
        for child, w in children:
            edges.append((me, child, 1 if w is None else w))
        return me, length

    root, _ = node()
    tok, at = take()
    if tok != ";":
        raise NewickError(f"unexpected {tok!r} at offset {at} (unbalanced parentheses?)")
    if i != len(tokens):
        raise NewickError(f"trailing data at offset {tokens[i][1]}")
    n_nodes = counter[0]
    deg = [0] * n_nodes
    for u, v, _ in edges:
        deg[u] += 1
        deg[v] += 1
    labels = {}
    seen = set()
    for x, name in names.items():
        if n_nodes > 1 and deg[x] != 1:
            continue  # internal node names carry no meaning here
        if name in seen:
            raise NewickError(f"duplicate leaf label {name!r}")
        seen.add(name)
        labels[x] = name
    try:
        return WeightedTree(tuple(edges), labels, root)
    except TreeError as exc:
        raise NewickError(str(exc)) from None


def encode_newick(tree: WeightedTree) -> str:
    """Canonical Newick: rooted at ``tree.root`` (else the first internal node),
    children sorted by their serialization."""
    if tree.root is not None:
        root = tree.root
    else:
        internal = tree.internal_nodes
        root = internal[0] if internal else tree.leaves[0]

    def render(x: int, parent: int | None) -> str:
        kids = sorted(f"{render(y, x)}:{w}" for y, w in tree.neighbors(x) if y != parent)
        inner = f"({','.join(kids)})" if kids else ""
        return inner + tree.labels.get(x, "")

    return render(root, None) + ";"


def to_dot(tree: WeightedTree, name: str = "T") -> str:
    lines = [f"graph {name} {{"]
    for x in range(tree.node_count):
        if x in tree.labels:
            lines.append(f'  n{x} [label="{tree.labels[x]}", shape=box];')
        else:
            lines.append(f'  n{x} [label="", shape=point];')
    for u, v, w in tree.edges:
        lines.append(f'  n{u} -- n{v} [label="{w}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
