"""Simple undirected graphs on at most 16 labeled nodes.

Adjacency is stored as one bitmask per node, so a graph is a tuple of ints
and can be hashed, compared and shared freely between workers.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator

MAX_NODES = 16
GRAPH6_HEADER = ">>graph6<<"


class GraphFormatError(ValueError):
    """Raised when a graph6 or JSON graph description is malformed."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_NODES:
            raise ValueError(f"node count must be in [1, {MAX_NODES}], got {self.n}")
        if len(self.rows) != self.n:
            raise ValueError("one adjacency row per node required")
        full = (1 << self.n) - 1
        for u, row in enumerate(self.rows):
            if row & ~full:
                raise ValueError(f"row {u} references nodes outside 0..{self.n - 1}")
            if row >> u & 1:
                raise ValueError(f"self-loop at node {u}")
            for v in range(self.n):
                if (row >> v & 1) != (self.rows[v] >> u & 1):
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << u) for u in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, u: int) -> int:
        return bin(self.rows[u]).count("1")

    def neighbors(self, u: int) -> list[int]:
        return [v for v in range(self.n) if self.rows[u] >> v & 1]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n)
                if self.rows[u] >> v & 1]

    @property
    def edge_count(self) -> int:
        return sum(self.degree(u) for u in range(self.n)) // 2

    def complement(self) -> "Graph":
        full = (1 << self.n) - 1
        return Graph(self.n, tuple(full & ~r & ~(1 << u) for u, r in enumerate(self.rows)))

    def relabel(self, perm: tuple[int, ...] | list[int]) -> "Graph":
        """Return the graph with node ``u`` renamed to ``perm[u]``."""
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges()])

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        try:
            n = int(data["n"])
            edges = [(int(a), int(b)) for a, b in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"bad adjacency-list JSON: {exc}") from None
        return cls.from_edges(n, edges)

    def __str__(self) -> str:
        return encode_graph6(self)


# graph6 ---------------------------------------------------------------------

def _pair_bits(n: int) -> Iterator[tuple[int, int]]:
    # Upper triangle in column-major order: (0,1), (0,2), (1,2), (0,3), ...
    for j in range(1, n):
        for i in range(j):
            yield i, j


def parse_graph6(text: str) -> Graph:
    """Decode a single graph6 line (optional header allowed)."""
    s = text.strip()
    base = 0
    if s.startswith(GRAPH6_HEADER):
        base = len(GRAPH6_HEADER)
        s = s[base:]
    if not s:
        raise GraphFormatError("empty graph6 string", base)
    for i, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise GraphFormatError(f"character {ch!r} outside graph6 range", base + i)
    if s[0] == "~":
        # Long-form sizes exceed MAX_NODES anyway.
        raise GraphFormatError("graph6 long size prefix not supported (n > 62)", base)
    n = ord(s[0]) - 63
    if not 1 <= n <= MAX_NODES:
        raise GraphFormatError(f"node count {n} outside [1, {MAX_NODES}]", base)
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    body = s[1:]
    if len(body) < nbytes:
        raise GraphFormatError(
            f"expected {nbytes} data bytes for n={n}, got {len(body)}", base + len(s))
    if len(body) > nbytes:
        raise GraphFormatError("trailing data after graph", base + 1 + nbytes)
    bits = []
    for ch in body:
        val = ord(ch) - 63
        bits.extend((val >> k) & 1 for k in range(5, -1, -1))
    if any(bits[nbits:]):
        raise GraphFormatError("non-zero padding bits", base + len(s) - 1)
    edges = [pair for pair, bit in zip(_pair_bits(n), bits) if bit]
    return Graph.from_edges(n, edges)


def encode_graph6(g: Graph) -> str:
    bits = [int(g.has_edge(i, j)) for i, j in _pair_bits(g.n)]
    bits.extend([0] * (-len(bits) % 6))
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = val << 1 | b
        out.append(chr(val + 63))
    return "".join(out)


def read_graph_file(path) -> Graph:
    """Load a graph from a ``.g6`` file (first non-empty line) or a ``.json`` file."""
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        try:
            return Graph.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc.msg}", exc.pos) from None
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise GraphFormatError("no graph found in file")
    return parse_graph6(lines[0])


# structural queries -----------------------------------------------------------

def universal_nodes(g: Graph) -> set[int]:
    return {u for u in range(g.n) if g.degree(u) == g.n - 1}


def almost_universal_nodes(g: Graph) -> set[tuple[int, int]]:
    """Pairs ``(u, v)`` where ``v`` is the only node ``u`` is not adjacent to."""
    full = (1 << g.n) - 1
    out = set()
    for u in range(g.n):
        if g.degree(u) == g.n - 2:
            missing = full & ~g.rows[u] & ~(1 << u)
            out.add((u, missing.bit_length() - 1))
    return out


def remove_node(g: Graph, u: int) -> Graph:
    if not 0 <= u < g.n:
        raise IndexError(f"node {u} out of range for n={g.n}")
    if g.n < 2:
        raise ValueError("cannot remove the only node")
    keep = [v for v in range(g.n) if v != u]
    index = {v: i for i, v in enumerate(keep)}
    return Graph.from_edges(g.n - 1, [(index[a], index[b]) for a, b in g.edges()
                                      if u not in (a, b)])


def add_node(g: Graph, neighbors: Iterable[int]) -> Graph:
    """Append node ``g.n`` adjacent to ``neighbors``."""
    return Graph.from_edges(g.n + 1, g.edges() + [(v, g.n) for v in neighbors])


# isomorphism (brute force, small n) --------------------------------------------

def _degree_respecting_perms(g: Graph) -> Iterator[tuple[int, ...]]:
    # Canonical relabelings only need to map nodes to slots ordered by degree,
    # so permutations are taken within degree classes.
    order = sorted(range(g.n), key=lambda u: (g.degree(u), u))
    classes: list[list[int]] = []
    for u in order:
        if classes and g.degree(classes[-1][0]) == g.degree(u):
            classes[-1].append(u)
        else:
            classes.append([u])
    for combo in itertools.product(*(itertools.permutations(c) for c in classes)):
        seq = [u for part in combo for u in part]
        perm = [0] * g.n
        for slot, u in enumerate(seq):
            perm[u] = slot
        yield tuple(perm)


def _relabeled_bits(g: Graph, perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * g.n
    for u, slot in enumerate(perm):
        inv[slot] = u
    rows = g.rows
    return tuple(rows[inv[i]] >> inv[j] & 1 for i, j in _pair_bits(g.n))


def canonical_form(g: Graph) -> str:
    """Isomorphism-invariant key: the graph6 string of the relabeling with the
    lexicographically greatest upper-triangle bit string."""
    best = max(_degree_respecting_perms(g), key=lambda p: _relabeled_bits(g, p))
    return encode_graph6(g.relabel(best))


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count != h.edge_count:
        return False
    if sorted(map(g.degree, range(g.n))) != sorted(map(h.degree, range(h.n))):
        return False
    return canonical_form(g) == canonical_form(h)


def automorphisms(g: Graph, limit: int | None = None) -> list[tuple[int, ...]]:
    """Permutations ``p`` with ``g.relabel(p) == g`` (backtracking).

    With ``limit`` set, stops after that many (identity always comes first).
    """
    n = g.n
    out: list[tuple[int, ...]] = []
    perm = [-1] * n
    used = [False] * n

    def extend(u: int) -> None:
        if u == n:
            out.append(tuple(perm))
            return
        for img in sorted(range(n), key=lambda x: x != u):
            if limit is not None and len(out) >= limit:
                return
            if used[img] or g.degree(img) != g.degree(u):
                continue
            if any(g.has_edge(u, v) != g.has_edge(img, perm[v]) for v in range(u)):
                continue
            perm[u] = img
            used[img] = True
            extend(u + 1)
            used[img] = False
        perm[u] = -1

    extend(0)
    return out


def all_graphs(n: int) -> Iterator[Graph]:
    """Every labeled graph on ``n`` nodes (2^(n choose 2) of them)."""
    pairs = list(_pair_bits(n))
    for mask in range(1 << len(pairs)):
        yield Graph.from_edges(n, [p for k, p in enumerate(pairs) if mask >> k & 1])


def graph_classes(n: int) -> list[Graph]:
    """One representative per isomorphism class of graphs on ``n`` nodes."""
    seen: dict[str, Graph] = {}
    for g in all_graphs(n):
        key = canonical_form(g)
        if key not in seen:
            seen[key] = parse_graph6(key)
    return [seen[k] for k in sorted(seen)]
