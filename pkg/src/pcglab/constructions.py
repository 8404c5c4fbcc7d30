"""Lift a one-interval witness of ``G - u`` to a two-interval witness of ``G``.

Two cases are handled: ``u`` adjacent to every other node, and ``u``
adjacent to all nodes but one.  Each lift records the intermediate trees in
a :class:`ConstructionTrace`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, almost_universal_nodes, remove_node, universal_nodes
from .tree import WeightedTree, encode_newick, leaf_distance_matrix
from .witness import IntervalSet, Witness, node_distances, verify_witness


class ConstructionError(ValueError):
    pass


@dataclass
class ConstructionTrace:
    base: Witness
    normalized: Witness | None = None
    trees: dict[str, WeightedTree] = field(default_factory=dict)
    p: int | None = None
    c: int | None = None
    attach_node: int | None = None
    split_node: int | None = None
    output: Witness | None = None

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "normalized": self.normalized.to_json() if self.normalized else None,
            "trees": {k: encode_newick(t) for k, t in self.trees.items()},
            "p": self.p,
            "c": self.c,
            "attach_node": self.attach_node,
            "split_node": self.split_node,
            "output": self.output.to_json() if self.output else None,
        }


def _require_valid(g: Graph, w: Witness, what: str) -> None:
    report = verify_witness(g, w)
    if not report.ok:
        raise ConstructionError(f"{what} does not verify: {report.violations[:3]}")


def normalize_base_witness(g: Graph, w: Witness) -> Witness:
    """Equivalent single-interval witness whose right end is at most the
    maximum leaf distance ``p``.

    With at least one edge the interval is clamped to ``[a, min(b, p)]``.  An
    edgeless graph gets ``[m, m]`` for the smallest integer ``m`` in ``[0, p]``
    realized by no pair of leaves.
    """
    _require_valid(g, w, "base witness")
    if len(w.intervals) > 1:
        raise ConstructionError("base witness must use a single interval")
    p = w.tree.max_leaf_distance()
    if g.edge_count:
        a, b = w.intervals.intervals[0]
        if b <= p:
            return w
        return Witness(w.tree, w.assignment, IntervalSet(((a, p),)))
    if len(w.intervals) == 1 and w.intervals.intervals[0][1] <= p:
        return w
    realized = set(node_distances(g, w.tree, w.assignment).values())
    for m in range(p + 1):
        if m not in realized:
            return Witness(w.tree, w.assignment, IntervalSet(((m, m),)))
    raise ConstructionError(
        f"every integer in [0, {p}] is a leaf distance; no empty interval fits below p")


def _fresh_label(used: set[str], base: str) -> str:
    label = base
    while label in used:
        label += "'"
    return label


def _lift_assignment(g: Graph, u: int, sub_assignment: dict[int, str], u_label: str
                     ) -> dict[int, str]:
    keep = [x for x in range(g.n) if x != u]
    out = {keep[i]: lab for i, lab in sub_assignment.items()}
    out[u] = u_label
    return out


def _add_leaf(tree: WeightedTree, at: int, weight: int, label: str) -> tuple[WeightedTree, int]:
    new = tree.node_count
    labels = dict(tree.labels)
    labels[new] = label
    return WeightedTree(tree.edges + ((at, new, weight),), labels, tree.root), new


def universal_extension(g: Graph, u: int, base: Witness,
                        trace: ConstructionTrace | None = None) -> Witness:
    """Hang ``u`` off an internal node with an edge of weight ``p + 1``.

    Every distance from ``u`` then lies in ``[p + 1, 2p + 1]``, which becomes
    the second interval.
    """
    if u not in universal_nodes(g):
        raise ConstructionError(f"node {u} is not universal")
    sub = remove_node(g, u)
    w = normalize_base_witness(sub, base)
    tree = w.tree
    if not tree.internal_nodes:
        # a two-leaf tree: split its edge (weight c) into 0 and c, distances unchanged
        (a_, b_, c), = tree.edges
        mid = tree.node_count
        tree = WeightedTree(((a_, mid, 0), (mid, b_, c)), tree.labels)
        w = Witness(tree, w.assignment, w.intervals)
    x = min(tree.internal_nodes)
    p = tree.max_leaf_distance()
    label = _fresh_label(set(tree.labels.values()), str(u))
    t1, _ = _add_leaf(tree, x, p + 1, label)
    (a, b), = w.intervals.intervals
    out = Witness(t1, _lift_assignment(g, u, w.assignment, label),
                  IntervalSet(((a, b), (p + 1, 2 * p + 1))))
    if trace is not None:
        trace.base, trace.normalized, trace.p, trace.attach_node = base, w, p, x
        trace.trees["T1"] = t1
        trace.output = out
    _require_valid(g, out, "universal extension output")
    return out


def almost_universal_extension(g: Graph, u: int, v: int, base: Witness,
                               trace: ConstructionTrace | None = None) -> Witness:
    """Lift when ``u`` misses only ``v``.

    Leaf edges are lengthened by 2, ``v``'s leaf edge is split one unit from
    ``v``, and ``u`` hangs from the split point with weight ``p`` so that
    ``d(u, v) = p + 1`` falls between the two intervals.
    """
    if (u, v) not in almost_universal_nodes(g):
        raise ConstructionError(f"({u}, {v}) is not an almost-universal pair")
    sub = remove_node(g, u)
    _require_valid(sub, base, "base witness")
    if len(base.intervals) > 1:
        raise ConstructionError("base witness must use a single interval")
    tree = base.tree
    leaves = set(tree.labels)

    # T1: every leaf-incident edge +2 per leaf endpoint, so all leaf
    # distances grow by exactly 4 (a leaf-leaf edge gets +4).
    t1 = WeightedTree(tuple((a_, b_, wt + 2 * ((a_ in leaves) + (b_ in leaves)))
                            for a_, b_, wt in tree.edges), tree.labels, tree.root)
    shifted = IntervalSet(tuple((a_ + 4, b_ + 4) for a_, b_ in base.intervals))

    # T2: split v's leaf edge (v, x) of weight c into (v, y) = 1 and (y, x) = c - 1.
    sub_v = v if v < u else v - 1
    v_leaf = t1.leaf_of(base.assignment[sub_v])
    (x, c), = t1.neighbors(v_leaf)
    y = t1.node_count
    edges = [e for e in t1.edges if {e[0], e[1]} != {v_leaf, x}]
    edges += [(v_leaf, y, 1), (y, x, c - 1)]
    t2 = WeightedTree(tuple(edges), t1.labels, t1.root)
    w2 = normalize_base_witness(sub, Witness(t2, base.assignment, shifted))
    p = t2.max_leaf_distance()

    label = _fresh_label(set(tree.labels.values()), str(u))
    t3, u_leaf = _add_leaf(t2, y, p, label)
    (a1, b1), = w2.intervals.intervals
    out = Witness(t3, _lift_assignment(g, u, w2.assignment, label),
                  IntervalSet(((a1, b1), (p + 2, 2 * p))))

    # The lower bound on d(u, l) leans on integer leaf weights >= 2; check it.
    dm = leaf_distance_matrix(t3)
    row = dm.d[dm.labels.index(label)]
    for lab, d in zip(dm.labels, row):
        if lab == label:
            continue
        if lab == base.assignment[sub_v]:
            if d != p + 1:
                raise ConstructionError(f"d(u, v) = {d}, expected {p + 1}")
        elif not p + 2 <= d <= 2 * p:
            raise ConstructionError(f"d(u, {lab}) = {d} outside [{p + 2}, {2 * p}]")

    if trace is not None:
        trace.base, trace.normalized, trace.p, trace.c = base, w2, p, c
        trace.attach_node, trace.split_node = y, x
        trace.trees.update(T1=t1, T2=t2, T3=t3)
        trace.output = out
    _require_valid(g, out, "almost-universal extension output")
    return out
