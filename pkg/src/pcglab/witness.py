"""Witness certificates and their verification.

A witness for ``G`` is a weighted tree, a bijection from the nodes of ``G``
to the leaves of the tree, and a family of disjoint closed integer
intervals.  ``u`` and ``v`` must be adjacent exactly when the distance
between their leaves falls in one of the intervals.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import Graph
from .tree import WeightedTree, encode_newick, leaf_distance_matrix, parse_newick

SCHEMA_VERSION = 1


class WitnessError(ValueError):
    """The witness is structurally unusable (wrong leaf count, not a bijection...)."""


@dataclass(frozen=True)
class IntervalSet:
    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in ivs:
            if not 0 <= a <= b:
                raise ValueError(f"bad interval [{a}, {b}]")
        for (_, b1), (a2, _) in zip(ivs, ivs[1:]):
            if not b1 < a2:
                raise ValueError(f"intervals must be sorted and disjoint: {ivs}")

    def __contains__(self, d: int) -> bool:
        i = bisect_left(self.intervals, (d + 1,)) - 1
        return i >= 0 and self.intervals[i][0] <= d <= self.intervals[i][1]

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def to_json(self) -> list[list[int]]:
        return [list(iv) for iv in self.intervals]


@dataclass(frozen=True)
class Witness:
    tree: WeightedTree
    assignment: Mapping[int, str]  # graph node -> leaf label
    intervals: IntervalSet

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(self.assignment))

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "tree": encode_newick(self.tree),
            "assignment": {str(u): lab for u, lab in sorted(self.assignment.items())},
            "intervals": self.intervals.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, data: Mapping) -> "Witness":
        try:
            tree = parse_newick(data["tree"])
            assignment = {int(u): str(lab) for u, lab in data["assignment"].items()}
            intervals = IntervalSet(tuple(tuple(iv) for iv in data["intervals"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise WitnessError(f"malformed witness JSON: {exc}") from None
        return cls(tree, assignment, intervals)

    @classmethod
    def load(cls, path) -> "Witness":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class VerificationReport:
    ok: bool
    violations: list[tuple[int, int, int, bool]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [{"u": u, "v": v, "distance": d, "adjacent": adj}
                           for u, v, d, adj in self.violations],
        }


def _check_assignment(g: Graph, tree: WeightedTree, assignment: Mapping[int, str]) -> None:
    leaves = set(tree.labels.values())
    if len(leaves) != g.n:
        raise WitnessError(f"tree has {len(leaves)} leaves but graph has {g.n} nodes")
    if set(assignment) != set(range(g.n)):
        raise WitnessError("assignment must cover exactly the graph nodes 0..n-1")
    if set(assignment.values()) != leaves or len(set(assignment.values())) != g.n:
        raise WitnessError("assignment is not a bijection onto the tree leaves")


def node_distances(g: Graph, tree: WeightedTree, assignment: Mapping[int, str]
                   ) -> dict[tuple[int, int], int]:
    """Leaf distance for every unordered node pair ``(u, v)``, ``u < v``."""
    _check_assignment(g, tree, assignment)
    dm = leaf_distance_matrix(tree)
    pos = {lab: i for i, lab in enumerate(dm.labels)}
    idx = [pos[assignment[u]] for u in range(g.n)]
    return {(u, v): dm.d[idx[u]][idx[v]] for u in range(g.n) for v in range(u + 1, g.n)}


def verify_witness(g: Graph, w: Witness) -> VerificationReport:
    dist = node_distances(g, w.tree, w.assignment)
    bad = []
    for (u, v), d in dist.items():
        adj = g.has_edge(u, v)
        if adj != (d in w.intervals):
            bad.append((u, v, d, adj))
    return VerificationReport(not bad, bad)


def interval_runs(edge_values: Iterable[int], nonedge_values: Iterable[int]
                  ) -> list[tuple[int, int]] | None:
    """Maximal blocks of edge distances not interrupted by a non-edge distance.

    Returns ``None`` when some distance is realized by both kinds of pair.
    """
    edge_set = set(edge_values)
    non_set = set(nonedge_values)
    if edge_set & non_set:
        return None
    runs: list[tuple[int, int]] = []
    in_run = False
    for value in sorted(edge_set | non_set):
        if value in edge_set:
            if in_run:
                runs[-1] = (runs[-1][0], value)
            else:
                runs.append((value, value))
                in_run = True
        else:
            in_run = False
    return runs


def extract_intervals(g: Graph, tree: WeightedTree, assignment: Mapping[int, str],
                      k: int) -> IntervalSet | None:
    """Fewest tight intervals realizing ``g`` on a fixed tree, or ``None``.

    Two edge distances separated by a non-edge distance can never share an
    interval, and any run without such a separator fits in one, so the
    number of runs is the minimum interval count.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    dist = node_distances(g, tree, assignment)
    runs = interval_runs((d for p, d in dist.items() if g.has_edge(*p)),
                         (d for p, d in dist.items() if not g.has_edge(*p)))
    if runs is None or len(runs) > k:
        return None
    return IntervalSet(tuple(runs))


def minimum_interval_count(g: Graph, tree: WeightedTree, assignment: Mapping[int, str]
                           ) -> int | None:
    dist = node_distances(g, tree, assignment)
    runs = interval_runs((d for p, d in dist.items() if g.has_edge(*p)),
                         (d for p, d in dist.items() if not g.has_edge(*p)))
    return None if runs is None else len(runs)
