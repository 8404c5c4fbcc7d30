"""Exhaustive bounded search for k-interval PCG witnesses.

The search space is (topology, leaf assignment, integer weight vector).
Assignments are taken modulo tree and graph symmetries, weight vectors are
enumerated depth-first in a fixed edge order, and a partial vector is
abandoned as soon as the leaf-pair distances it already fixes cannot be
separated by ``k`` intervals.  Once the tree is fully weighted the optimal
intervals are read off directly (see :func:`pcglab.witness.interval_runs`).
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .graph import Graph, automorphisms, encode_graph6
from .topology import (
    Topology,
    assignments_mod_automorphism,
    caterpillar_topology,
    complete_binary_topology,
    enumerate_topologies,
)
from .tree import WeightedTree
from .witness import IntervalSet, Witness, interval_runs, node_distances, verify_witness

log = logging.getLogger(__name__)

# Caps on the symmetry bookkeeping; larger groups are only partially used,
# which weakens pruning but never loses a solution.
_MAX_GRAPH_AUTOS = 256
_MAX_COSET_WORK = 4096


class SearchError(ValueError):
    pass


class _BudgetExhausted(Exception):
    pass


@dataclass
class SearchConfig:
    k: int = 2
    max_weight: int = 8
    min_weight: int = 1
    topology: str | Sequence[Topology] = "all"
    initial_weight: int | None = None
    escalate: bool = True
    node_budget: int | None = None
    time_budget: float | None = None
    workers: int = 1
    deterministic: bool = True
    prune: bool = True
    bound_prune: bool = True
    engine: str = "auto"  # auto | python | numba

    def __post_init__(self):
        if self.k < 1:
            raise SearchError("k must be >= 1")
        if not 0 <= self.min_weight <= self.max_weight:
            raise SearchError("need 0 <= min_weight <= max_weight")
        if self.workers < 1:
            raise SearchError("workers must be >= 1")
        if self.engine not in ("auto", "python", "numba"):
            raise SearchError(f"unknown engine {self.engine!r}")

    def weight_schedule(self, n: int) -> list[int]:
        if not self.escalate:
            return [self.max_weight]
        w = self.initial_weight if self.initial_weight is not None else n - 1
        w = min(max(w, self.min_weight, 1), self.max_weight)
        out = [w]
        while out[-1] < self.max_weight:
            out.append(min(out[-1] * 2, self.max_weight))
        return out


@dataclass
class SearchStats:
    topologies: int = 0
    assignments: int = 0
    weight_vectors: int = 0
    nodes: int = 0
    prunes: dict[str, int] = field(
        default_factory=lambda: {"conflict": 0, "difference": 0, "runs": 0, "bounds": 0,
                                 "symmetry": 0})

    def merge(self, other: "SearchStats") -> "SearchStats":
        self.topologies += other.topologies
        self.assignments += other.assignments
        self.weight_vectors += other.weight_vectors
        self.nodes += other.nodes
        for key, val in other.prunes.items():
            self.prunes[key] = self.prunes.get(key, 0) + val
        return self

    def to_json(self) -> dict:
        return {"topologies": self.topologies, "assignments": self.assignments,
                "weight_vectors": self.weight_vectors, "nodes": self.nodes,
                "prunes": dict(self.prunes)}


@dataclass
class SearchOutcome:
    witness: Witness | None
    stats: SearchStats
    exhausted: bool
    weight_bound: int
    topology: str | None = None
    elapsed: float = 0.0

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "exhausted": self.exhausted,
            "weight_bound": self.weight_bound,
            "topology": self.topology,
            "witness": self.witness.to_json() if self.witness else None,
            "stats": self.stats.to_json(),
            "elapsed": round(self.elapsed, 3),
        }


# topology plans --------------------------------------------------------------------

@dataclass
class _Plan:
    """Per-topology data for the weight DFS, all in edge-position terms."""

    topology: Topology
    order: list[int]                   # position -> edge index
    pairs: list[tuple[int, int]]       # leaf slot pairs (i < j)
    completes: list[list[tuple[int, tuple[int, ...]]]]  # depth -> (pair idx, path positions)
    edge_maps: list[tuple[int, ...]]   # per automorphism: position -> position
    touch: list[list[int]] = field(default_factory=list)  # position -> pairs whose path uses it
    path_len: list[int] = field(default_factory=list)      # pair idx -> path edge count
    # depth -> (pair a, pair b, signed positions of the symmetric difference of their paths)
    diffs: list[list[tuple[int, int, tuple[tuple[int, int], ...]]]] = field(default_factory=list)
    arrays: tuple | None = None        # flattened form for the compiled engine


def _edge_order(paths: list[set[int]], m: int, adjacency: list[set[int]]) -> list[int]:
    # Greedy: next edge is the one completing most leaf pairs, preferring
    # edges touching what is already placed.
    chosen: list[int] = []
    placed: set[int] = set()
    while len(chosen) < m:
        best = None
        for e in range(m):
            if e in placed:
                continue
            gain = sum(1 for p in paths if e in p and p <= placed | {e})
            touch = bool(adjacency[e] & placed) or not placed
            key = (gain, touch, -e)
            if best is None or key > best[0]:
                best = (key, e)
        chosen.append(best[1])
        placed.add(best[1])
    return chosen


def plan_topology(top: Topology) -> _Plan:
    tree = top.tree
    n, m = top.n, top.edge_count
    edge_index = {(u, v): i for i, (u, v, _) in enumerate(tree.edges)}
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    paths = [{edge_index[e] for e in tree.path_edges(i, j)} for i, j in pairs]
    adjacency = [set() for _ in range(m)]
    for a, (u1, v1, _) in enumerate(tree.edges):
        for b, (u2, v2, _) in enumerate(tree.edges):
            if a != b and {u1, v1} & {u2, v2}:
                adjacency[a].add(b)
    order = _edge_order(paths, m, adjacency)
    position = {e: q for q, e in enumerate(order)}
    completes: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in range(m)]
    for idx, path in enumerate(paths):
        qs = tuple(sorted(position[e] for e in path))
        completes[qs[-1]].append((idx, qs))
    edge_maps = [tuple(position[emap[order[q]]] for q in range(m)) for emap in top.edge_maps]
    touch: list[list[int]] = [[] for _ in range(m)]
    for idx, path in enumerate(paths):
        for e in path:
            touch[position[e]].append(idx)
    # d(a) - d(b) only depends on the edges in exactly one of the two paths,
    # so their equality is decided once those edges are placed.
    diffs: list[list] = [[] for _ in range(m)]
    for a in range(len(paths)):
        for b in range(a + 1, len(paths)):
            signed = sorted([(position[e], 1) for e in paths[a] - paths[b]]
                            + [(position[e], -1) for e in paths[b] - paths[a]])
            diffs[signed[-1][0]].append((a, b, tuple(signed)))
    return _Plan(top, order, pairs, completes, edge_maps, touch, [len(p) for p in paths],
                 diffs)


def resolve_topologies(n: int, spec: str | Sequence[Topology]) -> list[Topology]:
    if not isinstance(spec, str):
        tops = list(spec)
        for t in tops:
            if t.n != n:
                raise SearchError(f"topology {t.name or '?'} has {t.n} leaves, graph has {n}")
    elif n == 2:
        tops = [caterpillar_topology(2)]
    elif spec == "all":
        tops = enumerate_topologies(n)
    elif spec == "caterpillar":
        tops = [caterpillar_topology(n)]
    elif spec in ("complete", "complete-binary"):
        tops = [complete_binary_topology(n)]
    else:
        raise SearchError(f"unknown topology filter {spec!r}")
    if not tops:
        raise SearchError("empty topology filter")
    return tops


# symmetry reduction of assignments --------------------------------------------------

def _inverse(p: Sequence[int]) -> list[int]:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return inv


def _is_graph_auto(g: Graph, perm: Sequence[int]) -> bool:
    return all(g.has_edge(perm[u], perm[v]) == g.has_edge(u, v)
               for u in range(g.n) for v in range(u + 1, g.n))


def _reduced_assignments(g: Graph, top: Topology, g_autos: list[tuple[int, ...]]
                         ) -> Iterator[tuple[int, ...]]:
    """Orbit representatives under tree symmetries, filtered by graph symmetries.

    ``sigma`` is kept when no graph automorphism ``h`` maps it to an
    assignment whose tree-orbit minimum is smaller.  Using only some of the
    graph automorphisms keeps the filter sound.
    """
    autos_t = top.automorphisms
    budget = max(1, _MAX_COSET_WORK // max(1, len(autos_t)))
    hs = [h for h in g_autos if any(h[i] != i for i in range(g.n))][:budget]
    for sigma in assignments_mod_automorphism(top):
        keep = True
        for h in hs:
            tau = [sigma[h[u]] for u in range(g.n)]
            least = min(tuple(a[x] for x in tau) for a in autos_t)
            if least < sigma:
                keep = False
                break
        if keep:
            yield sigma


def _weight_symmetries(g: Graph, plan: _Plan, sigma: Sequence[int],
                       g_auto_set: set[tuple[int, ...]] | None) -> list[tuple[int, ...]]:
    # Tree automorphisms alpha with sigma^-1 alpha sigma in Aut(G): these map
    # witnesses with assignment sigma to witnesses with the same assignment.
    inv = _inverse(sigma)
    out = []
    for alpha, pmap in zip(plan.topology.automorphisms, plan.edge_maps):
        if all(alpha[i] == i for i in range(len(alpha))):
            continue
        h = tuple(inv[alpha[sigma[u]]] for u in range(g.n))
        if g_auto_set is not None:
            ok = h in g_auto_set
        else:
            ok = _is_graph_auto(g, h)
        if ok:
            out.append(pmap)
    return out


# weight DFS -----------------------------------------------------------------------

def _count_runs(evals: dict[int, int], nvals: dict[int, int]) -> int:
    runs = 0
    in_run = False
    for value in sorted(evals.keys() | nvals.keys()):
        if value in evals:
            if not in_run:
                runs += 1
                in_run = True
        else:
            in_run = False
    return runs


def _chain_exceeds(kinds: list[bool], psum: list[int], prem: list[int], lo: int, hi: int,
                   k: int) -> bool:
    """True when the distance bounds alone force more than ``k`` runs.

    Pair ``p`` has distance in ``[psum + prem*lo, psum + prem*hi]``.  A chain
    edge pair <= non-edge pair <= edge pair (upper bound of each at most the
    lower bound of the next) puts the two edge pairs in different runs or
    creates a conflict.  Greedy by smallest upper bound finds the longest chain.
    """
    cur = -1
    count = 0
    want = True
    npairs = len(kinds)
    while True:
        best = -1
        for p in range(npairs):
            if kinds[p] != want:
                continue
            if psum[p] + prem[p] * lo < cur:
                continue
            h = psum[p] + prem[p] * hi
            if best < 0 or h < best:
                best = h
        if best < 0:
            return False
        if want:
            count += 1
            if count > k:
                return True
        cur = best
        want = not want


def _search_unit(plan: _Plan, kinds: list[bool], k: int, lo: int, hi: int, floor: int,
                 sym: list[tuple[int, ...]], prune: bool, stats: SearchStats,
                 deadline: float | None, node_cap: int | None,
                 bound_prune: bool = True) -> list[int] | None:
    """DFS over weight vectors in ``[lo, hi]^m`` for one assignment.

    Only vectors with some weight above ``floor`` are visited (lower bounds
    were covered by an earlier pass).  Returns weights by position or None.
    """
    m = len(plan.order)
    completes = plan.completes
    w = [0] * m
    evals: dict[int, int] = {}
    nvals: dict[int, int] = {}
    touch = plan.touch
    psum = [0] * len(kinds)
    prem = list(plan.path_len)
    bounds = prune and bound_prune
    diffs = [[qs for a, b, qs in bucket if kinds[a] != kinds[b]] for bucket in plan.diffs]

    def sym_ok(t: int) -> bool:
        for pmap in sym:
            for q in range(t + 1):
                r = pmap[q]
                if r > t:
                    break
                if w[r] < w[q]:
                    return False
                if w[r] > w[q]:
                    break
        return True

    def rec(t: int, maxw: int) -> bool:
        start = lo
        if t == m - 1 and maxw <= floor:
            start = max(lo, floor + 1)
        last = t == m - 1
        for val in range(start, hi + 1):
            w[t] = val
            stats.nodes += 1
            if node_cap is not None and stats.nodes > node_cap:
                raise _BudgetExhausted
            if (stats.nodes & 4095) == 0 and deadline is not None \
                    and time.monotonic() > deadline:
                raise _BudgetExhausted
            if prune and sym and not sym_ok(t):
                stats.prunes["symmetry"] += 1
                continue
            added = []
            conflict = False
            for pidx, path in completes[t]:
                d = 0
                for q in path:
                    d += w[q]
                if kinds[pidx]:
                    if d in nvals:
                        conflict = True
                    evals[d] = evals.get(d, 0) + 1
                    added.append((evals, d))
                else:
                    if d in evals:
                        conflict = True
                    nvals[d] = nvals.get(d, 0) + 1
                    added.append((nvals, d))
            ok = True
            if not prune:
                # nothing was rejected on the way down: judge the full vector
                if last:
                    ok = not (evals.keys() & nvals.keys()) and _count_runs(evals, nvals) <= k
            elif conflict:
                stats.prunes["conflict"] += 1
                ok = False
            elif added and _count_runs(evals, nvals) > k:
                if not last:
                    stats.prunes["runs"] += 1
                ok = False
            if bounds:
                if ok and not last:
                    for qs in diffs[t]:
                        if sum(w[q] * sg for q, sg in qs) == 0:
                            stats.prunes["difference"] += 1
                            ok = False
                            break
                for p in touch[t]:
                    psum[p] += val
                    prem[p] -= 1
                if ok and not last and _chain_exceeds(kinds, psum, prem, lo, hi, k):
                    stats.prunes["bounds"] += 1
                    ok = False
            if ok:
                if last:
                    stats.weight_vectors += 1
                    return True
                if rec(t + 1, max(maxw, val)):
                    return True
            elif last:
                stats.weight_vectors += 1
            if bounds:
                for p in touch[t]:
                    psum[p] -= val
                    prem[p] += 1
            for table, d in added:
                c = table[d] - 1
                if c:
                    table[d] = c
                else:
                    del table[d]
        return False

    if m == 0:
        return None
    return list(w) if rec(0, -1) else None


def _build_witness(g: Graph, plan: _Plan, sigma: Sequence[int], w_pos: list[int], k: int
                   ) -> Witness:
    weights = [0] * len(plan.order)
    for q, e in enumerate(plan.order):
        weights[e] = w_pos[q]
    tree = plan.topology.tree.with_weights(weights)
    assignment = {u: str(sigma[u]) for u in range(g.n)}
    nd = node_distances(g, tree, assignment)
    runs = interval_runs((d for p, d in nd.items() if g.has_edge(*p)),
                         (d for p, d in nd.items() if not g.has_edge(*p)))
    if runs is None or len(runs) > k:
        raise AssertionError("search produced a non-separable weight vector")
    return Witness(tree, assignment, IntervalSet(tuple(runs)))


@dataclass
class _Unit:
    topo_index: int
    sigma: tuple[int, ...]


def _unit_kinds(g: Graph, plan: _Plan, sigma: Sequence[int]) -> list[bool]:
    inv = _inverse(sigma)
    return [g.has_edge(inv[i], inv[j]) for i, j in plan.pairs]


def _kernel_module(engine: str):
    if engine == "python":
        return None
    try:
        from . import _kernel
    except ImportError:
        if engine == "numba":
            raise
        return None
    return _kernel


def _plan_arrays(plan: _Plan):
    import numpy as np

    if plan.arrays is None:
        comp_start = [0]
        kinds_index, pstart, ppos = [], [0], []
        for bucket in plan.completes:
            for pidx, path in bucket:
                kinds_index.append(pidx)
                ppos.extend(path)
                pstart.append(len(ppos))
            comp_start.append(len(kinds_index))
        touch_start, touch_pair = [0], []
        for bucket in plan.touch:
            touch_pair.extend(bucket)
            touch_start.append(len(touch_pair))
        diff_start, diff_a, diff_b, diff_pstart, diff_pos, diff_sign = [0], [], [], [0], [], []
        for bucket in plan.diffs:
            for a, b, qs in bucket:
                diff_a.append(a)
                diff_b.append(b)
                for q, sg in qs:
                    diff_pos.append(q)
                    diff_sign.append(sg)
                diff_pstart.append(len(diff_pos))
            diff_start.append(len(diff_a))
        plan.arrays = (np.array(comp_start, np.int64), np.array(kinds_index, np.int64),
                       np.array(pstart, np.int64), np.array(ppos, np.int64),
                       np.array(touch_start, np.int64), np.array(touch_pair, np.int64),
                       tuple(np.array(x, np.int64) for x in
                             (diff_start, diff_a, diff_b, diff_pstart, diff_pos, diff_sign)))
    return plan.arrays


_SLICE_NODES = 1 << 22


def _run_unit_compiled(kernel, g, plan, sigma, cfg, lo, hi, floor, sym, stats, deadline,
                       node_cap):
    import numpy as np

    comp_start, comp_pair, comp_pstart, path_pos, touch_start, touch_pair, diff = \
        _plan_arrays(plan)
    pair_kind = np.array(_unit_kinds(g, plan, sigma), np.bool_)
    kinds = pair_kind[comp_pair]
    m = len(plan.order)
    sym_arr = np.array(sym, np.int64).reshape(len(sym), m)
    st = kernel.UnitState(m, len(comp_pair), hi, plan.path_len)
    counters = np.zeros(7, np.int64)
    bounds = bool(cfg.prune and cfg.bound_prune)
    try:
        while True:
            slice_nodes = _SLICE_NODES
            if node_cap is not None:
                slice_nodes = min(slice_nodes, max(0, node_cap - int(counters[0])))
                if slice_nodes == 0:
                    raise _BudgetExhausted
            status = kernel.search_unit(m, comp_start, kinds, comp_pstart, path_pos, sym_arr,
                                        cfg.k, lo, hi, floor, cfg.prune, slice_nodes, st.w,
                                        st.prefmax, st.applied, st.dist, st.ecount, st.ncount,
                                        st.vals, st.meta, counters, bounds, touch_start,
                                        touch_pair, pair_kind, st.psum, st.prem, *diff)
            if status != 3:
                break
            if deadline is not None and time.monotonic() > deadline:
                raise _BudgetExhausted
    finally:
        stats.nodes += int(counters[0])
        stats.weight_vectors += int(counters[1])
        stats.prunes["conflict"] += int(counters[2])
        stats.prunes["runs"] += int(counters[3])
        stats.prunes["symmetry"] += int(counters[4])
        stats.prunes["bounds"] += int(counters[5])
        stats.prunes["difference"] += int(counters[6])
    return [int(x) for x in st.w[:m]] if status == 1 else None


def _run_unit(g: Graph, plan: _Plan, sigma: tuple[int, ...], cfg: SearchConfig,
              lo: int, hi: int, floor: int, g_auto_set, deadline, node_cap
              ) -> tuple[Witness | None, SearchStats, bool]:
    stats = SearchStats(assignments=1)
    sym = _weight_symmetries(g, plan, sigma, g_auto_set) if cfg.prune else []
    kernel = _kernel_module(cfg.engine)
    try:
        if kernel is not None:
            w_pos = _run_unit_compiled(kernel, g, plan, sigma, cfg, lo, hi, floor, sym, stats,
                                       deadline, node_cap)
            if w_pos is None:
                return None, stats, False
            return _build_witness(g, plan, sigma, w_pos, cfg.k), stats, False
        w_pos = _search_unit(plan, _unit_kinds(g, plan, sigma), cfg.k, lo, hi, floor, sym,
                             cfg.prune, stats, deadline, node_cap, cfg.bound_prune)
    except _BudgetExhausted:
        return None, stats, True
    if w_pos is None:
        return None, stats, False
    return _build_witness(g, plan, sigma, w_pos, cfg.k), stats, False


# parallel plumbing -------------------------------------------------------------------

_WORKER: dict = {}


def _worker_init(g, plans, cfg, g_auto_set, cancel):
    _WORKER.update(g=g, plans=plans, cfg=cfg, autos=g_auto_set, cancel=cancel)


def _worker_run(args):
    idx, topo_index, sigma, lo, hi, floor, deadline = args
    ctx = _WORKER
    if ctx["cancel"] is not None and ctx["cancel"].is_set():
        return idx, None, SearchStats(), True
    wit, stats, aborted = _run_unit(ctx["g"], ctx["plans"][topo_index], sigma, ctx["cfg"],
                                    lo, hi, floor, ctx["autos"], deadline, None)
    if wit is not None and ctx["cancel"] is not None and not ctx["cfg"].deterministic:
        ctx["cancel"].set()
    return idx, wit, stats, aborted


def search_witness(g: Graph, cfg: SearchConfig | None = None) -> SearchOutcome:
    """Find a k-interval witness for ``g`` within the configured bounds.

    ``exhausted`` is True only when every candidate up to ``cfg.max_weight``
    was examined; a False ``found`` with ``exhausted`` means "none within
    these bounds", never "not a k-interval PCG".
    """
    cfg = cfg or SearchConfig()
    t0 = time.monotonic()
    if g.n == 1:
        # no pairs to separate: the one-leaf tree is a witness
        single = Witness(WeightedTree((), {0: "0"}), {0: "0"}, IntervalSet(()))
        return SearchOutcome(single, SearchStats(), False, cfg.min_weight, "single-leaf",
                             time.monotonic() - t0)
    deadline = t0 + cfg.time_budget if cfg.time_budget is not None else None
    tops = resolve_topologies(g.n, cfg.topology)
    plans = [plan_topology(t) for t in tops]
    g_autos = automorphisms(g, limit=_MAX_GRAPH_AUTOS + 1)
    g_auto_set = set(g_autos) if len(g_autos) <= _MAX_GRAPH_AUTOS else None
    if not cfg.prune:
        g_autos = [tuple(range(g.n))]
    reps = [list(_reduced_assignments(g, p.topology, g_autos)) for p in plans]
    stats = SearchStats()
    stats.topologies = len(plans)
    floor = cfg.min_weight - 1
    budget_hit = False
    bound = cfg.min_weight
    for bound in cfg.weight_schedule(g.n):
        units = [(ti, s) for ti, rs in enumerate(reps) for s in rs]
        log.debug("pass W=%d over %d units", bound, len(units))
        if cfg.workers == 1:
            for ti, sigma in units:
                cap = None if cfg.node_budget is None else cfg.node_budget - stats.nodes
                wit, st, aborted = _run_unit(g, plans[ti], sigma, cfg, cfg.min_weight, bound,
                                             floor, g_auto_set, deadline, cap)
                stats.merge(st)
                if wit is not None:
                    return _finish(g, wit, stats, bound, plans[ti], t0)
                if aborted:
                    budget_hit = True
                    break
        else:
            wit, ti, aborted = _parallel_pass(g, plans, units, cfg, bound, floor,
                                              g_auto_set, deadline, stats)
            if wit is not None:
                return _finish(g, wit, stats, bound, plans[ti], t0)
            budget_hit = aborted
        if budget_hit:
            break
        floor = bound
    return SearchOutcome(None, stats, not budget_hit, bound, None, time.monotonic() - t0)


def _parallel_pass(g, plans, units, cfg, bound, floor, g_auto_set, deadline, stats):
    import multiprocessing as mp

    cancel = mp.get_context("fork").Event()
    found: dict[int, Witness] = {}
    aborted_any = False
    with ProcessPoolExecutor(cfg.workers, mp_context=mp.get_context("fork"),
                             initializer=_worker_init,
                             initargs=(g, plans, cfg, g_auto_set, cancel)) as pool:
        batch = cfg.workers * 4
        for start in range(0, len(units), batch):
            chunk = [(start + i, ti, s, cfg.min_weight, bound, floor, deadline)
                     for i, (ti, s) in enumerate(units[start:start + batch])]
            pending = {pool.submit(_worker_run, c) for c in chunk}
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    idx, wit, st, aborted = fut.result()
                    stats.merge(st)
                    aborted_any |= aborted and not cancel.is_set()
                    if wit is not None:
                        found[idx] = wit
                if found and not cfg.deterministic:
                    for fut in pending:
                        fut.cancel()
                    pending = set()
            if found:
                idx = min(found)
                return found[idx], units[idx][0], False
            if aborted_any:
                return None, None, True
    return None, None, False


def _finish(g, wit, stats, bound, plan, t0) -> SearchOutcome:
    report = verify_witness(g, wit)
    if not report.ok:
        raise AssertionError(f"internal error: unverifiable witness {report.violations}")
    return SearchOutcome(wit, stats, False, bound, plan.topology.name, time.monotonic() - t0)


# reference implementation ---------------------------------------------------------------

def brute_force_search(g: Graph, topologies: Iterable[Topology], k: int, max_weight: int,
                       min_weight: int = 1) -> tuple[Witness | None, int]:
    """No-pruning reference: every bijection, every weight vector.

    Returns the first witness found (or None) and the number of
    (assignment, weight vector) pairs examined.
    """
    visited = 0
    for top in topologies:
        tree = top.tree
        n = top.n
        for sigma in itertools.permutations(range(n)):
            for weights in itertools.product(range(min_weight, max_weight + 1),
                                             repeat=len(tree.edges)):
                visited += 1
                wt = tree.with_weights(weights)
                dists = [wt.distances_from(sigma[u]) for u in range(n)]
                e_vals, n_vals = [], []
                for u in range(n):
                    for v in range(u + 1, n):
                        d = dists[u][sigma[v]]
                        (e_vals if g.has_edge(u, v) else n_vals).append(d)
                runs = interval_runs(e_vals, n_vals)
                if runs is not None and len(runs) <= k:
                    wit = Witness(wt, {u: str(sigma[u]) for u in range(n)},
                                  IntervalSet(tuple(runs)))
                    return wit, visited
    return None, visited


# batches --------------------------------------------------------------------------------

@dataclass
class BatchRow:
    index: int
    graph6: str
    outcome: SearchOutcome | None
    error: str | None = None

    def to_json(self) -> dict:
        row = {"schema": 1, "index": self.index, "graph6": self.graph6}
        if self.outcome is not None:
            row.update(self.outcome.to_json())
        row["error"] = self.error
        return row


def batch_certify(graphs: Iterable[Graph], cfg: SearchConfig) -> list[BatchRow]:
    rows = []
    for i, g in enumerate(graphs):
        try:
            rows.append(BatchRow(i, encode_graph6(g), search_witness(g, cfg)))
        except Exception as exc:  # one bad graph must not sink the batch
            log.warning("graph %d failed: %s", i, exc)
            rows.append(BatchRow(i, encode_graph6(g), None, f"{type(exc).__name__}: {exc}"))
    return rows


def batch_summary(rows: Sequence[BatchRow]) -> dict:
    found = sum(1 for r in rows if r.outcome is not None and r.outcome.found)
    exhausted = sum(1 for r in rows if r.outcome is not None and not r.outcome.found
                    and r.outcome.exhausted)
    errors = sum(1 for r in rows if r.error)
    total = SearchStats()
    for r in rows:
        if r.outcome is not None:
            total.merge(r.outcome.stats)
    return {"schema": 1, "graphs": len(rows), "found": found,
            "exhausted_not_found": exhausted, "budget_or_error": len(rows) - found - exhausted,
            "errors": errors, "stats": total.to_json()}


def dump_jsonl(rows: Sequence[BatchRow]) -> str:
    return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in rows)
