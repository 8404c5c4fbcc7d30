from __future__ import annotations

import math

import pytest

from pcglab.graph import Graph, graph_classes
from pcglab.solver import (
    SearchConfig,
    SearchError,
    batch_certify,
    batch_summary,
    brute_force_search,
    dump_jsonl,
    resolve_topologies,
    search_witness,
)
from pcglab.topology import caterpillar_topology, enumerate_topologies
from pcglab.witness import verify_witness

ENGINES = ["python", "numba"]


def test_triangle_on_caterpillar():
    out = search_witness(Graph.complete(3), SearchConfig(k=1, max_weight=2, topology="caterpillar"))
    assert out.found and verify_witness(Graph.complete(3), out.witness).ok


def test_four_cycle():
    out = search_witness(Graph.cycle(4), SearchConfig(k=1, max_weight=8))
    assert out.found and len(out.witness.intervals) == 1
    assert verify_witness(Graph.cycle(4), out.witness).ok


def test_single_node_is_trivial():
    out = search_witness(Graph.empty(1), SearchConfig(k=1))
    assert out.found and verify_witness(Graph.empty(1), out.witness).ok


def test_two_nodes():
    for g in (Graph.complete(2), Graph.empty(2)):
        out = search_witness(g, SearchConfig(k=1, max_weight=2))
        assert out.found


def test_config_validation():
    with pytest.raises(SearchError):
        SearchConfig(k=0)
    with pytest.raises(SearchError):
        SearchConfig(min_weight=5, max_weight=3)
    with pytest.raises(SearchError):
        SearchConfig(engine="gpu")
    with pytest.raises(SearchError):
        resolve_topologies(5, "bushy")
    with pytest.raises(SearchError):
        resolve_topologies(5, [caterpillar_topology(4)])


def test_weight_schedule():
    assert SearchConfig(max_weight=8).weight_schedule(4) == [3, 6, 8]
    assert SearchConfig(max_weight=8, escalate=False).weight_schedule(4) == [8]
    assert SearchConfig(max_weight=2).weight_schedule(8) == [2]


@pytest.mark.parametrize("engine", ENGINES)
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("w", [1, 2, 3])
def test_exhaustive_matches_brute_force(engine, n, w):
    tops = resolve_topologies(n, "all")
    mismatches = []
    for g in graph_classes(n):
        ref, _ = brute_force_search(g, tops, k=1, max_weight=w)
        out = search_witness(g, SearchConfig(k=1, max_weight=w, escalate=False, engine=engine))
        if out.found != (ref is not None) or (not out.found and not out.exhausted):
            mismatches.append(g.edges())
    assert not mismatches


def test_brute_force_finds_negatives_at_low_weight():
    # makes the agreement above non-vacuous
    tops = resolve_topologies(4, "all")
    verdicts = [brute_force_search(g, tops, 1, 1)[0] is None for g in graph_classes(4)]
    assert any(verdicts) and not all(verdicts)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("n", [4, 5])
def test_engines_identical(n, k):
    for g in graph_classes(n):
        outs = [search_witness(g, SearchConfig(k=k, max_weight=6, engine=e)) for e in ENGINES]
        a, b = (o.to_json() for o in outs)
        a.pop("elapsed"), b.pop("elapsed")
        assert a == b


@pytest.mark.parametrize("n", [4, 5])
def test_bound_prunes_do_not_change_the_answer(n):
    for g in graph_classes(n):
        for k in (1, 2):
            on = search_witness(g, SearchConfig(k=k, max_weight=4, engine="python"))
            off = search_witness(g, SearchConfig(k=k, max_weight=4, engine="python",
                                                 bound_prune=False))
            assert on.found == off.found
            if on.found:
                assert on.witness.to_json() == off.witness.to_json()
            assert on.stats.nodes <= off.stats.nodes


def test_symmetry_pruning_visits_fewer_pairs():
    n, w = 4, 2
    tops = resolve_topologies(n, "all")
    unpruned = math.factorial(n) * w ** len(tops[0].tree.edges)
    for g in graph_classes(n):
        out = search_witness(g, SearchConfig(k=1, max_weight=w, escalate=False, min_weight=1))
        ref, visited = brute_force_search(g, tops, 1, w)
        assert out.found == (ref is not None)
        if not out.found:
            assert visited == unpruned
        assert out.stats.weight_vectors < unpruned


@pytest.mark.parametrize("engine", ENGINES)
def test_unpruned_mode_still_correct(engine):
    for g in graph_classes(4):
        a = search_witness(g, SearchConfig(k=1, max_weight=2, escalate=False, engine=engine))
        b = search_witness(g, SearchConfig(k=1, max_weight=2, escalate=False, prune=False,
                                           engine=engine))
        assert a.found == b.found
        assert a.stats.weight_vectors <= b.stats.weight_vectors


def test_determinism_across_runs_and_workers():
    graphs = [Graph.cycle(5), Graph.path(6), Graph.from_edges(6, [(0, 1), (2, 3), (4, 5), (0, 5)])]
    for g in graphs:
        cfg = dict(k=1, max_weight=6)
        first = search_witness(g, SearchConfig(**cfg)).witness.dumps()
        assert search_witness(g, SearchConfig(**cfg)).witness.dumps() == first
        assert search_witness(g, SearchConfig(workers=2, **cfg)).witness.dumps() == first


def test_nondeterministic_parallel_finds_valid_witness():
    g = Graph.cycle(6)
    out = search_witness(g, SearchConfig(k=1, max_weight=6, workers=2, deterministic=False))
    assert out.found and verify_witness(g, out.witness).ok


def test_node_budget_is_not_exhaustion():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4)])
    out = search_witness(g, SearchConfig(k=1, max_weight=1, node_budget=3, escalate=False))
    if not out.found:
        assert not out.exhausted


def test_explicit_topology_list():
    g = Graph.path(6)
    tops = enumerate_topologies(6)[1:]
    out = search_witness(g, SearchConfig(k=1, max_weight=6, topology=tops))
    assert out.found and out.topology in {t.name for t in tops}


def test_eight_nodes_two_intervals_on_shapes():
    g = Graph.from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0),
                             (0, 4), (2, 6)])
    for shape in ("caterpillar", "complete"):
        out = search_witness(g, SearchConfig(k=2, max_weight=16, topology=shape, time_budget=60))
        assert out.found and verify_witness(g, out.witness).ok


# batches -----------------------------------------------------------------------

def test_batch_all_four_node_graphs():
    rows = batch_certify(graph_classes(4), SearchConfig(k=1, max_weight=8))
    summary = batch_summary(rows)
    assert summary["graphs"] == 11 and summary["found"] == 11
    lines = dump_jsonl(rows).splitlines()
    assert len(lines) == 11 and all('"schema": 1' in ln for ln in lines)


def test_batch_empty_and_errors():
    assert batch_certify([], SearchConfig()) == []
    assert batch_summary([])["graphs"] == 0
    bad = SearchConfig(k=1, max_weight=3, topology=[caterpillar_topology(5)])
    rows = batch_certify([Graph.path(4), Graph.path(5)], bad)
    assert rows[0].error and rows[0].outcome is None
    assert rows[1].outcome.found
