from __future__ import annotations

import random
from math import comb

import pytest

from conftest import random_graph
from pcglab.graph import Graph, graph_classes
from pcglab.ilp import build_model, witness_from_solution
from pcglab.solver import SearchConfig, search_witness
from pcglab.topology import caterpillar_topology, enumerate_topologies
from pcglab.witness import verify_witness


def lp_rows(text: str) -> list[str]:
    lines = text.splitlines()
    start = lines.index("Subject To") + 1
    end = lines.index("Bounds")
    return [ln.strip() for ln in lines[start:end]]


def test_k2_minimal_model():
    model = build_model(Graph.complete(2), caterpillar_topology(2), k=1, max_weight=3,
                        fixed_assignment=[0, 1])
    kinds = {v.name[0] for v in model.variables.values()}
    assert sum(1 for v in model.variables if v.startswith("w_")) == 1
    assert sum(1 for v in model.variables if v[0] in "ab") == 2
    assert model.count("sel_in_") == 2
    assert kinds == {"w", "a", "b", "d"}
    sol = model.solve()
    assert sol is not None
    wit = witness_from_solution(Graph.complete(2), caterpillar_topology(2), model, sol)
    assert verify_witness(Graph.complete(2), wit).ok


def test_lp_text_sections():
    text = build_model(Graph.path(4), caterpillar_topology(4), 2, 5).to_lp()
    for section in ("Minimize", "Subject To", "Bounds", "General", "Binary", "End"):
        assert f"\n{section}\n" in "\n" + text
    assert " 1 <= w_0 <= 5" in text
    assert "M=26" in text.splitlines()[0]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_fixed_assignment_row_counts(k):
    rng = random.Random(k)
    for _ in range(10):
        n = rng.randint(3, 7)
        g = random_graph(rng, n)
        top = enumerate_topologies(n)[0]
        sigma = list(range(n))
        rng.shuffle(sigma)
        rows = lp_rows(build_model(g, top, k, 6, fixed_assignment=sigma).to_lp())
        e = g.edge_count
        non = comb(n, 2) - e
        per_edge = {1: 2, 2: 4}.get(k, 2 * k + 1)
        per_non = 1 + 1 + 2 * (k - 1) + 1
        expected = comb(n, 2) + per_edge * e + per_non * non + (k - 1) + k
        assert len(rows) == expected
        assert sum(r.startswith("dist_") for r in rows) == comb(n, 2)
        assert sum(r.startswith("disjoint_") for r in rows) == k - 1


def test_free_assignment_structure():
    n = 4
    model = build_model(Graph.path(n), caterpillar_topology(n), 2, 3)
    assert model.count("assign_row_") == n and model.count("assign_col_") == n
    assert sum(v.kind == "binary" for v in model.variables.values()) >= n * n
    assert model.meta["M"] == 5 * 3 + 1


@pytest.mark.parametrize("k, w", [(1, 1), (2, 1), (1, 2)])
def test_milp_agrees_with_exhaustive_search(k, w):
    n = 4
    top = caterpillar_topology(n)
    infeasible_seen = 0
    for g in graph_classes(n):
        out = search_witness(g, SearchConfig(k=k, max_weight=w, escalate=False,
                                             topology="caterpillar"))
        model = build_model(g, top, k, w)
        sol = model.solve(time_limit=60)
        if out.found:
            assert sol is not None
            assert verify_witness(g, witness_from_solution(g, top, model, sol)).ok
        else:
            assert out.exhausted and sol is None
            infeasible_seen += 1
    if (k, w) == (1, 1):
        assert infeasible_seen > 0


def test_milp_fixed_assignment_spot_checks():
    rng = random.Random(5)
    for _ in range(15):
        n = 5
        g = random_graph(rng, n)
        top = enumerate_topologies(n)[0]
        sigma = list(range(n))
        rng.shuffle(sigma)
        model = build_model(g, top, 1, 3, fixed_assignment=sigma)
        sol = model.solve(time_limit=60)
        if sol is not None:
            wit = witness_from_solution(g, top, model, sol)
            assert verify_witness(g, wit).ok


def test_model_rejects_mismatch():
    with pytest.raises(ValueError):
        build_model(Graph.path(4), caterpillar_topology(5), 1, 3)
    with pytest.raises(ValueError):
        build_model(Graph.path(4), caterpillar_topology(4), 1, 3, fixed_assignment=[0, 0, 1, 2])
