"""Mixed-integer model for k-interval PCG recognition on a fixed tree shape.

Variables are the integer edge weights, the interval endpoints, big-M
selectors deciding which interval (or which gap) each pair's distance falls
in, and, when no leaf assignment is fixed, assignment binaries with product
binaries linking node pairs to leaf pairs.  The model can be written in
CPLEX LP format or handed to scipy's HiGHS interface for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .graph import Graph
from .topology import Topology
from .tree import leaf_distance_matrix
from .witness import IntervalSet, Witness, extract_intervals


@dataclass
class Variable:
    name: str
    lb: int
    ub: int
    kind: str = "integer"  # integer | binary


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, int]
    sense: str  # "<=", ">=", "="
    rhs: int


@dataclass
class IlpModel:
    variables: dict[str, Variable] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, int] = field(default_factory=dict)
    comment: str = ""
    meta: dict = field(default_factory=dict)

    def var(self, name: str, lb: int, ub: int, kind: str = "integer") -> str:
        self.variables[name] = Variable(name, lb, ub, kind)
        return name

    def add(self, name: str, coeffs: Mapping[str, int], sense: str, rhs: int) -> None:
        clean = {v: c for v, c in coeffs.items() if c}
        self.constraints.append(Constraint(name, clean, sense, rhs))

    def count(self, prefix: str) -> int:
        return sum(1 for c in self.constraints if c.name.startswith(prefix))

    # LP text -------------------------------------------------------------------

    def to_lp(self) -> str:
        def expr(coeffs: Mapping[str, int]) -> str:
            if not coeffs:
                return "0"
            parts = []
            for i, (v, c) in enumerate(coeffs.items()):
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                term = v if mag == 1 else f"{mag} {v}"
                parts.append(("- " if sign == "-" else "") + term if i == 0 else f"{sign} {term}")
            return " ".join(parts)

        lines = []
        for ln in self.comment.splitlines():
            lines.append(f"\\ {ln}")
        lines.append("Minimize")
        lines.append(f" obj: {expr(self.objective)}")
        lines.append("Subject To")
        for c in self.constraints:
            lines.append(f" {c.name}: {expr(c.coeffs)} {c.sense} {c.rhs}")
        lines.append("Bounds")
        for v in self.variables.values():
            if v.kind == "binary":
                continue
            lines.append(f" {v.lb} <= {v.name} <= {v.ub}")
        ints = [v.name for v in self.variables.values() if v.kind == "integer"]
        bins = [v.name for v in self.variables.values() if v.kind == "binary"]
        if ints:
            lines.append("General")
            lines.extend(f" {name}" for name in ints)
        if bins:
            lines.append("Binary")
            lines.extend(f" {name}" for name in bins)
        lines.append("End")
        return "\n".join(lines) + "\n"

    # solving ---------------------------------------------------------------------

    def solve(self, time_limit: float | None = None) -> dict[str, int] | None:
        """Solve with scipy's HiGHS MILP interface; None when infeasible."""
        import numpy as np
        from scipy.optimize import Bounds, LinearConstraint, milp
        from scipy.sparse import lil_matrix

        names = list(self.variables)
        index = {n: i for i, n in enumerate(names)}
        c = np.zeros(len(names))
        for v, coef in self.objective.items():
            c[index[v]] = coef
        A = lil_matrix((len(self.constraints), len(names)))
        lo = np.empty(len(self.constraints))
        hi = np.empty(len(self.constraints))
        for r, con in enumerate(self.constraints):
            for v, coef in con.coeffs.items():
                A[r, index[v]] = coef
            lo[r] = -np.inf if con.sense == "<=" else con.rhs
            hi[r] = np.inf if con.sense == ">=" else con.rhs
        lb = np.array([self.variables[n].lb for n in names], float)
        ub = np.array([self.variables[n].ub for n in names], float)
        options = {"time_limit": time_limit} if time_limit else {}
        res = milp(c, constraints=[LinearConstraint(A.tocsr(), lo, hi)],
                   integrality=np.ones(len(names)), bounds=Bounds(lb, ub), options=options)
        if res.status == 2:  # infeasible
            return None
        if res.x is None:
            raise RuntimeError(f"MILP solver gave no answer: {res.message}")
        return {n: int(round(res.x[i])) for i, n in enumerate(names)}


def build_model(g: Graph, topology: Topology, k: int, max_weight: int, min_weight: int = 1,
                fixed_assignment: Sequence[int] | None = None) -> IlpModel:
    """Model whose feasible points are k-interval witnesses of ``g`` on ``topology``.

    ``fixed_assignment[u]`` is the leaf slot of node ``u`` when given.
    """
    n = g.n
    if topology.n != n:
        raise ValueError(f"topology has {topology.n} leaves, graph has {n} nodes")
    if k < 1:
        raise ValueError("k must be >= 1")
    tree = topology.tree
    m = len(tree.edges)
    big_m = m * max_weight + 1
    model = IlpModel(comment=(
        f"{k}-interval PCG model: n={n} nodes, {m} tree edges, weights in "
        f"[{min_weight}, {max_weight}], M={big_m}"))
    model.meta = {"n": n, "k": k, "M": big_m, "topology": topology.newick(),
                  "fixed_assignment": list(fixed_assignment) if fixed_assignment else None}

    edge_index = {(u, v): i for i, (u, v, _) in enumerate(tree.edges)}
    w = [model.var(f"w_{i}", min_weight, max_weight) for i in range(m)]
    model.objective = {v: 1 for v in w}
    a = [model.var(f"a_{i + 1}", 0, big_m - 1) for i in range(k)]
    b = [model.var(f"b_{i + 1}", 0, big_m - 1) for i in range(k)]
    for i in range(k):
        model.add(f"order_{i + 1}", {a[i]: 1, b[i]: -1}, "<=", 0)
    for i in range(k - 1):
        model.add(f"disjoint_{i + 1}", {b[i]: 1, a[i + 1]: -1}, "<=", -1)

    def leaf_path(i: int, j: int) -> list[str]:
        return [w[edge_index[e]] for e in tree.path_edges(i, j)]

    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    d = {p: model.var(f"d_{p[0]}_{p[1]}", 0, big_m - 1) for p in pairs}

    if fixed_assignment is not None:
        sigma = list(fixed_assignment)
        if sorted(sigma) != list(range(n)):
            raise ValueError("fixed assignment must be a bijection onto leaf slots 0..n-1")
        for u, v in pairs:
            coeffs = {d[u, v]: 1}
            for var in leaf_path(sigma[u], sigma[v]):
                coeffs[var] = coeffs.get(var, 0) - 1
            model.add(f"dist_{u}_{v}", coeffs, "=", 0)
    else:
        x = {(u, l): model.var(f"x_{u}_{l}", 0, 1, "binary") for u in range(n) for l in range(n)}
        for u in range(n):
            model.add(f"assign_row_{u}", {x[u, l]: 1 for l in range(n)}, "=", 1)
        for l in range(n):
            model.add(f"assign_col_{l}", {x[u, l]: 1 for u in range(n)}, "=", 1)
        for u, v in pairs:
            for l1 in range(n):
                for l2 in range(n):
                    if l1 == l2:
                        continue
                    p = model.var(f"p_{u}_{v}_{l1}_{l2}", 0, 1, "binary")
                    model.add(f"prod_a_{u}_{v}_{l1}_{l2}", {p: 1, x[u, l1]: -1}, "<=", 0)
                    model.add(f"prod_b_{u}_{v}_{l1}_{l2}", {p: 1, x[v, l2]: -1}, "<=", 0)
                    model.add(f"prod_c_{u}_{v}_{l1}_{l2}",
                              {p: 1, x[u, l1]: -1, x[v, l2]: -1}, ">=", -1)
                    # p = 1  =>  d_uv = sum of weights on the l1-l2 path
                    lower = {d[u, v]: 1, p: -big_m}
                    upper = {d[u, v]: 1, p: big_m}
                    for var in leaf_path(l1, l2):
                        lower[var] = lower.get(var, 0) - 1
                        upper[var] = upper.get(var, 0) - 1
                    model.add(f"dist_lo_{u}_{v}_{l1}_{l2}", lower, ">=", -big_m)
                    model.add(f"dist_hi_{u}_{v}_{l1}_{l2}", upper, "<=", big_m)

    for u, v in pairs:
        dv = d[u, v]
        if g.has_edge(u, v):
            _edge_rows(model, f"{u}_{v}", dv, a, b, big_m)
        else:
            _nonedge_rows(model, f"{u}_{v}", dv, a, b, big_m)
    return model


def _edge_rows(model: IlpModel, tag: str, dv: str, a: list[str], b: list[str], big_m: int):
    k = len(a)
    if k == 1:
        model.add(f"sel_in_{tag}_lo", {dv: 1, a[0]: -1}, ">=", 0)
        model.add(f"sel_in_{tag}_hi", {dv: 1, b[0]: -1}, "<=", 0)
        return
    if k == 2:
        # z = 0: distance in the first interval, z = 1: in the second
        z = model.var(f"z_{tag}", 0, 1, "binary")
        model.add(f"sel_in_{tag}_1lo", {dv: 1, a[0]: -1, z: big_m}, ">=", 0)
        model.add(f"sel_in_{tag}_1hi", {dv: 1, b[0]: -1, z: -big_m}, "<=", 0)
        model.add(f"sel_in_{tag}_2lo", {dv: 1, a[1]: -1, z: -big_m}, ">=", -big_m)
        model.add(f"sel_in_{tag}_2hi", {dv: 1, b[1]: -1, z: big_m}, "<=", big_m)
        return
    zs = [model.var(f"z_{tag}_{i + 1}", 0, 1, "binary") for i in range(k)]
    model.add(f"sel_in_{tag}_one", {z: 1 for z in zs}, "=", 1)
    for i, z in enumerate(zs):
        model.add(f"sel_in_{tag}_{i + 1}lo", {dv: 1, a[i]: -1, z: -big_m}, ">=", -big_m)
        model.add(f"sel_in_{tag}_{i + 1}hi", {dv: 1, b[i]: -1, z: big_m}, "<=", big_m)


def _nonedge_rows(model: IlpModel, tag: str, dv: str, a: list[str], b: list[str], big_m: int):
    # Regions: below the first interval, each gap between intervals, above the last.
    k = len(a)
    ys = [model.var(f"y_{tag}_{r}", 0, 1, "binary") for r in range(k + 1)]
    model.add(f"sel_out_{tag}_one", {y: 1 for y in ys}, "=", 1)
    # below: d <= a_1 - 1
    model.add(f"sel_out_{tag}_0hi", {dv: 1, a[0]: -1, ys[0]: big_m}, "<=", big_m - 1)
    for r in range(1, k):
        model.add(f"sel_out_{tag}_{r}lo", {dv: 1, b[r - 1]: -1, ys[r]: -big_m}, ">=", 1 - big_m)
        model.add(f"sel_out_{tag}_{r}hi", {dv: 1, a[r]: -1, ys[r]: big_m}, "<=", big_m - 1)
    # above: d >= b_k + 1
    model.add(f"sel_out_{tag}_{k}lo", {dv: 1, b[k - 1]: -1, ys[k]: -big_m}, ">=", 1 - big_m)


def witness_from_solution(g: Graph, topology: Topology, model: IlpModel,
                          solution: Mapping[str, int]) -> Witness:
    """Rebuild a witness from solver values; intervals are re-derived exactly."""
    n = g.n
    weights = [solution[f"w_{i}"] for i in range(len(topology.tree.edges))]
    tree = topology.tree.with_weights(weights)
    fixed = model.meta.get("fixed_assignment")
    if fixed is not None:
        sigma = list(fixed)
    else:
        sigma = [next(l for l in range(n) if solution[f"x_{u}_{l}"]) for u in range(n)]
    assignment = {u: str(sigma[u]) for u in range(n)}
    intervals = extract_intervals(g, tree, assignment, model.meta["k"])
    if intervals is None:
        raise ValueError("solver point does not separate edges from non-edges")
    return Witness(tree, assignment, intervals)
