"""Command-line entry point: ``pcglab <command> ...``.

Machine-readable output is JSON on stdout (always carrying ``"schema": 1``);
diagnostics go to stderr.  Exit codes: 0 success or feasible, 1 failure or
infeasible within the given bounds, 2 usage or I/O error.

Search settings resolve as command-line flag, then ``PCGLAB_<KEY>``
environment variable, then ``pcglab.toml`` (or ``--config``), then the
built-in default.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from .catalog import CatalogError, load_catalog
from .constructions import ConstructionError, ConstructionTrace, almost_universal_extension, \
    universal_extension
from .graph import Graph, GraphFormatError, almost_universal_nodes, parse_graph6, \
    read_graph_file, remove_node, universal_nodes
from .ilp import build_model
from .solver import SearchConfig, SearchError, batch_certify, batch_summary, search_witness
from .topology import enumerate_topologies, topology_from_tree
from .tree import TreeError, parse_newick
from .witness import SCHEMA_VERSION, Witness, WitnessError, verify_witness

log = logging.getLogger("pcglab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# key -> (type, default)
_SETTINGS: dict[str, tuple[type, Any]] = {
    "k": (int, None),
    "max_weight": (int, 8),
    "min_weight": (int, 1),
    "initial_weight": (int, None),
    "topology": (str, "all"),
    "workers": (int, 1),
    "engine": (str, "auto"),
    "time_budget": (float, None),
    "node_budget": (int, None),
    "deterministic": (bool, True),
}


class UsageError(Exception):
    pass


def _emit(obj: dict) -> None:
    obj = {"schema": SCHEMA_VERSION, **obj}
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _load_config_file(path: str | None) -> dict[str, Any]:
    if path is None:
        if not Path("pcglab.toml").is_file():
            return {}
        path = "pcglab.toml"
    try:
        import tomllib  # type: ignore[import-not-found]
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    # keys may sit at top level or under [search]
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    flat.update(data.get("search", {}))
    return {k.replace("-", "_"): v for k, v in flat.items()}


def resolve_settings(args: argparse.Namespace, env: dict[str, str] | None = None
                     ) -> dict[str, Any]:
    env = os.environ if env is None else env
    file_cfg = _load_config_file(getattr(args, "config", None))
    out = {}
    for key, (typ, default) in _SETTINGS.items():
        val = getattr(args, key, None)
        if val is None and f"PCGLAB_{key.upper()}" in env:
            val = env[f"PCGLAB_{key.upper()}"]
        if val is None and key in file_cfg:
            val = file_cfg[key]
        if val is None:
            val = default
        if val is not None:
            try:
                val = _parse_bool(val) if typ is bool else typ(val)
            except (TypeError, ValueError):
                raise UsageError(f"bad value for {key}: {val!r}") from None
        out[key] = val
    return out


def _search_config(settings: dict[str, Any], k_default: int, **over) -> SearchConfig:
    s = dict(settings)
    s.update(over)
    try:
        return SearchConfig(
            k=s["k"] if s["k"] is not None else k_default,
            max_weight=s["max_weight"], min_weight=s["min_weight"],
            topology=s["topology"], initial_weight=s["initial_weight"],
            time_budget=s["time_budget"], node_budget=s["node_budget"],
            workers=s["workers"], deterministic=s["deterministic"], engine=s["engine"])
    except SearchError as exc:
        raise UsageError(str(exc)) from None


def _read_graph(path: str) -> Graph:
    try:
        return read_graph_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read graph {path}: {exc}") from None
    except (GraphFormatError, ValueError, KeyError) as exc:
        raise UsageError(f"bad graph file {path}: {exc}") from None


def _read_witness(path: str) -> Witness:
    try:
        return Witness.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read witness {path}: {exc}") from None
    except (json.JSONDecodeError, WitnessError, TreeError) as exc:
        raise UsageError(f"bad witness file {path}: {exc}") from None


def _write_verified(g: Graph, w: Witness, path: str | None) -> None:
    """Write a witness only after it verifies against ``g``."""
    report = verify_witness(g, w)
    if not report.ok:
        raise AssertionError(f"refusing to write an unverified witness: {report.violations[:3]}")
    if path:
        try:
            Path(path).write_text(w.dumps() + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc}") from None


# commands ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    g = _read_graph(args.graph)
    w = _read_witness(args.witness)
    try:
        report = verify_witness(g, w)
    except WitnessError as exc:
        _emit({"command": "verify", "ok": False, "error": str(exc)})
        return EXIT_FAIL
    _emit({"command": "verify", "intervals": w.intervals.to_json(), **report.to_json()})
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_search(args) -> int:
    g = _read_graph(args.graph)
    cfg = _search_config(resolve_settings(args), 2)
    try:
        outcome = search_witness(g, cfg)
    except SearchError as exc:
        raise UsageError(str(exc)) from None
    if outcome.found:
        _write_verified(g, outcome.witness, args.out)
    _emit({"command": "search", "k": cfg.k, **outcome.to_json()})
    return EXIT_OK if outcome.found else EXIT_FAIL


def _pick_node(g: Graph, via: str, node: int | None) -> tuple[int, int | None]:
    if via == "universal":
        cands = sorted(universal_nodes(g))
        if node is not None:
            if node not in cands:
                raise UsageError(f"node {node} is not universal")
            return node, None
        if not cands:
            raise UsageError("graph has no universal node")
        return cands[0], None
    pairs = sorted(almost_universal_nodes(g))
    if node is not None:
        pairs = [p for p in pairs if p[0] == node]
        if not pairs:
            raise UsageError(f"node {node} is not almost universal")
    if not pairs:
        raise UsageError("graph has no almost-universal node")
    return pairs[0]


def construct_witness(g: Graph, via: str, node: int | None, base: Witness | None,
                      cfg: SearchConfig) -> tuple[Witness | None, ConstructionTrace | None, dict]:
    """Run one of the two lifts, searching a base witness for ``G - u`` if needed."""
    u, v = _pick_node(g, via, node)
    info: dict[str, Any] = {"node": u, "missing": v}
    if base is None:
        sub = remove_node(g, u)
        outcome = search_witness(sub, cfg)
        info["base_search"] = outcome.to_json()
        if not outcome.found:
            return None, None, info
        base = outcome.witness
    trace = ConstructionTrace(base)
    if via == "universal":
        out = universal_extension(g, u, base, trace)
    else:
        out = almost_universal_extension(g, u, v, base, trace)
    return out, trace, info


def cmd_construct(args) -> int:
    g = _read_graph(args.graph)
    base = _read_witness(args.base_witness) if args.base_witness else None
    cfg = _search_config(resolve_settings(args), 1, k=1)
    try:
        out, trace, info = construct_witness(g, args.via, args.node, base, cfg)
    except ConstructionError as exc:
        _emit({"command": "construct", "ok": False, "error": str(exc)})
        return EXIT_FAIL
    if out is None:
        _emit({"command": "construct", "ok": False,
               "error": "no base witness for G - u within the search bounds", **info})
        return EXIT_FAIL
    _write_verified(g, out, args.out)
    result = {"command": "construct", "ok": True, "via": args.via, **info,
              "witness": out.to_json()}
    if args.trace:
        result["trace"] = trace.to_json()
    _emit(result)
    return EXIT_OK


def cmd_export_ilp(args) -> int:
    g = _read_graph(args.graph)
    try:
        tree = parse_newick(Path(args.topology_file).read_text().strip())
    except OSError as exc:
        raise UsageError(f"cannot read topology {args.topology_file}: {exc}") from None
    except TreeError as exc:
        raise UsageError(f"bad topology: {exc}") from None
    topology, slot_labels = topology_from_tree(tree, Path(args.topology_file).stem)
    if topology.n != g.n:
        raise UsageError(f"topology has {topology.n} leaves, graph has {g.n} nodes")
    fixed = None
    if args.assignment:
        try:
            raw = json.loads(Path(args.assignment).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read assignment: {exc}") from None
        slot = {lab: i for i, lab in enumerate(slot_labels)}
        try:
            fixed = [slot[str(raw[str(u)])] for u in range(g.n)]
        except KeyError as exc:
            raise UsageError(f"assignment does not cover node or leaf {exc}") from None
        if sorted(fixed) != list(range(g.n)):
            raise UsageError("assignment is not a bijection onto the leaves")
    settings = resolve_settings(args)
    k = settings["k"] if settings["k"] is not None else 2
    try:
        model = build_model(g, topology, k, settings["max_weight"], settings["min_weight"], fixed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = model.to_lp()
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from None
    _emit({"command": "export-ilp", "k": k, "variables": len(model.variables),
           "constraints": len(model.constraints), "big_m": model.meta["M"],
           "leaf_slots": slot_labels, "out": args.out,
           "model": None if args.out else text})
    return EXIT_OK


def cmd_enum_topologies(args) -> int:
    if not 3 <= args.n <= 10:
        raise UsageError("-n must be between 3 and 10")
    tops = enumerate_topologies(args.n)
    items = [t.newick() if args.format == "newick" else t.dot() for t in tops]
    _emit({"command": "enum-topologies", "n": args.n, "count": len(tops),
           "format": args.format, "topologies": items})
    return EXIT_OK


def _read_graph_lines(path: str) -> list[Graph]:
    try:
        lines = Path(path).read_text().splitlines() if path != "-" else sys.stdin.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    graphs = []
    for i, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            graphs.append(parse_graph6(line))
        except GraphFormatError as exc:
            raise UsageError(f"{path}:{i}: {exc}") from None
    return graphs


def cmd_batch(args) -> int:
    graphs = _read_graph_lines(args.graphs)
    cfg = _search_config(resolve_settings(args), 1)
    rows = batch_certify(graphs, cfg)
    for row in rows:
        sys.stdout.write(json.dumps(row.to_json(), sort_keys=True) + "\n")
    summary = batch_summary(rows)
    sys.stderr.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK if summary["found"] == len(rows) else EXIT_FAIL


# reproduction ------------------------------------------------------------------------

SHAPES = (("complete-binary", "complete"), ("caterpillar", "caterpillar"))


def reproduce_paper(catalog_dir: str | None, cfg: SearchConfig, base_cfg: SearchConfig
                    ) -> dict:
    """Two-interval witnesses for every catalog graph on both 8-leaf shapes.

    Graphs with a recorded universal or almost-universal node are also lifted
    from a one-interval witness of ``G - u``.  Returns a JSON-ready report.
    """
    entries = load_catalog(catalog_dir)
    if entries is None:
        return {"status": "skipped: catalog missing", "rows": []}
    rows = []
    for entry in entries:
        g = entry.graph
        row: dict[str, Any] = {"id": entry.id, "graph6": entry.graph6}
        if entry.universal_node is not None:
            via, node = "universal", entry.universal_node
        elif entry.almost_universal is not None:
            via, node = "almost-universal", entry.almost_universal[0]
        else:
            via, node = None, None
        if via is not None:
            label = f"{via} node {node + 1}"
            t0 = time.monotonic()
            try:
                out, _, _ = construct_witness(g, via, node, None, base_cfg)
                ok = out is not None and verify_witness(g, out).ok
            except ConstructionError as exc:
                out, ok = None, False
                log.warning("%s: construction failed: %s", entry.id, exc)
            row["construction"] = {"path": label, "verified": ok,
                                   "witness": out.to_json() if out else None,
                                   "elapsed": round(time.monotonic() - t0, 3)}
            row["method"] = f"construction ({label}) + shape search"
        else:
            row["method"] = "search"
        for key, shape in SHAPES:
            outcome = search_witness(g, SearchConfig(**{**cfg.__dict__, "topology": shape}))
            row[key] = {"verified": outcome.found and verify_witness(g, outcome.witness).ok,
                        "exhausted": outcome.exhausted, "weight_bound": outcome.weight_bound,
                        "elapsed": round(outcome.elapsed, 3),
                        "witness": outcome.witness.to_json() if outcome.found else None}
        row["ok"] = all(row[key]["verified"] for key, _ in SHAPES) and \
            row.get("construction", {}).get("verified", True)
        rows.append(row)
    done = sum(r["ok"] for r in rows)
    return {"status": "ok" if done == len(rows) else "incomplete",
            "verified": done, "total": len(rows), "rows": rows}


def _table(report: dict) -> str:
    if not report["rows"]:
        return report["status"]
    head = f"{'graph':6} {'complete-binary':16} {'caterpillar':12} construction"
    lines = [head, "-" * len(head)]
    for r in report["rows"]:
        def cell(key: str) -> str:
            c = r[key]
            if c["verified"]:
                return f"ok (W<={c['weight_bound']})"
            return "exhausted" if c["exhausted"] else "budget"
        con = r.get("construction")
        ctext = "-" if con is None else f"{con['path']}: {'ok' if con['verified'] else 'FAILED'}"
        lines.append(f"{r['id']:6} {cell('complete-binary'):16} {cell('caterpillar'):12} {ctext}")
    lines.append(f"{report['verified']}/{report['total']} graphs verified on both shapes")
    return "\n".join(lines)


def cmd_reproduce_paper(args) -> int:
    settings = resolve_settings(args)
    cfg = _search_config(settings, 2, k=2)
    base_cfg = _search_config(settings, 1, k=1, topology="all")
    try:
        report = reproduce_paper(args.catalog, cfg, base_cfg)
    except CatalogError as exc:
        raise UsageError(f"bad catalog: {exc}") from None
    sys.stderr.write(_table(report) + "\n")
    _emit({"command": "reproduce-paper", **report})
    if report["status"].startswith("skipped"):
        return EXIT_OK
    return EXIT_OK if report["status"] == "ok" else EXIT_FAIL


# argument parsing --------------------------------------------------------------------

def _search_flags(p: argparse.ArgumentParser, topology: bool = True) -> None:
    p.add_argument("-k", dest="k", type=int, help="number of intervals")
    p.add_argument("--max-weight", type=int, help="largest edge weight tried")
    p.add_argument("--min-weight", type=int, help="smallest edge weight (default 1)")
    p.add_argument("--initial-weight", type=int, help="first weight bound of the escalation")
    if topology:
        p.add_argument("--topology", help="all | caterpillar | complete")
    p.add_argument("--workers", type=int)
    p.add_argument("--engine", choices=("auto", "python", "numba"))
    p.add_argument("--time-budget", type=float, help="seconds")
    p.add_argument("--node-budget", type=int, help="DFS nodes")
    p.add_argument("--deterministic", dest="deterministic", action="store_const", const=True)
    p.add_argument("--no-deterministic", dest="deterministic", action="store_const",
                   const=False)
    p.add_argument("--config", help="TOML settings file (default ./pcglab.toml)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcglab",
                                     description="k-interval PCG witnesses: search, verify, lift")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a witness against a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--witness", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="bounded exhaustive witness search")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    _search_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("construct", help="lift a 1-interval witness of G - u to G")
    p.add_argument("--graph", required=True)
    p.add_argument("--via", required=True, choices=("universal", "almost-universal"))
    p.add_argument("--node", type=int)
    p.add_argument("--base-witness")
    p.add_argument("--out")
    p.add_argument("--trace", action="store_true")
    _search_flags(p, topology=False)
    p.set_defaults(func=cmd_construct, topology=None)

    p = sub.add_parser("export-ilp", help="write the MILP model in LP format")
    p.add_argument("--graph", required=True)
    p.add_argument("--topology-file", required=True)
    p.add_argument("--assignment", help="JSON mapping node -> leaf label")
    p.add_argument("-k", dest="k", type=int)
    p.add_argument("--max-weight", type=int)
    p.add_argument("--min-weight", type=int)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_ilp)

    p = sub.add_parser("enum-topologies", help="list unrooted binary tree shapes")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--format", choices=("newick", "dot"), default="newick")
    p.set_defaults(func=cmd_enum_topologies)

    p = sub.add_parser("batch", help="search every graph6 line of a file (JSON lines out)")
    p.add_argument("--graphs", required=True, help="file of graph6 lines, or - for stdin")
    _search_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("reproduce-paper",
                       help="2-interval witnesses for the catalog graphs on both 8-leaf shapes")
    p.add_argument("--catalog", help="catalog directory (default: bundled data)")
    _search_flags(p, topology=False)
    p.set_defaults(func=cmd_reproduce_paper, topology=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"pcglab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
