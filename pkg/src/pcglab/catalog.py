"""Bundled catalog of the seven 8-node graphs that are not PCGs.

Each graph lives in ``<dir>/G<i>.g6``.  An optional ``catalog.json`` in the
same directory carries a provenance note and structural facts (universal
node, almost-universal pair, 0-based) that are asserted when the entry is
loaded.  A missing directory or missing files means "no catalog"; callers
skip catalog-dependent work instead of failing.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .graph import Graph, almost_universal_nodes, parse_graph6, universal_nodes

CATALOG_IDS = tuple(f"G{i}" for i in range(1, 8))
ENV_VAR = "PCGLAB_CATALOG"


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    graph6: str
    provenance: str = ""
    universal_node: int | None = None
    almost_universal: tuple[int, int] | None = None  # (u, v): u misses only v

    @property
    def graph(self) -> Graph:
        return parse_graph6(self.graph6)

    def check(self) -> None:
        """Raise CatalogError if a recorded structural fact does not hold."""
        g = self.graph
        if g.n != 8:
            raise CatalogError(f"{self.id}: expected 8 nodes, found {g.n}")
        if self.universal_node is not None and self.universal_node not in universal_nodes(g):
            raise CatalogError(f"{self.id}: node {self.universal_node} is not universal")
        if self.almost_universal is not None and \
                tuple(self.almost_universal) not in almost_universal_nodes(g):
            raise CatalogError(f"{self.id}: {self.almost_universal} is not an almost-universal pair")


def default_catalog_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(__file__).parent / "data" / "nonpcg8"


def load_catalog(directory: str | os.PathLike | None = None) -> list[CatalogEntry] | None:
    """All seven entries, or None when the catalog files are not present."""
    root = Path(directory) if directory is not None else default_catalog_dir()
    files = [root / f"{cid}.g6" for cid in CATALOG_IDS]
    if not all(f.is_file() for f in files):
        return None
    meta: dict = {}
    meta_file = root / "catalog.json"
    if meta_file.is_file():
        meta = json.loads(meta_file.read_text())
    entries = []
    for cid, f in zip(CATALOG_IDS, files):
        lines = [ln.strip() for ln in f.read_text().splitlines() if ln.strip()]
        if len(lines) != 1:
            raise CatalogError(f"{f}: expected exactly one graph6 line")
        info = meta.get("graphs", {}).get(cid, {})
        au = info.get("almost_universal")
        entry = CatalogEntry(cid, lines[0], meta.get("provenance", ""),
                             info.get("universal_node"), tuple(au) if au else None)
        entry.check()
        entries.append(entry)
    return entries
