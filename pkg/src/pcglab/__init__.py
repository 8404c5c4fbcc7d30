"""Pairwise compatibility graphs with k intervals: witnesses, search and lifts."""

from .constructions import almost_universal_extension, normalize_base_witness, universal_extension
from .graph import Graph, encode_graph6, parse_graph6
from .solver import SearchConfig, SearchOutcome, batch_certify, search_witness
from .topology import Topology, caterpillar_topology, complete_binary_topology, enumerate_topologies
from .tree import WeightedTree, binarize, encode_newick, parse_newick
from .witness import IntervalSet, Witness, extract_intervals, verify_witness

__version__ = "0.1.0"

__all__ = [
    "Graph", "IntervalSet", "SearchConfig", "SearchOutcome", "Topology", "WeightedTree",
    "Witness", "almost_universal_extension", "batch_certify", "binarize",
    "caterpillar_topology", "complete_binary_topology", "encode_graph6", "encode_newick",
    "enumerate_topologies", "extract_intervals", "normalize_base_witness", "parse_graph6",
    "parse_newick", "search_witness", "universal_extension", "verify_witness",
]
