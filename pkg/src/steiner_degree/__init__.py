"""Degree-bounded group Steiner tree: LP rounding on trees, a separator-tree
reduction for bounded treewidth, k-tree reductions and exact oracles."""
from .instance import (Graph, GstInstance, InstanceError, KTreeInstance, SubTree, check, covers, gst_from_json,
                       is_feasible, ktree_from_json, max_degree, to_json, validate)

__version__ = "0.1.0"

__all__ = [
    "Graph", "GstInstance", "InstanceError", "KTreeInstance", "SubTree", "check", "covers",
    "gst_from_json", "is_feasible", "ktree_from_json", "max_degree", "to_json", "validate",
    "__version__",
]
