"""Scholarly knowledge graph service.

Stores research-contribution descriptions as annotated statements with
provenance, ingests paper metadata by DOI, and supports contribution
similarity search and comparison tables, behind a REST API and CLI.
"""

from .graph_store import GraphStore, Node, NodeKind, Provenance, Statement

__all__ = ["GraphStore", "Node", "NodeKind", "Provenance", "Statement"]
__version__ = "0.1.0"
