"""Hierarchical program model: typed nodes, typed edges, attributes.

Attribute values are plain strings; the ``PC`` key holds a feature
expression in the concrete grammar.  A missing PC means constant-true.
"""

from __future__ import annotations

NODE_KINDS = ("COMPONENT", "FILE", "CLASS", "FUNCTION", "VARIABLE")
EDGE_TYPES = ("contain", "write", "varWrite", "call", "varInfFunc", "cFunction")

PC_KEY = "PC"


class FactGraphError(Exception):
    pass


class FactGraph:
    def __init__(self):
        self.nodes: dict[str, str] = {}  # id -> kind
        self.edges: set[tuple[str, str, str]] = set()  # (etype, src, dst)
        self.node_attrs: dict[str, dict[str, str]] = {}
        self.edge_attrs: dict[tuple[str, str, str], dict[str, str]] = {}

    def add_node(self, node_id, kind):
        existing = self.nodes.get(node_id)
        if existing is not None and existing != kind:
            raise FactGraphError(f"node {node_id!r} declared as {existing} and {kind}")
        self.nodes[node_id] = kind

    def add_edge(self, etype, src, dst):
        if src not in self.nodes:
            raise FactGraphError(f"edge source {src!r} is not a node")
        if dst not in self.nodes:
            raise FactGraphError(f"edge target {dst!r} is not a node")
        self.edges.add((etype, src, dst))

    def set_node_attr(self, node_id, key, value):
        if node_id not in self.nodes:
            raise FactGraphError(f"attribute subject {node_id!r} is not a node")
        self.node_attrs.setdefault(node_id, {})[key] = value

    def set_edge_attr(self, edge, key, value):
        if edge not in self.edges:
            raise FactGraphError(f"attribute subject {edge!r} is not an edge")
        self.edge_attrs.setdefault(edge, {})[key] = value

    def set_node_pc_text(self, node_id, text):
        self.set_node_attr(node_id, PC_KEY, text)

    def set_edge_pc_text(self, edge, text):
        self.set_edge_attr(edge, PC_KEY, text)

    def node_pc_text(self, node_id):
        return self.node_attrs.get(node_id, {}).get(PC_KEY)

    def edge_pc_text(self, edge):
        return self.edge_attrs.get(edge, {}).get(PC_KEY)

    def edges_of_type(self, etype):
        return sorted(e for e in self.edges if e[0] == etype)

    def sorted_nodes(self):
        return sorted(self.nodes.items())

    def sorted_edges(self):
        return sorted(self.edges)

    def __eq__(self, other):
        if not isinstance(other, FactGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and {k: v for k, v in self.node_attrs.items() if v}
            == {k: v for k, v in other.node_attrs.items() if v}
            and {k: v for k, v in self.edge_attrs.items() if v}
            == {k: v for k, v in other.edge_attrs.items() if v}
        )

    def __repr__(self):
        return f"<FactGraph nodes={len(self.nodes)} edges={len(self.edges)}>"
