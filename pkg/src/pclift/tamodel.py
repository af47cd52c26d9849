"""Tuple-Attribute text serialization and tabular fact-file conversion.

A TA document lists all node instances, then all edges, then attribute
records; identifiers must be declared before they are used.  Fact files
are one tab-separated file per relation with a trailing presence-condition
column (empty means constant-true).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .factgraph import FactGraph, PC_KEY


class TaFormatError(Exception):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


NodeSubject = tuple[str, str]  # ("node", id)
EdgeSubject = tuple[str, tuple[str, str, str]]  # ("edge", (etype, src, dst))


@dataclass
class TaDocument:
    instances: list[tuple[str, str]] = field(default_factory=list)
    edges: list[tuple[str, str, str]] = field(default_factory=list)
    attrs: list[tuple[NodeSubject | EdgeSubject, list[tuple[str, str]]]] = field(
        default_factory=list
    )

    @classmethod
    def from_graph(cls, g):
        doc = cls()
        doc.instances = [(i, k) for i, k in g.sorted_nodes()]
        doc.edges = g.sorted_edges()
        for node_id, _ in doc.instances:
            pairs = sorted(g.node_attrs.get(node_id, {}).items())
            if pairs:
                doc.attrs.append((("node", node_id), pairs))
        for edge in doc.edges:
            pairs = sorted(g.edge_attrs.get(edge, {}).items())
            if pairs:
                doc.attrs.append((("edge", edge), pairs))
        return doc

    def to_graph(self):
        g = FactGraph()
        for node_id, kind in self.instances:
            g.add_node(node_id, kind)
        for etype, src, dst in self.edges:
            g.add_edge(etype, src, dst)
        for subject, pairs in self.attrs:
            for key, value in pairs:
                if subject[0] == "node":
                    g.set_node_attr(subject[1], key, value)
                else:
                    g.set_edge_attr(subject[1], key, value)
        return g


_SYMBOL_BAD = re.compile(r"[\s\"(){}]")


def _check_symbol(symbol):
    if not symbol or _SYMBOL_BAD.search(symbol):
        raise TaFormatError(f"symbol not serializable: {symbol!r}")
    return symbol


def _check_value(value):
    if '"' in value or "\n" in value or "\t" in value:
        raise TaFormatError(f"attribute value not serializable: {value!r}")
    return value


def emit_ta(g):
    """Serialize a fact graph: instances, then edges, then attributes."""
    doc = TaDocument.from_graph(g)
    lines = []
    for node_id, kind in doc.instances:
        lines.append(f"$INSTANCE {_check_symbol(node_id)} {_check_symbol(kind)}")
    for etype, src, dst in doc.edges:
        lines.append(f"{_check_symbol(etype)} {_check_symbol(src)} {_check_symbol(dst)}")
    for subject, pairs in doc.attrs:
        rendered = " ".join(f'{_check_symbol(k)} = "{_check_value(v)}"' for k, v in pairs)
        if subject[0] == "node":
            lines.append(f"{subject[1]} {{ {rendered} }}")
        else:
            etype, src, dst = subject[1]
            lines.append(f"({etype} {src} {dst}) {{ {rendered} }}")
    return "".join(line + "\n" for line in lines)


_ATTR_PAIR = re.compile(r'([^\s=]+)\s*=\s*"([^"]*)"')
_EDGE_SUBJECT = re.compile(r"^\(\s*(\S+)\s+(\S+)\s+(\S+)\s*\)$")


def parse_ta(text):
    """Parse a TA document, enforcing declare-before-use ordering."""
    doc = TaDocument()
    declared_nodes = set()
    declared_edges = set()
    seen_attr_keys = set()
    section = "instances"

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("$INSTANCE"):
            if section != "instances":
                raise TaFormatError("instance declared after edges or attributes", lineno)
            parts = line.split()
            if len(parts) != 3:
                raise TaFormatError("malformed $INSTANCE line", lineno)
            _, node_id, kind = parts
            if node_id in declared_nodes:
                raise TaFormatError(f"duplicate instance {node_id!r}", lineno)
            declared_nodes.add(node_id)
            doc.instances.append((node_id, kind))
        elif "{" in line:
            section = "attrs"
            brace = line.index("{")
            subject_text = line[:brace].strip()
            body = line[brace:]
            if not body.startswith("{") or not body.endswith("}"):
                raise TaFormatError("malformed attribute record", lineno)
            edge_match = _EDGE_SUBJECT.match(subject_text)
            if edge_match:
                edge = (edge_match.group(1), edge_match.group(2), edge_match.group(3))
                if edge not in declared_edges:
                    raise TaFormatError(f"attribute for undeclared edge {edge!r}", lineno)
                subject = ("edge", edge)
            else:
                if subject_text not in declared_nodes:
                    raise TaFormatError(
                        f"attribute for undeclared instance {subject_text!r}", lineno
                    )
                subject = ("node", subject_text)
            inner = body[1:-1].strip()
            pairs = _ATTR_PAIR.findall(inner)
            if not pairs or _ATTR_PAIR.sub("", inner).strip():
                raise TaFormatError("malformed attribute record", lineno)
            for key, _ in pairs:
                if (subject, key) in seen_attr_keys:
                    raise TaFormatError(
                        f"duplicate attribute {key!r} for {subject_text}", lineno
                    )
                seen_attr_keys.add((subject, key))
            doc.attrs.append((subject, [(k, v) for k, v in pairs]))
        else:
            if section == "attrs":
                raise TaFormatError("edge declared after attributes", lineno)
            section = "edges"
            parts = line.split()
            if len(parts) != 3:
                raise TaFormatError("malformed edge line", lineno)
            etype, src, dst = parts
            for endpoint in (src, dst):
                if endpoint not in declared_nodes:
                    raise TaFormatError(f"undeclared identifier {endpoint!r}", lineno)
            declared_edges.add((etype, src, dst))
            doc.edges.append((etype, src, dst))

    return doc


def ta2tsv(doc, outdir):
    """Write per-relation fact files, joining PCs onto their owning rows.

    Produces ``<edge-type>.facts`` with columns (src, dst, pc) and
    ``instance.facts`` with columns (id, type, pc); an empty pc column
    means the fact is present in every product.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    node_ids = {i for i, _ in doc.instances}
    edge_set = set(doc.edges)
    node_pc: dict[str, str] = {}
    edge_pc: dict[tuple[str, str, str], str] = {}
    for subject, pairs in doc.attrs:
        for key, value in pairs:
            if key != PC_KEY:
                continue
            if subject[0] == "node":
                node_id = subject[1]
                if node_id not in node_ids:
                    raise TaFormatError(f"dangling attribute for {node_id!r}")
                if node_id in node_pc:
                    raise TaFormatError(f"multiple PC attributes for {node_id!r}")
                node_pc[node_id] = value
            else:
                edge = subject[1]
                if edge not in edge_set:
                    raise TaFormatError(f"dangling attribute for edge {edge!r}")
                if edge in edge_pc:
                    raise TaFormatError(f"multiple PC attributes for edge {edge!r}")
                edge_pc[edge] = value

    written = []
    by_type: dict[str, list[tuple[str, str, str]]] = {}
    for etype, src, dst in doc.edges:
        by_type.setdefault(etype, []).append(
            (src, dst, edge_pc.get((etype, src, dst), ""))
        )
    for etype in sorted(by_type):
        path = outdir / f"{etype}.facts"
        with path.open("w") as fh:
            for src, dst, pc in sorted(by_type[etype]):
                fh.write(f"{src}\t{dst}\t{pc}\n")
        written.append(path)

    instance_path = outdir / "instance.facts"
    with instance_path.open("w") as fh:
        for node_id, kind in sorted(doc.instances):
            fh.write(f"{node_id}\t{kind}\t{node_pc.get(node_id, '')}\n")
    written.append(instance_path)
    return written
