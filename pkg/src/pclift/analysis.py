"""Behaviour-alteration analysis assets and component-graph aggregation.

The shipped rules detect cross-component data flows from a variable
assignment to a control condition guarding a function call; results are
grouped per component pair, each edge labelled with the disjunction of
its witnesses' presence conditions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import featexpr as fx
from .datalog import parse_program

BEHAVIOUR_ALTERATION_RULES = """\
.decl write(f: symbol, v: symbol)
.input write
.decl varWrite(v0: symbol, v1: symbol)
.input varWrite
.decl varInfFunc(v: symbol, f: symbol)
.input varInfFunc
.decl cFunction(f: symbol, c: symbol)
.input cFunction

.decl transVarWrite(v0: symbol, v1: symbol)
.output transVarWrite
.decl behAlter(f0: symbol, f1: symbol)
.output behAlter

transVarWrite(v0, v1) :- varWrite(v0, v1).
transVarWrite(v0, v2) :- varWrite(v0, v1), transVarWrite(v1, v2).

behAlter(f0, f1) :- write(f0, v0),
                    transVarWrite(v0, v1),
                    varInfFunc(v1, f1),
                    cFunction(f0, c0),
                    cFunction(f1, c1),
                    c0 != c1.
"""

INPUT_RELATIONS = ("write", "varWrite", "varInfFunc", "cFunction")


@dataclass
class AnalysisBundle:
    program_text: str
    input_relations: tuple[str, ...]

    def parse(self):
        return parse_program(self.program_text)


def behaviour_alteration_program():
    return AnalysisBundle(BEHAVIOUR_ALTERATION_RULES, INPUT_RELATIONS)


class ComponentGraphError(Exception):
    pass


@dataclass
class Witness:
    source_function: str
    target_function: str
    pc: fx.PresenceCondition


@dataclass
class ComponentEdge:
    id: str
    src: str
    dst: str
    pc: fx.PresenceCondition
    witnesses: list[Witness] = field(default_factory=list)


@dataclass
class ComponentGraph:
    nodes: list[str]
    edges: list[ComponentEdge]
    features: list[str]


def build_component_graph(behalter, cfunction, store):
    """Aggregate behaviour-alteration tuples onto component pairs.

    ``behalter`` and ``cfunction`` map tuples to presence conditions (the
    relations' stored form).  Every function mentioned must belong to
    exactly one component.
    """
    component_of: dict[str, str] = {}
    components = set()
    for (function, component), _ in cfunction.items():
        components.add(component)
        existing = component_of.get(function)
        if existing is not None and existing != component:
            raise ComponentGraphError(
                f"function {function!r} belongs to components"
                f" {existing!r} and {component!r}"
            )
        component_of[function] = component

    grouped: dict[tuple[str, str], list[Witness]] = {}
    for (f0, f1), pc in behalter.items():
        for function in (f0, f1):
            if function not in component_of:
                raise ComponentGraphError(
                    f"function {function!r} has no component assignment"
                )
        key = (component_of[f0], component_of[f1])
        if key[0] == key[1]:
            raise ComponentGraphError(
                f"intra-component result {f0!r} -> {f1!r} in {key[0]!r}"
            )
        grouped.setdefault(key, []).append(Witness(f0, f1, pc))

    edges = []
    for (src, dst) in sorted(grouped):
        witnesses = sorted(
            grouped[(src, dst)], key=lambda w: (w.source_function, w.target_function)
        )
        pc = store.false
        for witness in witnesses:
            pc = pc | witness.pc
        edges.append(ComponentEdge(f"{src}->{dst}", src, dst, pc, witnesses))

    return ComponentGraph(
        nodes=sorted(components),
        edges=edges,
        features=list(store.registry.names()),
    )


def export_graph_json(graph):
    """Stable JSON document for the service and the UI."""
    doc = {
        "features": sorted(graph.features),
        "nodes": list(graph.nodes),
        "edges": [
            {
                "id": edge.id,
                "src": edge.src,
                "dst": edge.dst,
                "pc": fx.render_pc(edge.pc),
                "witnesses": [
                    {
                        "from": w.source_function,
                        "to": w.target_function,
                        "pc": fx.render_pc(w.pc),
                    }
                    for w in edge.witnesses
                ],
            }
            for edge in graph.edges
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
