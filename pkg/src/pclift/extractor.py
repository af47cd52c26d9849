"""Variability-aware fact extraction from linked mini-C programs.

Walks function bodies keeping a stack of feature predicates currently in
effect; every fact created under the stack is annotated with the
conjunction as its presence condition.  Conditions mixing feature and
non-feature variables contribute no predicate (the model stays a sound
over-approximation).
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from fnmatch import fnmatchcase
from pathlib import Path

from . import featexpr as fx
from . import minic as mc
from .factgraph import FactGraph

CONST_BOOL_GLOBAL = "const-bool-global"
ENUM_GLOBAL = "enum-global"
FEATURE_TYPES = (CONST_BOOL_GLOBAL, ENUM_GLOBAL)


class ExtractionConfigError(Exception):
    pass


@dataclass
class ExtractionConfig:
    feature_regex: str = r"^$"
    feature_types: set[str] = field(default_factory=lambda: set(FEATURE_TYPES))
    # ordered (glob, component) pairs; first match wins
    component_map: list[tuple[str, str]] = field(default_factory=list)

    def component_for(self, path):
        for pattern, component in self.component_map:
            if fnmatchcase(path, pattern):
                return component
        return None


def load_extraction_config(path):
    """INI file with an [extraction] section and a [components] section.

    [extraction] holds ``feature_regex`` and comma-separated
    ``feature_types``; [components] maps file globs to component names.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str  # globs and component names are case-sensitive
    read = parser.read(path)
    if not read:
        raise ExtractionConfigError(f"cannot read extraction config: {path}")
    if "extraction" not in parser:
        raise ExtractionConfigError("missing [extraction] section")
    section = parser["extraction"]
    regex = section.get("feature_regex", r"^$")
    try:
        re.compile(regex)
    except re.error as exc:
        raise ExtractionConfigError(f"bad feature_regex: {exc}") from exc
    types_raw = section.get("feature_types", ", ".join(FEATURE_TYPES))
    types = {t.strip() for t in types_raw.split(",") if t.strip()}
    unknown = types - set(FEATURE_TYPES)
    if unknown:
        raise ExtractionConfigError(f"unknown feature types: {sorted(unknown)}")
    component_map = []
    if "components" in parser:
        component_map = list(parser["components"].items())
    return ExtractionConfig(regex, types, component_map)


# --------------------------------------------------------------------------
# Feature recognition


@dataclass
class FeatureEnv:
    """Which globals are feature variables, and the features they yield."""

    bool_vars: dict[str, fx.Feature] = field(default_factory=dict)
    enum_vars: dict[str, str] = field(default_factory=dict)  # var -> enum type
    literal_features: dict[str, fx.Feature] = field(default_factory=dict)
    features: list[fx.Feature] = field(default_factory=list)

    def is_feature_var(self, name):
        return name in self.bool_vars or name in self.enum_vars


def recognize_features(program, cfg, registry):
    """Register features for globals selected by type and naming convention.

    Bool globals matching the regex become features themselves; enum-typed
    globals matching it register every literal of their enum type.
    Comparison abstractions are registered on demand during extraction.
    """
    env = FeatureEnv()
    pattern = re.compile(cfg.feature_regex)
    seen = set()
    for unit in program.units:
        for item in unit.items:
            if not isinstance(item, mc.VarDecl) or item.name in seen:
                continue
            seen.add(item.name)
            if not pattern.search(item.name):
                continue
            if item.type.is_enum and ENUM_GLOBAL in cfg.feature_types:
                enum_entry = program.enums.get(item.type.name)
                if enum_entry is None:
                    continue
                env.enum_vars[item.name] = item.type.name
                _, enum_decl = enum_entry
                for literal in enum_decl.members:
                    feature = registry.register(literal, fx.ENUM_LITERAL)
                    if literal not in env.literal_features:
                        env.literal_features[literal] = feature
                        env.features.append(feature)
            elif item.type.name == "bool" and CONST_BOOL_GLOBAL in cfg.feature_types:
                feature = registry.register(item.name, fx.DECLARED)
                env.bool_vars[item.name] = feature
                env.features.append(feature)
    return env


def classify_condition(expr, env, registry, shadowed=frozenset()):
    """FeatureExpr for a condition entirely over feature variables, else None.

    ``shadowed`` holds names bound by enclosing locals/params/fields, which
    hide same-named feature globals.
    """

    def enum_var(e):
        return (
            isinstance(e, mc.Name)
            and e.name not in shadowed
            and e.name in env.enum_vars
        )

    def enum_rhs(e):
        if isinstance(e, mc.IntLit):
            return str(e.value)
        if isinstance(e, mc.Name) and e.name in env.literal_features:
            return e.name
        return None

    _FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}

    def go(e):
        if isinstance(e, mc.BoolLit):
            return fx.TRUE_EXPR if e.value else fx.FALSE_EXPR
        if isinstance(e, mc.Name):
            if e.name in shadowed:
                return None
            feature = env.bool_vars.get(e.name)
            return fx.Var(feature) if feature is not None else None
        if isinstance(e, mc.Unary) and e.op == "!":
            inner = go(e.operand)
            return fx.Not(inner) if inner is not None else None
        if isinstance(e, mc.Binary):
            if e.op == "&&":
                left, right = go(e.left), go(e.right)
                if left is not None and right is not None:
                    return fx.And(left, right)
                return None
            if e.op == "||":
                left, right = go(e.left), go(e.right)
                if left is not None and right is not None:
                    return fx.Or(left, right)
                return None
            if e.op in ("==", "!=") and isinstance(e.right, mc.BoolLit):
                inner = go(e.left)
                if inner is None:
                    return None
                want = e.right.value if e.op == "==" else not e.right.value
                return inner if want else fx.Not(inner)
            if e.op in ("==", "!=") and isinstance(e.left, mc.BoolLit):
                inner = go(e.right)
                if inner is None:
                    return None
                want = e.left.value if e.op == "==" else not e.left.value
                return inner if want else fx.Not(inner)
            if e.op in ("<", "<=", ">", ">=", "==", "!="):
                if enum_var(e.left):
                    rhs = enum_rhs(e.right)
                    if rhs is not None:
                        return fx.Var(
                            fx.abstract_comparison(registry, e.left.name, e.op, rhs)
                        )
                if enum_var(e.right):
                    lhs = enum_rhs(e.left)
                    if lhs is not None:
                        return fx.Var(
                            fx.abstract_comparison(
                                registry, e.right.name, _FLIP[e.op], lhs
                            )
                        )
                return None
            return None
        return None

    return go(expr)


# --------------------------------------------------------------------------
# Extraction


class _Walker:
    def __init__(self, program, cfg, store, env):
        self.program = program
        self.cfg = cfg
        self.store = store
        self.env = env
        self.nodes: dict[str, str] = {}
        self.node_pc: dict[str, object] = {}
        self.edge_pc: dict[tuple[str, str, str], object] = {}
        self.pc_stack: list[object] = [store.true]
        self.influence_stack: list[tuple[str, ...]] = []
        self.locals_stack: list[dict[str, str]] = []
        self.class_fields: dict[str, str] = {}
        self.func_entity: str | None = None

    # -- fact emission

    @property
    def pc(self):
        return self.pc_stack[-1]

    def emit_node(self, node_id, kind):
        self.nodes[node_id] = kind
        existing = self.node_pc.get(node_id)
        self.node_pc[node_id] = self.pc if existing is None else existing | self.pc

    def emit_edge(self, etype, src, dst):
        key = (etype, src, dst)
        existing = self.edge_pc.get(key)
        self.edge_pc[key] = self.pc if existing is None else existing | self.pc

    def finish(self):
        g = FactGraph()
        for node_id, kind in self.nodes.items():
            pc = self.node_pc[node_id]
            if pc.is_false:
                continue
            g.add_node(node_id, kind)
            if not pc.is_true:
                g.set_node_pc_text(node_id, fx.render_pc(pc))
        for (etype, src, dst), pc in self.edge_pc.items():
            if pc.is_false:
                continue
            g.add_edge(etype, src, dst)
            if not pc.is_true:
                g.set_edge_pc_text((etype, src, dst), fx.render_pc(pc))
        return g

    # -- resolution

    def shadowed_names(self):
        names = set(self.class_fields)
        for frame in self.locals_stack:
            names.update(frame)
        return names

    def resolve_var(self, name):
        """Entity id for a non-feature variable use, or None."""
        for frame in reversed(self.locals_stack):
            if name in frame:
                return frame[name]
        if name in self.class_fields:
            return self.class_fields[name]
        if self.env.is_feature_var(name):
            return None
        if name in self.program.global_defs:
            return self.program.global_entity_id(name)
        return None

    # -- units and declarations

    def walk_program(self):
        for unit in self.program.units:
            self.walk_unit(unit)

    def walk_unit(self, unit):
        component = self.cfg.component_for(unit.path)
        self.unit = unit
        self.component = component
        file_id = unit.path
        self.emit_node(file_id, "FILE")
        if component is not None:
            self.emit_node(component, "COMPONENT")
            self.emit_edge("contain", component, file_id)
        for item in unit.items:
            if isinstance(item, mc.VarDecl):
                self.walk_global_var(item, file_id)
            elif isinstance(item, mc.FuncDef):
                self.walk_function(item, file_id, container_id=file_id)
            elif isinstance(item, mc.ClassDecl):
                self.walk_class(item, file_id)
            # enum declarations introduce no nodes

    def walk_global_var(self, decl, file_id):
        if self.env.is_feature_var(decl.name):
            return
        owner_path, owner_decl = self.program.global_defs[decl.name]
        if owner_decl is not decl:
            return  # emitted by the defining unit
        entity = f"{owner_path}#{decl.name}"
        self.emit_node(entity, "VARIABLE")
        self.emit_edge("contain", file_id, entity)
        if decl.init is not None:
            read = self.walk_expr(decl.init)
            for v in read:
                self.emit_edge("varWrite", v, entity)

    def walk_class(self, decl, file_id):
        class_id = f"{self.unit.path}#{decl.name}"
        self.emit_node(class_id, "CLASS")
        self.emit_edge("contain", file_id, class_id)
        fields = {}
        for member in decl.members:
            if isinstance(member, mc.VarDecl):
                entity = f"{class_id}#{member.name}"
                fields[member.name] = entity
                self.emit_node(entity, "VARIABLE")
                self.emit_edge("contain", class_id, entity)
        self.class_fields = fields
        for member in decl.members:
            if isinstance(member, mc.VarDecl):
                if member.init is not None:
                    for v in self.walk_expr(member.init):
                        self.emit_edge("varWrite", v, fields[member.name])
            else:
                self.walk_function(member, file_id, container_id=class_id)
        self.class_fields = {}

    def walk_function(self, func, file_id, container_id):
        entity = f"{container_id}#{func.name}"
        self.emit_node(entity, "FUNCTION")
        self.emit_edge("contain", container_id, entity)
        if self.component is not None:
            self.emit_edge("cFunction", entity, self.component)
        frame = {}
        for param in func.params:
            param_id = f"{entity}#{param.name}"
            frame[param.name] = param_id
            self.emit_node(param_id, "VARIABLE")
            self.emit_edge("contain", entity, param_id)
        self.func_entity = entity
        self.locals_stack = [frame]
        self.walk_stmt(func.body)
        self.locals_stack = []
        self.func_entity = None

    # -- statements

    def walk_stmt(self, stmt):
        if isinstance(stmt, mc.Block):
            self.locals_stack.append({})
            for inner in stmt.stmts:
                self.walk_stmt(inner)
            self.locals_stack.pop()
        elif isinstance(stmt, mc.DeclStmt):
            self.walk_local_decl(stmt.decl)
        elif isinstance(stmt, mc.AssignStmt):
            self.walk_assign(stmt)
        elif isinstance(stmt, mc.ExprStmt):
            self.walk_expr(stmt.expr)
        elif isinstance(stmt, mc.Return):
            if stmt.value is not None:
                self.walk_expr(stmt.value)
        elif isinstance(stmt, mc.If):
            self.walk_if(stmt)
        elif isinstance(stmt, mc.While):
            self.walk_loop(stmt.cond, [stmt.body])
        elif isinstance(stmt, mc.For):
            self.locals_stack.append({})
            if stmt.init is not None:
                self.walk_stmt(stmt.init)
            guarded = [s for s in (stmt.body, stmt.step) if s is not None]
            self.walk_loop(stmt.cond, guarded)
            self.locals_stack.pop()
        elif isinstance(stmt, mc.Switch):
            self.walk_switch(stmt)
        # Break/Continue carry no facts

    def walk_local_decl(self, decl):
        entity = f"{self.func_entity}#{decl.name}"
        self.locals_stack[-1][decl.name] = entity
        self.emit_node(entity, "VARIABLE")
        self.emit_edge("contain", self.func_entity, entity)
        if decl.init is not None:
            read = self.walk_expr(decl.init)
            self.emit_edge("write", self.func_entity, entity)
            for v in read:
                self.emit_edge("varWrite", v, entity)

    def walk_assign(self, stmt):
        read = self.walk_expr(stmt.value)
        target = self.resolve_var(stmt.target.name)
        if target is None:
            return  # assignment to a feature variable yields no facts
        self.emit_edge("write", self.func_entity, target)
        for v in read:
            self.emit_edge("varWrite", v, target)
        if stmt.op != "=":
            self.emit_edge("varWrite", target, target)

    def walk_if(self, stmt):
        feature = classify_condition(
            stmt.cond, self.env, self.store.registry, self.shadowed_names()
        )
        if feature is not None:
            pc = self.store.to_pc(feature)
            self.pc_stack.append(self.pc & pc)
            self.walk_stmt(stmt.then)
            self.pc_stack.pop()
            if stmt.els is not None:
                self.pc_stack.append(self.pc & ~pc)
                self.walk_stmt(stmt.els)
                self.pc_stack.pop()
            return
        cond_vars = self.walk_expr(stmt.cond)
        self.push_influence(cond_vars)
        self.walk_stmt(stmt.then)
        if stmt.els is not None:
            self.walk_stmt(stmt.els)
        self.pop_influence(cond_vars)

    def walk_loop(self, cond, guarded_stmts):
        """Shared for while/for: loop conditions behave like if for PCs."""
        feature = None
        cond_vars = []
        if cond is not None:
            feature = classify_condition(
                cond, self.env, self.store.registry, self.shadowed_names()
            )
            if feature is None:
                cond_vars = self.walk_expr(cond)
        if feature is not None:
            self.pc_stack.append(self.pc & self.store.to_pc(feature))
        self.push_influence(cond_vars)
        for stmt in guarded_stmts:
            self.walk_stmt(stmt)
        self.pop_influence(cond_vars)
        if feature is not None:
            self.pc_stack.pop()

    def walk_switch(self, stmt):
        subject = stmt.subject
        shadowed = self.shadowed_names()
        is_feature_enum = (
            isinstance(subject, mc.Name)
            and subject.name not in shadowed
            and subject.name in self.env.enum_vars
        )
        if is_feature_enum:
            case_exprs = []
            for case in stmt.cases:
                if case.label is None:
                    continue
                label = self.case_label_text(case.label)
                case_exprs.append(
                    fx.Var(
                        fx.abstract_comparison(
                            self.store.registry, subject.name, "==", label
                        )
                    )
                )
            label_iter = iter(case_exprs)
            for case in stmt.cases:
                if case.label is None:
                    guard = fx.TRUE_EXPR
                    for expr in case_exprs:
                        guard = fx.And(guard, fx.Not(expr))
                else:
                    guard = next(label_iter)
                self.pc_stack.append(self.pc & self.store.to_pc(guard))
                for inner in case.stmts:
                    self.walk_stmt(inner)
                self.pc_stack.pop()
            return
        cond_vars = self.walk_expr(subject)
        self.push_influence(cond_vars)
        for case in stmt.cases:
            for inner in case.stmts:
                self.walk_stmt(inner)
        self.pop_influence(cond_vars)

    def case_label_text(self, label):
        if isinstance(label, mc.IntLit):
            return str(label.value)
        if isinstance(label, mc.Name):
            return label.name
        raise mc.MiniCError("switch case labels must be literals")

    def push_influence(self, cond_vars):
        if cond_vars:
            self.influence_stack.append(tuple(cond_vars))

    def pop_influence(self, cond_vars):
        if cond_vars:
            self.influence_stack.pop()

    # -- expressions

    def walk_expr(self, expr):
        """Emit call/increment facts inside ``expr``; return variables read."""
        read: list[str] = []
        seen = set()

        def note(entity):
            if entity not in seen:
                seen.add(entity)
                read.append(entity)

        def go(e):
            if isinstance(e, mc.Name):
                entity = self.resolve_var(e.name)
                if entity is not None:
                    note(entity)
            elif isinstance(e, (mc.Unary, mc.Postfix)):
                if e.op in ("++", "--") and isinstance(e.operand, mc.Name):
                    entity = self.resolve_var(e.operand.name)
                    if entity is not None:
                        note(entity)
                        if self.func_entity is not None:
                            self.emit_edge("write", self.func_entity, entity)
                        self.emit_edge("varWrite", entity, entity)
                else:
                    go(e.operand)
            elif isinstance(e, mc.Binary):
                go(e.left)
                go(e.right)
            elif isinstance(e, mc.Call):
                self.emit_call(e, note_read=note, walk_arg=go)

        go(expr)
        return read

    def emit_call(self, call, note_read, walk_arg):
        name = call.callee.name
        entry = self.program.functions.get(name)
        for arg in call.args:
            walk_arg(arg)
        if entry is None:
            return  # not a known function; nothing to relate
        callee_id = self.program.function_entity_id(name)
        if self.func_entity is not None:
            self.emit_edge("call", self.func_entity, callee_id)
        # argument dataflow binds onto the callee's parameter variables
        _, _, func = entry
        for arg, param in zip(call.args, func.params):
            arg_vars = self.collect_vars(arg)
            param_id = f"{callee_id}#{param.name}"
            for v in arg_vars:
                self.emit_edge("varWrite", v, param_id)
        # the call is influenced by every enclosing non-feature condition
        for cond_vars in self.influence_stack:
            for v in cond_vars:
                self.emit_edge("varInfFunc", v, callee_id)

    def collect_vars(self, expr):
        """Variables read in ``expr`` without re-emitting facts."""
        out: list[str] = []
        seen = set()

        def go(e):
            if isinstance(e, mc.Name):
                entity = self.resolve_var(e.name)
                if entity is not None and entity not in seen:
                    seen.add(entity)
                    out.append(entity)
            elif isinstance(e, (mc.Unary, mc.Postfix)):
                go(e.operand)
            elif isinstance(e, mc.Binary):
                go(e.left)
                go(e.right)
            elif isinstance(e, mc.Call):
                for arg in e.args:
                    go(arg)

        go(expr)
        return out


def extract(program, cfg, store, env=None):
    """Extract the annotated fact graph for a linked program.

    Features must already be registered in ``store.registry`` via
    :func:`recognize_features`; pass its result as ``env`` (or leave None
    to recognize here).
    """
    if env is None:
        env = recognize_features(program, cfg, store.registry)
    walker = _Walker(program, cfg, store, env)
    walker.walk_program()
    return walker.finish()


def extract_sources(sources, cfg, store):
    """Convenience: parse, link, and extract ``{path: text}`` sources."""
    units = [mc.parse_mini_c(text, path) for path, text in sorted(sources.items())]
    program = mc.link(units)
    return extract(program, cfg, store)


def extract_dir(src_dir, cfg, store):
    """Extract every .c/.cpp/.cc/.h file under ``src_dir`` (sorted paths)."""
    src_dir = Path(src_dir)
    sources = {}
    for path in sorted(src_dir.rglob("*")):
        if path.suffix in (".c", ".cpp", ".cc", ".h") and path.is_file():
            sources[path.relative_to(src_dir).as_posix()] = path.read_text()
    return extract_sources(sources, cfg, store)
