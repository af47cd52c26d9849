"""Feature expressions, canonical presence conditions, and feature models.

Presence conditions are stored as reduced ordered binary decision diagrams
in a :class:`PcStore`; hash-consing makes handle equality coincide with
logical equivalence, so equivalence checks are pointer comparisons.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path


class FeatureExprError(Exception):
    """Base class for feature-expression problems."""


class FeatureExprSyntaxError(FeatureExprError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFeatureError(FeatureExprError):
    def __init__(self, name):
        super().__init__(f"unknown feature: {name!r}")
        self.name = name


class FeatureModelError(FeatureExprError):
    pass


# Feature origins.
DECLARED = "declared-boolean"
ENUM_LITERAL = "enum-literal"
ABSTRACTED = "abstracted-comparison"

_COMPARISON_TAGS = {
    "<": "LT",
    "<=": "LE",
    ">": "GT",
    ">=": "GE",
    "==": "EQ",
    "!=": "NE",
}


@dataclass(frozen=True)
class Feature:
    name: str
    origin: str = DECLARED

    def __post_init__(self):
        if not self.name:
            raise ValueError("feature name must be non-empty")


class FeatureRegistry:
    """Ordered set of features; registration order fixes the BDD variable order."""

    def __init__(self, open_registry=True):
        self._features: dict[str, Feature] = {}
        self._order: list[str] = []
        self.open = open_registry

    def register(self, name, origin=DECLARED):
        existing = self._features.get(name)
        if existing is not None:
            return existing
        feature = Feature(name, origin)
        self._features[name] = feature
        self._order.append(name)
        return feature

    def lookup(self, name):
        return self._features.get(name)

    def __contains__(self, name):
        return name in self._features

    def __len__(self):
        return len(self._features)

    def __iter__(self):
        return iter(self._features.values())

    def names(self):
        return self._order

    def name_at(self, index):
        return self._order[index]

    def index_of(self, name):
        try:
            return self._order.index(name)
        except ValueError:
            raise UnknownFeatureError(name) from None


def abstract_comparison(registry, lhs, op, rhs):
    """Turn a comparison on an enum-typed feature variable into a feature.

    ``(x, <, Feat2)`` becomes the feature ``x_LT_Feat2``.  Idempotent: the
    same inputs always yield the same registered feature.
    """
    tag = _COMPARISON_TAGS.get(op)
    if tag is None:
        raise ValueError(f"unsupported comparison operator: {op!r}")
    return registry.register(f"{lhs}_{tag}_{rhs}", ABSTRACTED)


# --------------------------------------------------------------------------
# Expression AST


@dataclass(frozen=True)
class FeatureExpr:
    pass


@dataclass(frozen=True)
class Var(FeatureExpr):
    feature: Feature


@dataclass(frozen=True)
class Not(FeatureExpr):
    operand: FeatureExpr


@dataclass(frozen=True)
class And(FeatureExpr):
    left: FeatureExpr
    right: FeatureExpr


@dataclass(frozen=True)
class Or(FeatureExpr):
    left: FeatureExpr
    right: FeatureExpr


@dataclass(frozen=True)
class Const(FeatureExpr):
    value: bool


TRUE_EXPR = Const(True)
FALSE_EXPR = Const(False)


def var(feature):
    return Var(feature)


def evaluate(expr, rho):
    """Evaluate ``expr`` under a total configuration ``rho``."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return rho[expr.feature.name]
    if isinstance(expr, Not):
        return not evaluate(expr.operand, rho)
    if isinstance(expr, And):
        return evaluate(expr.left, rho) and evaluate(expr.right, rho)
    if isinstance(expr, Or):
        return evaluate(expr.left, rho) or evaluate(expr.right, rho)
    raise TypeError(f"not a feature expression: {expr!r}")


def expr_features(expr):
    """All features mentioned in ``expr``, in first-occurrence order."""
    out: dict[str, Feature] = {}

    def walk(e):
        if isinstance(e, Var):
            out.setdefault(e.feature.name, e.feature)
        elif isinstance(e, Not):
            walk(e.operand)
        elif isinstance(e, (And, Or)):
            walk(e.left)
            walk(e.right)

    walk(expr)
    return list(out.values())


def render_expr(expr):
    """Concrete syntax for ``expr`` in the `! & |` grammar."""

    def prec(e):
        if isinstance(e, Or):
            return 1
        if isinstance(e, And):
            return 2
        return 3

    def go(e):
        if isinstance(e, Const):
            return "true" if e.value else "false"
        if isinstance(e, Var):
            return e.feature.name
        if isinstance(e, Not):
            inner = go(e.operand)
            if prec(e.operand) < 3:
                inner = f"({inner})"
            return f"!{inner}"
        if isinstance(e, And):
            parts = []
            for side in (e.left, e.right):
                s = go(side)
                if prec(side) < 2:
                    s = f"({s})"
                parts.append(s)
            return " & ".join(parts)
        if isinstance(e, Or):
            return f"{go(e.left)} | {go(e.right)}"
        raise TypeError(f"not a feature expression: {e!r}")

    return go(expr)


# --------------------------------------------------------------------------
# Parser

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _ExprParser:
    def __init__(self, text, registry):
        self.text = text
        self.pos = 0
        self.registry = registry

    def error(self, message):
        raise FeatureExprSyntaxError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        expr = self.parse_or()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")
        return expr

    def parse_or(self):
        expr = self.parse_and()
        while self.peek() == "|":
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] == "|":
                self.pos += 1
            expr = Or(expr, self.parse_and())
        return expr

    def parse_and(self):
        expr = self.parse_factor()
        while self.peek() == "&":
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] == "&":
                self.pos += 1
            expr = And(expr, self.parse_factor())
        return expr

    def parse_factor(self):
        ch = self.peek()
        if ch == "!":
            self.pos += 1
            return Not(self.parse_factor())
        if ch == "(":
            self.pos += 1
            expr = self.parse_or()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return expr
        match = _IDENT.match(self.text, self.pos)
        if not match:
            self.error("expected identifier, 'true', 'false', '!' or '('")
        name = match.group()
        self.pos = match.end()
        if name == "true":
            return TRUE_EXPR
        if name == "false":
            return FALSE_EXPR
        feature = self.registry.lookup(name)
        if feature is None:
            if not self.registry.open:
                raise UnknownFeatureError(name)
            feature = self.registry.register(name)
        return Var(feature)


def parse_feature_expr(text, registry):
    """Parse `expr := term ('|' term)* ; term := factor ('&' factor)*`.

    Unknown identifiers auto-register when the registry is open and raise
    :class:`UnknownFeatureError` when it is closed.  `&&`/`||` are accepted
    as synonyms for `&`/`|`.
    """
    return _ExprParser(text, registry).parse()


# --------------------------------------------------------------------------
# BDD store

_FALSE = 0
_TRUE = 1
_TERMINAL_LEVEL = 1 << 30


class PcStore:
    """Hash-consed reduced ordered BDD store over a feature registry.

    Variable order is feature registration order; there is no dynamic
    reordering.  Single writer during construction; established handles
    are safe for concurrent readers.
    """

    def __init__(self, registry=None):
        self.registry = registry if registry is not None else FeatureRegistry()
        # node id -> (level, lo, hi); entries 0/1 are the terminals.
        self._nodes = [(_TERMINAL_LEVEL, 0, 0), (_TERMINAL_LEVEL, 1, 1)]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._and_cache: dict[tuple[int, int], int] = {}
        self._or_cache: dict[tuple[int, int], int] = {}
        self._not_cache: dict[int, int] = {}
        self._levels: dict[str, int] = {}
        self.false = PresenceCondition(self, _FALSE)
        self.true = PresenceCondition(self, _TRUE)

    def node_count(self):
        return len(self._nodes)

    def _level(self, feature_name):
        level = self._levels.get(feature_name)
        if level is None:
            if feature_name not in self.registry:
                raise UnknownFeatureError(feature_name)
            level = self._levels[feature_name] = self.registry.index_of(feature_name)
        return level

    def _feature_at(self, level):
        return self.registry.name_at(level)

    def _mk(self, level, lo, hi):
        if lo == hi:
            return lo
        key = (level, lo, hi)
        node = self._unique.get(key)
        if node is None:
            node = len(self._nodes)
            self._nodes.append(key)
            self._unique[key] = node
        return node

    def _var(self, feature_name):
        return self._mk(self._level(feature_name), _FALSE, _TRUE)

    def _and(self, a, b):
        if a == b:
            return a
        if a == _FALSE or b == _FALSE:
            return _FALSE
        if a == _TRUE:
            return b
        if b == _TRUE:
            return a
        key = (a, b) if a <= b else (b, a)
        cached = self._and_cache.get(key)
        if cached is not None:
            return cached
        result = self._apply(self._and, a, b)
        self._and_cache[key] = result
        return result

    def _or(self, a, b):
        if a == b:
            return a
        if a == _TRUE or b == _TRUE:
            return _TRUE
        if a == _FALSE:
            return b
        if b == _FALSE:
            return a
        key = (a, b) if a <= b else (b, a)
        cached = self._or_cache.get(key)
        if cached is not None:
            return cached
        result = self._apply(self._or, a, b)
        self._or_cache[key] = result
        return result

    def _apply(self, op, a, b):
        nodes = self._nodes
        la, lo_a, hi_a = nodes[a]
        lb, lo_b, hi_b = nodes[b]
        level = min(la, lb)
        if la != level:
            lo_a = hi_a = a
        if lb != level:
            lo_b = hi_b = b
        return self._mk(level, op(lo_a, lo_b), op(hi_a, hi_b))

    def _not(self, a):
        if a == _FALSE:
            return _TRUE
        if a == _TRUE:
            return _FALSE
        cached = self._not_cache.get(a)
        if cached is not None:
            return cached
        level, lo, hi = self._nodes[a]
        result = self._mk(level, self._not(lo), self._not(hi))
        self._not_cache[a] = result
        return result

    def _wrap(self, node):
        if node == _FALSE:
            return self.false
        if node == _TRUE:
            return self.true
        return PresenceCondition(self, node)

    def pc_var(self, feature):
        name = feature.name if isinstance(feature, Feature) else feature
        return self._wrap(self._var(name))

    def to_pc(self, expr):
        """Intern ``expr`` as a canonical presence condition."""
        if isinstance(expr, Const):
            return self.true if expr.value else self.false
        if isinstance(expr, Var):
            return self.pc_var(expr.feature)
        if isinstance(expr, Not):
            return self._wrap(self._not(self.to_pc(expr.operand).node))
        if isinstance(expr, And):
            left = self.to_pc(expr.left).node
            if left == _FALSE:
                return self.false
            return self._wrap(self._and(left, self.to_pc(expr.right).node))
        if isinstance(expr, Or):
            left = self.to_pc(expr.left).node
            if left == _TRUE:
                return self.true
            return self._wrap(self._or(left, self.to_pc(expr.right).node))
        raise TypeError(f"not a feature expression: {expr!r}")

    def parse_pc(self, text):
        return self.to_pc(parse_feature_expr(text, self.registry))

    # -- queries ----------------------------------------------------------

    def evaluate_node(self, node, rho):
        names = self.registry.names()
        nodes = self._nodes
        while node > _TRUE:
            level, lo, hi = nodes[node]
            node = hi if rho[names[level]] else lo
        return node == _TRUE

    def cubes(self, node):
        """DNF cover of ``node``: one (feature, polarity) cube per BDD path."""
        names = self.registry.names()
        out = []

        def walk(n, prefix):
            if n == _FALSE:
                return
            if n == _TRUE:
                out.append(list(prefix))
                return
            level, lo, hi = self._nodes[n]
            name = names[level]
            prefix.append((name, False))
            walk(lo, prefix)
            prefix.pop()
            prefix.append((name, True))
            walk(hi, prefix)
            prefix.pop()

        walk(node, [])
        return out


class PresenceCondition:
    """Canonical handle into a :class:`PcStore`.

    Two handles from the same store compare equal exactly when their boolean
    functions are equal.
    """

    __slots__ = ("store", "node")

    def __init__(self, store, node):
        self.store = store
        self.node = node

    def __eq__(self, other):
        return (
            isinstance(other, PresenceCondition)
            and self.store is other.store
            and self.node == other.node
        )

    def __hash__(self):
        return hash(self.node)

    def __repr__(self):
        return f"<pc {render_pc(self)}>"

    def __and__(self, other):
        return self.store._wrap(self.store._and(self.node, other.node))

    def __or__(self, other):
        return self.store._wrap(self.store._or(self.node, other.node))

    def __invert__(self):
        return self.store._wrap(self.store._not(self.node))

    @property
    def is_true(self):
        return self.node == _TRUE

    @property
    def is_false(self):
        return self.node == _FALSE

    def evaluate(self, rho):
        return self.store.evaluate_node(self.node, rho)


def pc_and(a, b):
    return a & b


def pc_or(a, b):
    return a | b


def pc_not(a):
    return ~a


def is_sat(pc):
    return not pc.is_false


def implies(a, b):
    """a implies b, i.e. a AND NOT b is unsatisfiable."""
    store = a.store
    return store._and(a.node, store._not(b.node)) == _FALSE


def render_pc(pc):
    """Render a presence condition back into the expression grammar.

    The output is a disjunction of cubes taken from the diagram's paths,
    with redundant literals widened away, so re-parsing yields an
    equivalent (usually identical) handle.
    """
    if pc.is_true:
        return "true"
    if pc.is_false:
        return "false"
    store = pc.store
    cubes = store.cubes(pc.node)

    def cube_node(cube):
        node = _TRUE
        for name, positive in cube:
            v = store._var(name)
            node = store._and(node, v if positive else store._not(v))
        return node

    # Widen each cube: drop literals whose removal keeps the cube inside pc.
    widened = []
    for cube in cubes:
        cube = list(cube)
        for lit in list(cube):
            trial = [l for l in cube if l is not lit]
            if store._and(cube_node(trial), store._not(pc.node)) == _FALSE:
                cube = trial
        widened.append(cube)

    # Greedy cover: keep only cubes that add products.
    widened.sort(key=lambda c: (len(c), c))
    acc = _FALSE
    kept = []
    for cube in widened:
        node = cube_node(cube)
        if store._and(node, store._not(acc)) != _FALSE:
            kept.append(cube)
            acc = store._or(acc, node)
    assert acc == pc.node

    def render_cube(cube):
        return " & ".join(name if pos else f"!{name}" for name, pos in cube)

    return " | ".join(render_cube(c) for c in kept)


def count_unique_pcs(pcs):
    """Distinct handles among ``pcs``, not counting constant-true."""
    return len({pc.node for pc in pcs if not pc.is_true})


# --------------------------------------------------------------------------
# Configurations and feature models


def all_configurations(feature_names):
    """Every total assignment over ``feature_names`` (2^n of them)."""
    names = list(feature_names)
    for mask in range(1 << len(names)):
        yield {name: bool(mask >> i & 1) for i, name in enumerate(names)}


def config_from_present(feature_names, present):
    present = set(present)
    return {name: name in present for name in feature_names}


def enum_group_constraints(members, mandatory=False):
    """Mutual-exclusion constraints for a group of features.

    Returns one pairwise constraint ``!(Fi & Fj)`` per pair, plus the
    disjunction of all members when the group is mandatory.
    """
    members = list(members)
    if len(members) < 2:
        raise ValueError("enum group needs at least two members")
    constraints: list[FeatureExpr] = []
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            constraints.append(Not(And(Var(a), Var(b))))
    if mandatory:
        disj: FeatureExpr = Var(members[0])
        for m in members[1:]:
            disj = Or(disj, Var(m))
        constraints.append(disj)
    return constraints


@dataclass
class FeatureModel:
    """Conjunction of constraints restricting the valid configurations."""

    constraints: list[FeatureExpr]
    compiled: PresenceCondition

    @classmethod
    def compile(cls, constraints, store):
        pc = store.true
        for expr in constraints:
            pc = pc & store.to_pc(expr)
        if pc.is_false:
            raise FeatureModelError("feature model is unsatisfiable")
        return cls(list(constraints), pc)

    @classmethod
    def load(cls, path, store):
        """Load one constraint per line; `#` comments and blanks ignored."""
        constraints = []
        for raw in Path(path).read_text().splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            constraints.append(parse_feature_expr(line, store.registry))
        return cls.compile(constraints, store)
