"""Datalog frontend: declarations, rules, stratification, fact loading.

Positive Datalog over symbol-typed relations, with `=`/`!=` constraints.
Facts live in annotated databases mapping tuples to presence conditions;
a tuple that is absent has condition false.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from . import featexpr as fx


class DatalogError(Exception):
    pass


class DatalogSyntaxError(DatalogError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class FactLoadError(DatalogError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    value: str


Term = Variable | Constant


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple[Term, ...]


@dataclass(frozen=True)
class Constraint:
    left: Term
    op: str  # = or !=
    right: Term


@dataclass
class RelationDecl:
    name: str
    attributes: list[str]
    is_input: bool = False
    is_output: bool = False

    @property
    def arity(self):
        return len(self.attributes)


@dataclass
class Rule:
    head: Atom
    body: list[Atom]
    constraints: list[Constraint]


@dataclass
class Program:
    decls: dict[str, RelationDecl]
    rules: list[Rule]
    strata: list[list[str]]  # dependency SCCs in topological order

    def input_relations(self):
        return [d.name for d in self.decls.values() if d.is_input]

    def output_relations(self):
        return [d.name for d in self.decls.values() if d.is_output]

    def derived_relations(self):
        heads = {r.head.relation for r in self.rules}
        return [name for name in self.decls if name in heads]


# --------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>//[^\n]*)
  | (?P<nl>\n)
  | (?P<directive>\.(?:decl|input|output)\b)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<punct>:-|!=|=|[(),.:])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    line = 1
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise DatalogSyntaxError(f"unexpected character {text[i]!r}", line)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
        elif kind not in ("ws", "comment"):
            tokens.append((kind, m.group(), line))
        i = m.end()
    tokens.append(("eof", "", line))
    return tokens


class _ProgramParser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0
        self.decls: dict[str, RelationDecl] = {}
        self.rules: list[Rule] = []

    @property
    def cur(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message):
        raise DatalogSyntaxError(message, self.cur[2])

    def expect(self, text):
        if self.cur[1] != text:
            self.fail(f"expected {text!r}, found {self.cur[1] or 'end of input'!r}")
        return self.advance()

    def expect_ident(self, what):
        if self.cur[0] != "ident":
            self.fail(f"expected {what}")
        return self.advance()[1]

    def parse(self):
        while self.cur[0] != "eof":
            kind, text, _ = self.cur
            if kind == "directive":
                self.parse_directive()
            else:
                self.parse_rule()
        return self.finish()

    def parse_directive(self):
        directive = self.advance()[1]
        name = self.expect_ident("relation name")
        if directive == ".decl":
            if name in self.decls:
                self.fail(f"relation {name!r} declared twice")
            self.expect("(")
            attributes = []
            while True:
                attr = self.expect_ident("attribute name")
                self.expect(":")
                type_name = self.expect_ident("attribute type")
                if type_name != "symbol":
                    self.fail(f"only symbol attributes are supported, got {type_name!r}")
                attributes.append(attr)
                if self.cur[1] != ",":
                    break
                self.advance()
            self.expect(")")
            if not attributes:
                self.fail("relations need at least one attribute")
            self.decls[name] = RelationDecl(name, attributes)
        else:
            decl = self.decls.get(name)
            if decl is None:
                self.fail(f"{directive} for undeclared relation {name!r}")
            if directive == ".input":
                decl.is_input = True
            else:
                decl.is_output = True

    def parse_term(self):
        kind, text, _ = self.cur
        if kind == "ident":
            self.advance()
            return Variable(text)
        if kind == "string":
            self.advance()
            return Constant(text[1:-1])
        self.fail("expected a variable or a quoted constant")

    def parse_atom(self):
        name = self.expect_ident("relation name")
        self.expect("(")
        terms = []
        while True:
            terms.append(self.parse_term())
            if self.cur[1] != ",":
                break
            self.advance()
        self.expect(")")
        return Atom(name, tuple(terms))

    def parse_rule(self):
        head = self.parse_atom()
        self.expect(":-")
        body: list[Atom] = []
        constraints: list[Constraint] = []
        while True:
            if self.cur[0] == "ident" and self.tokens[self.i + 1][1] == "(":
                body.append(self.parse_atom())
            else:
                left = self.parse_term()
                if self.cur[1] not in ("=", "!="):
                    self.fail("expected '=' or '!=' in constraint")
                op = self.advance()[1]
                right = self.parse_term()
                constraints.append(Constraint(left, op, right))
            if self.cur[1] == ",":
                self.advance()
                continue
            break
        self.expect(".")
        if not body:
            raise DatalogSyntaxError("rules need at least one body atom", self.cur[2])
        self.rules.append(Rule(head, body, constraints))

    def finish(self):
        for rule in self.rules:
            self.check_rule(rule)
        strata = _stratify(self.decls, self.rules)
        return Program(self.decls, self.rules, strata)

    def check_rule(self, rule):
        for atom in [rule.head, *rule.body]:
            decl = self.decls.get(atom.relation)
            if decl is None:
                raise DatalogError(f"undeclared relation {atom.relation!r}")
            if len(atom.terms) != decl.arity:
                raise DatalogError(
                    f"relation {atom.relation!r} used with arity {len(atom.terms)},"
                    f" declared {decl.arity}"
                )
        bound = {
            term.name
            for atom in rule.body
            for term in atom.terms
            if isinstance(term, Variable)
        }
        for term in rule.head.terms:
            if isinstance(term, Variable) and term.name not in bound:
                raise DatalogError(
                    f"head variable {term.name!r} not bound by any body atom"
                )
        for constraint in rule.constraints:
            for term in (constraint.left, constraint.right):
                if isinstance(term, Variable) and term.name not in bound:
                    raise DatalogError(
                        f"constraint variable {term.name!r} not bound by any body atom"
                    )


def _stratify(decls, rules):
    """SCCs of the relation dependency graph, in topological order.

    An edge R -> S means S's rules read R; positive Datalog always
    stratifies, so this is just a deterministic evaluation order.
    """
    depends: dict[str, set[str]] = {name: set() for name in decls}
    for rule in rules:
        for atom in rule.body:
            depends[rule.head.relation].add(atom.relation)

    # Tarjan's algorithm, iterative, over declaration order.
    order = list(decls)
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    def strongconnect(root):
        nonlocal counter
        work = [(root, iter(sorted(depends[root])))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for succ in it:
                if succ not in index:
                    index[succ] = lowlink[succ] = counter
                    counter += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(sorted(depends[succ]))))
                    advanced = True
                    break
                if succ in on_stack:
                    lowlink[node] = min(lowlink[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                scc = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    scc.append(member)
                    if member == node:
                        break
                sccs.append(sorted(scc))

    for name in order:
        if name not in index:
            strongconnect(name)

    # Tarjan emits SCCs in reverse topological order of the condensation
    # when edges point dependency -> dependent; here they point the other
    # way (head depends on body), so emission order is already usable:
    # an SCC is emitted only after everything it depends on.
    return sccs


def parse_program(text):
    """Parse and validate declarations plus rules; compute strata."""
    return _ProgramParser(text).parse()


# --------------------------------------------------------------------------
# Annotated databases and fact loading


class AnnotatedDatabase:
    """Per relation, a map from symbol tuples to presence conditions."""

    def __init__(self, store, relations=None):
        self.store = store
        self.relations: dict[str, dict[tuple, fx.PresenceCondition]] = {}
        self.dropped_unsat = 0
        if relations:
            for name, tuples in relations.items():
                for tup, pc in tuples.items():
                    self.add(name, tup, pc)

    def ensure_relation(self, name):
        return self.relations.setdefault(name, {})

    def add(self, name, tup, pc=None):
        """Insert a tuple, merging by disjunction; false conditions drop."""
        if pc is None:
            pc = self.store.true
        if pc.is_false:
            return False
        rel = self.relations.setdefault(name, {})
        existing = rel.get(tup)
        rel[tup] = pc if existing is None else existing | pc
        return True

    def tuples(self, name):
        return self.relations.get(name, {})

    def count(self, name=None):
        if name is not None:
            return len(self.relations.get(name, {}))
        return sum(len(rel) for rel in self.relations.values())

    def all_pcs(self):
        for rel in self.relations.values():
            yield from rel.values()

    def copy(self):
        out = AnnotatedDatabase(self.store)
        for name, rel in self.relations.items():
            out.relations[name] = dict(rel)
        return out


def load_facts(directory, decls, store):
    """Load ``<relation>.facts`` files for input relations into a database.

    Rows may carry a trailing PC column; missing or empty means true.
    Duplicate tuples merge by disjunction.  Rows with unsatisfiable PCs
    belong to no product: they are dropped and counted on the database.
    """
    directory = Path(directory)
    db = AnnotatedDatabase(store)
    pc_cache: dict[str, fx.PresenceCondition] = {}
    for decl in decls.values():
        db.ensure_relation(decl.name)
        if not decl.is_input:
            continue
        path = directory / f"{decl.name}.facts"
        if not path.exists():
            continue
        with path.open() as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) == decl.arity:
                    pc_text = ""
                elif len(fields) == decl.arity + 1:
                    pc_text = fields[-1]
                    fields = fields[:-1]
                else:
                    raise FactLoadError(
                        f"{path.name}:{lineno}: expected {decl.arity} columns"
                        f" (plus optional PC), got {len(fields)}"
                    )
                if pc_text:
                    pc = pc_cache.get(pc_text)
                    if pc is None:
                        try:
                            pc = store.parse_pc(pc_text)
                        except fx.FeatureExprError as exc:
                            raise FactLoadError(
                                f"{path.name}:{lineno}: bad PC {pc_text!r}: {exc}"
                            ) from exc
                        pc_cache[pc_text] = pc
                else:
                    pc = store.true
                if not db.add(decl.name, tuple(fields), pc):
                    db.dropped_unsat += 1
    return db
