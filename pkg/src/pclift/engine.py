"""Lifted semi-naive Datalog evaluation with presence-condition propagation.

A body match conjoins the presence conditions of the matched tuples
left-to-right, abandoning the match as soon as the running conjunction is
unsatisfiable.  Stored conditions grow by disjunction; a tuple re-enters
the delta only with the genuinely new part (d AND NOT e), which is what
keeps recursive rules from looping on already-covered products.

The ground evaluator is the same join machinery with the condition
algebra bypassed; it is both the 150%-representation baseline and one
side of the lifting-correctness check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import featexpr as fx
from .datalog import AnnotatedDatabase, Constant, Variable

_FALSE = 0
_TRUE = 1


class EngineError(Exception):
    pass


@dataclass
class EvalOptions:
    """Evaluation knobs.

    The feature model is only consulted during evaluation when
    ``prune_with_fm_during_eval`` is set (satisfiability modulo the model);
    plain output filtering is the separate :func:`apply_feature_model` pass.
    """

    feature_model: fx.FeatureModel | None = None
    collect_stats: bool = True
    prune_with_fm_during_eval: bool = False
    trace_hook: object = None  # callable(stratum_index, round_index, snapshot)


@dataclass
class RunStats:
    phase_seconds: dict[str, float] = field(default_factory=dict)
    output_facts: int = 0
    output_facts_with_pc: int = 0
    output_pc_percent: float = 0.0
    unique_pcs: int = 0
    unsat_dropped: int = 0
    iterations_per_stratum: list[int] = field(default_factory=list)

    def as_dict(self):
        return {
            "phase_seconds": dict(self.phase_seconds),
            "output_facts": self.output_facts,
            "output_facts_with_pc": self.output_facts_with_pc,
            "output_pc_percent": self.output_pc_percent,
            "unique_pcs": self.unique_pcs,
            "unsat_dropped": self.unsat_dropped,
            "iterations_per_stratum": list(self.iterations_per_stratum),
        }

    def report_text(self):
        lines = [
            f"output_facts\t{self.output_facts}",
            f"output_facts_with_pc\t{self.output_facts_with_pc}",
            f"output_pc_percent\t{self.output_pc_percent:.3f}",
            f"unique_pcs\t{self.unique_pcs}",
            f"unsat_dropped\t{self.unsat_dropped}",
            f"iterations_per_stratum\t{','.join(map(str, self.iterations_per_stratum))}",
        ]
        for phase, seconds in self.phase_seconds.items():
            lines.append(f"time_{phase}\t{seconds:.6f}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Join planning


def _term_spec(term):
    if isinstance(term, Constant):
        return ("c", term.value)
    return ("v", term.name)


class _Plan:
    """Precomputed join order and binding layout for one rule."""

    __slots__ = (
        "key",
        "head_rel",
        "head_spec",
        "atoms",
        "checks_after",
        "recursive_at",
        "prefix_vars",
    )

    def __init__(self, rule, stratum_rels, key=0):
        self.key = key
        self.head_rel = rule.head.relation
        self.head_spec = tuple(_term_spec(t) for t in rule.head.terms)
        bound: set[str] = set()
        first_atom_of_var: dict[str, int] = {}
        atoms = []
        prefix: list[str] = []
        prefix_vars = []
        for i, atom in enumerate(rule.body):
            lookup = []  # (position, spec) fixed before scanning this atom
            binds = []  # (position, variable) newly bound here
            repeats = []  # (position, earlier position) within this atom
            seen_here: dict[str, int] = {}
            prefix_vars.append(tuple(prefix))
            for p, term in enumerate(atom.terms):
                if isinstance(term, Constant):
                    lookup.append((p, ("c", term.value)))
                elif term.name in bound:
                    lookup.append((p, ("v", term.name)))
                elif term.name in seen_here:
                    repeats.append((p, seen_here[term.name]))
                else:
                    seen_here[term.name] = p
                    binds.append((p, term.name))
            for _, name in binds:
                bound.add(name)
                first_atom_of_var.setdefault(name, i)
                prefix.append(name)
            atoms.append((atom.relation, tuple(lookup), tuple(binds), tuple(repeats)))
        self.atoms = tuple(atoms)
        self.prefix_vars = tuple(prefix_vars)
        self.recursive_at = tuple(
            i for i, atom in enumerate(rule.body) if atom.relation in stratum_rels
        )

        checks: list[list] = [[] for _ in rule.body]
        for c in rule.constraints:
            at = 0
            for side in (c.left, c.right):
                if isinstance(side, Variable):
                    at = max(at, first_atom_of_var[side.name])
            checks[at].append((_term_spec(c.left), c.op, _term_spec(c.right)))
        self.checks_after = tuple(tuple(cs) for cs in checks)


def _check_holds(check, binding):
    (lk, lv), op, (rk, rv) = check
    left = lv if lk == "c" else binding[lv]
    right = rv if rk == "c" else binding[rv]
    return (left == right) if op == "=" else (left != right)


class _Evaluator:
    """One fixpoint computation over integer-condition relations.

    ``store`` None means ground mode: every condition is the constant 1
    and the condition algebra short-circuits away.
    """

    def __init__(self, program, rels, store, fm_node=_TRUE, trace_hook=None):
        self.program = program
        self.rels = rels
        self.store = store
        self.fm_node = fm_node
        self.trace_hook = trace_hook
        # Distinct dead matches: a partial match abandoned as unsatisfiable
        # counts once even when the delta discipline revisits it.
        self.dead_matches: set = set()
        self.iterations: list[int] = []
        self.phase_seconds: dict[str, float] = {}
        self._index_cache: dict = {}

    @property
    def unsat_events(self):
        return len(self.dead_matches)

    # -- index plumbing

    def _index(self, source_key, data, positions):
        key = (source_key, positions)
        index = self._index_cache.get(key)
        if index is None:
            index = {}
            for tup, node in data.items():
                k = tuple(tup[p] for p in positions)
                bucket = index.get(k)
                if bucket is None:
                    index[k] = [(tup, node)]
                else:
                    bucket.append((tup, node))
            self._index_cache[key] = index
        return index

    # -- one rule pass

    def _run_rule(self, plan, delta_map, dp, next_delta):
        lifted = self.store is not None
        and_fn = self.store._and if lifted else None
        not_fn = self.store._not if lifted else None
        or_fn = self.store._or if lifted else None
        fm_node = self.fm_node
        rels = self.rels
        head_rel = rels[plan.head_rel]
        head_delta = next_delta.setdefault(plan.head_rel, {})
        head_spec = plan.head_spec
        atoms = plan.atoms
        checks_after = plan.checks_after
        n = len(atoms)
        binding: dict[str, str] = {}

        def emit(pc_node):
            head = tuple(v if k == "c" else binding[v] for k, v in head_spec)
            existing = head_rel.get(head, _FALSE)
            if lifted:
                merged = or_fn(existing, pc_node)
                if merged == existing:
                    return
                head_rel[head] = merged
                new_part = pc_node if existing == _FALSE else and_fn(
                    pc_node, not_fn(existing)
                )
                if fm_node != _TRUE and and_fn(new_part, fm_node) == _FALSE:
                    return
                prev = head_delta.get(head, _FALSE)
                head_delta[head] = or_fn(prev, new_part)
            else:
                if existing == _FALSE:
                    head_rel[head] = _TRUE
                    head_delta[head] = _TRUE

        def at(i, pc_node):
            if i == n:
                emit(pc_node)
                return
            relation, lookup, binds, repeats = atoms[i]
            if i == dp:
                data = delta_map.get(relation, {})
                source_key = ("d", relation)
            else:
                data = rels[relation]
                source_key = ("r", relation)
            if lookup:
                positions = tuple(p for p, _ in lookup)
                key = tuple(v if k == "c" else binding[v] for _, (k, v) in lookup)
                candidates = self._index(source_key, data, positions).get(key, ())
            else:
                candidates = list(data.items())
            checks = checks_after[i]
            prefix_vars = plan.prefix_vars[i]
            for tup, node in candidates:
                skip = False
                for p, q in repeats:
                    if tup[p] != tup[q]:
                        skip = True
                        break
                if skip:
                    continue
                if lifted:
                    new_pc = and_fn(pc_node, node)
                    dead = (
                        new_pc == _FALSE
                        if fm_node == _TRUE
                        else and_fn(new_pc, fm_node) == _FALSE
                    )
                    if dead:
                        self.dead_matches.add(
                            (plan.key, i, tuple(binding[v] for v in prefix_vars), tup)
                        )
                        continue
                else:
                    new_pc = _TRUE
                for p, var in binds:
                    binding[var] = tup[p]
                if checks:
                    ok = True
                    for check in checks:
                        if not _check_holds(check, binding):
                            ok = False
                            break
                    if not ok:
                        continue
                at(i + 1, new_pc)

        at(0, _TRUE)

    # -- strata

    def run(self):
        for si, stratum in enumerate(self.program.strata):
            stratum_set = set(stratum)
            rules = [
                (k, r)
                for k, r in enumerate(self.program.rules)
                if r.head.relation in stratum_set
            ]
            if not rules:
                self.iterations.append(0)
                continue
            started = time.perf_counter()
            plans = [_Plan(rule, stratum_set, key=k) for k, rule in rules]
            rounds = 1
            self._index_cache = {}
            next_delta: dict[str, dict] = {}
            for plan in plans:
                self._run_rule(plan, {}, -1, next_delta)
            delta_map = {k: v for k, v in next_delta.items() if v}
            self._trace(si, rounds)
            while delta_map:
                self._index_cache = {}
                next_delta = {}
                for plan in plans:
                    for i in plan.recursive_at:
                        if delta_map.get(plan.atoms[i][0]):
                            self._run_rule(plan, delta_map, i, next_delta)
                delta_map = {k: v for k, v in next_delta.items() if v}
                rounds += 1
                self._trace(si, rounds)
            self.iterations.append(rounds)
            self.phase_seconds[f"stratum_{si}"] = time.perf_counter() - started
        return self


    def _trace(self, stratum_index, round_index):
        if self.trace_hook is None:
            return
        snapshot = {name: dict(rel) for name, rel in self.rels.items()}
        self.trace_hook(stratum_index, round_index, snapshot)


# --------------------------------------------------------------------------
# Public operations


def _base_relations(program, db):
    rels: dict[str, dict[tuple, int]] = {}
    for name in program.decls:
        source = db.relations.get(name, {})
        rels[name] = {tup: pc.node for tup, pc in source.items()}
    return rels


def evaluate_lifted(program, db, store, opts=None):
    """Least-fixpoint lifted evaluation; returns (database, run stats)."""
    opts = opts or EvalOptions()
    if db.store is not store:
        raise EngineError("database and evaluation store differ")
    missing = [r for r in program.input_relations() if r not in db.relations]
    if missing:
        raise EngineError(f"missing input relations: {', '.join(sorted(missing))}")

    fm_node = _TRUE
    if opts.prune_with_fm_during_eval and opts.feature_model is not None:
        fm_node = opts.feature_model.compiled.node

    started = time.perf_counter()
    rels = _base_relations(program, db)
    evaluator = _Evaluator(
        program, rels, store, fm_node=fm_node, trace_hook=opts.trace_hook
    ).run()

    out = AnnotatedDatabase(store)
    for name, rel in rels.items():
        out.relations[name] = {tup: store._wrap(node) for tup, node in rel.items()}
    for name, rel in db.relations.items():
        if name not in out.relations:  # undeclared extras pass through
            out.relations[name] = dict(rel)

    stats = RunStats()
    stats.iterations_per_stratum = evaluator.iterations
    stats.unsat_dropped = evaluator.unsat_events
    stats.phase_seconds = evaluator.phase_seconds
    stats.phase_seconds["total"] = time.perf_counter() - started
    if opts.collect_stats:
        derived = program.derived_relations()
        nodes = [node for name in derived for node in rels[name].values()]
        stats.output_facts = len(nodes)
        explicit = [node for node in nodes if node != _TRUE]
        stats.output_facts_with_pc = len(explicit)
        stats.output_pc_percent = (
            100.0 * len(explicit) / len(nodes) if nodes else 0.0
        )
        stats.unique_pcs = len(set(explicit))
    return out, stats


def ground_eval(program, db):
    """Classical semi-naive fixpoint over a plain (condition-free) database.

    ``db`` maps relation names to sets of tuples; an annotated database is
    accepted as long as every stored condition is true.
    """
    if isinstance(db, AnnotatedDatabase):
        plain = {}
        for name, rel in db.relations.items():
            for tup, pc in rel.items():
                if not pc.is_true:
                    raise EngineError(
                        f"ground evaluation needs condition-free input;"
                        f" {name}{tup} has an explicit condition"
                    )
            plain[name] = set(rel)
        db = plain
    missing = [r for r in program.input_relations() if r not in db]
    if missing:
        raise EngineError(f"missing input relations: {', '.join(sorted(missing))}")
    rels = {name: {tup: _TRUE for tup in db.get(name, ())} for name in program.decls}
    _Evaluator(program, rels, store=None).run()
    return {name: set(rel) for name, rel in rels.items()}


def project(db, rho):
    """Keep exactly the tuples whose condition holds under ``rho``."""
    store = db.store
    cache = {_FALSE: False, _TRUE: True}
    out = {}
    for name, rel in db.relations.items():
        keep = set()
        for tup, pc in rel.items():
            node = pc.node
            value = cache.get(node)
            if value is None:
                value = store.evaluate_node(node, rho)
                cache[node] = value
            if value:
                keep.add(tup)
        out[name] = keep
    return out


def strip_pcs(db):
    """Forget conditions: the 150%-representation view of a database."""
    return {name: set(rel) for name, rel in db.relations.items()}


def apply_feature_model(db, fm):
    """Drop tuples that belong to no valid product; returns (db, removed)."""
    store = db.store
    fm_node = fm.compiled.node
    out = AnnotatedDatabase(store)
    removed = 0
    sat_cache: dict[int, bool] = {}
    for name, rel in db.relations.items():
        kept = out.relations.setdefault(name, {})
        for tup, pc in rel.items():
            node = pc.node
            sat = sat_cache.get(node)
            if sat is None:
                sat = store._and(node, fm_node) != _FALSE
                sat_cache[node] = sat
            if sat:
                kept[tup] = pc
            else:
                removed += 1
    return out, removed


@dataclass
class Counterexample:
    configuration: tuple[str, ...]  # features present
    relation: str
    missing: list[tuple]  # in ground run, not in projected lifted run
    extra: list[tuple]  # in projected lifted run, not in ground run


@dataclass
class VerifyReport:
    passed: bool
    configurations_checked: int
    counterexamples: list[Counterexample] = field(default_factory=list)


def verify_lifting(program, db, store, max_features=12, opts=None):
    """Check the lifting contract by exhaustive configuration enumeration.

    For every configuration: projecting the lifted result must equal
    ground evaluation of the projected inputs.
    """
    names = store.registry.names()
    if len(names) > max_features:
        raise EngineError(
            f"{len(names)} features exceed the enumeration limit {max_features}"
        )
    lifted, _ = evaluate_lifted(
        program, db, store, opts or EvalOptions(collect_stats=False)
    )
    counterexamples = []
    checked = 0
    for rho in fx.all_configurations(names):
        checked += 1
        projected = project(lifted, rho)
        ground = ground_eval(program, project(db, rho))
        for name in program.decls:
            left = projected.get(name, set())
            right = ground.get(name, set())
            if left != right:
                present = tuple(sorted(n for n, v in rho.items() if v))
                counterexamples.append(
                    Counterexample(
                        configuration=present,
                        relation=name,
                        missing=sorted(right - left),
                        extra=sorted(left - right),
                    )
                )
    return VerifyReport(not counterexamples, checked, counterexamples)
