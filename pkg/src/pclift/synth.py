"""Synthetic factbases for benchmarking the lifted engine.

The generator targets the behaviour-alteration relations and plants a
known number of contradictory joins: pairs of chained varWrite facts
whose conditions exclude each other, on names used nowhere else.  Each
plant therefore costs the lifted run exactly one derived fact relative
to the condition-free baseline, so the reported unsat-dropped statistic
has an exact expected value instead of being merely observed.

Random explicit conditions use positive literals only; conjunctions of
positive cubes are always satisfiable, so the planted joins stay the
only source of unsatisfiable derivations.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field

from . import featexpr as fx
from .analysis import behaviour_alteration_program
from .datalog import AnnotatedDatabase
from .engine import EvalOptions, evaluate_lifted, ground_eval, strip_pcs


@dataclass
class SyntheticSpec:
    tuples: int = 10_000
    features: int = 50
    variational_pct: float = 1.0  # percent of input tuples with explicit PCs
    planted_unsat: int = 10
    components: int = 10
    seed: int = 0


@dataclass
class SyntheticInfo:
    input_tuples: int = 0
    variational_tuples: int = 0
    planted_unsat: int = 0
    relation_sizes: dict[str, int] = field(default_factory=dict)


def generate(spec, store=None):
    """Deterministic synthetic database for the behaviour-alteration rules."""
    if spec.tuples < 2 * spec.planted_unsat + 8:
        raise ValueError("tuple budget too small for the requested plants")
    if spec.planted_unsat and spec.features < 1:
        raise ValueError("plants need at least one feature")
    rng = random.Random(spec.seed)
    if store is None:
        store = fx.PcStore()
    registry = store.registry
    features = [registry.register(f"F{i}") for i in range(spec.features)]

    budget = spec.tuples - 2 * spec.planted_unsat
    n_cfunction = max(2, budget // 10)
    n_write = budget // 5
    n_inf = budget // 5
    n_varwrite = budget - n_cfunction - n_write - n_inf

    functions = [f"fn{i}" for i in range(n_cfunction)]
    components = [f"comp{i}" for i in range(max(2, spec.components))]

    # varWrite chains of length two over disjoint variables keep the
    # transitive closure linear in the input size.
    n_chains = (n_varwrite + 1) // 2
    variables = [f"v{i}" for i in range(3 * n_chains)]
    rows: dict[str, list[tuple[tuple[str, ...], str | None]]] = {
        "varWrite": [],
        "write": [],
        "varInfFunc": [],
        "cFunction": [],
    }
    for c in range(n_chains):
        a, b, d = variables[3 * c], variables[3 * c + 1], variables[3 * c + 2]
        rows["varWrite"].append(((a, b), None))
        if len(rows["varWrite"]) < n_varwrite:
            rows["varWrite"].append(((b, d), None))
    for i, fn in enumerate(functions):
        rows["cFunction"].append(((fn, components[i % len(components)]), None))
    seen_write = set()
    while len(rows["write"]) < n_write:
        pair = (rng.choice(functions), rng.choice(variables))
        if pair not in seen_write:
            seen_write.add(pair)
            rows["write"].append((pair, None))
    seen_inf = set()
    while len(rows["varInfFunc"]) < n_inf:
        pair = (rng.choice(variables), rng.choice(functions))
        if pair not in seen_inf:
            seen_inf.add(pair)
            rows["varInfFunc"].append((pair, None))

    # Explicit conditions: positive cubes on ordinary rows.
    target_variational = round(spec.tuples * spec.variational_pct / 100.0)
    wanted_random = max(0, target_variational - 2 * spec.planted_unsat)
    flat = [
        (rel, i)
        for rel in ("varWrite", "write", "varInfFunc", "cFunction")
        for i in range(len(rows[rel]))
    ]
    chosen = rng.sample(flat, min(wanted_random, len(flat)))
    for rel, i in chosen:
        picks = rng.sample(features, k=min(rng.randint(1, 2), len(features)))
        text = " & ".join(f.name for f in picks)
        tup, _ = rows[rel][i]
        rows[rel][i] = (tup, text)

    # Planted contradictory joins on fresh names.
    for p in range(spec.planted_unsat):
        feature = features[p % len(features)]
        a, m, b = f"ua{p}", f"um{p}", f"ub{p}"
        rows["varWrite"].append(((a, m), feature.name))
        rows["varWrite"].append(((m, b), f"!{feature.name}"))

    db = AnnotatedDatabase(store)
    variational = 0
    for rel, entries in rows.items():
        for tup, pc_text in entries:
            if pc_text is None:
                db.add(rel, tup)
            else:
                variational += 1
                db.add(rel, tup, store.parse_pc(pc_text))

    info = SyntheticInfo(
        input_tuples=sum(len(entries) for entries in rows.values()),
        variational_tuples=variational,
        planted_unsat=spec.planted_unsat,
        relation_sizes={rel: len(entries) for rel, entries in rows.items()},
    )
    return db, info


def _trimmed_mean(values):
    """Average after excluding one minimum and one maximum."""
    if len(values) <= 2:
        return statistics.fmean(values)
    trimmed = sorted(values)[1:-1]
    return statistics.fmean(trimmed)


def run_benchmark(spec, repetitions=5):
    """Time the condition-free baseline against the lifted run.

    Each side runs ``repetitions`` times; reported times are the average
    after excluding the minimum and maximum.  Counts are deterministic
    for a fixed seed; timings naturally are not.
    """
    program = behaviour_alteration_program().parse()
    store = fx.PcStore()
    db, info = generate(spec, store)
    plain = strip_pcs(db)

    ground_times = []
    ground_out = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        ground_out = ground_eval(program, plain)
        ground_times.append(time.perf_counter() - t0)

    lifted_times = []
    lifted_out = stats = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        lifted_out, stats = evaluate_lifted(
            program, db, store, EvalOptions(collect_stats=True)
        )
        lifted_times.append(time.perf_counter() - t0)

    derived = program.derived_relations()
    ground_count = sum(len(ground_out[name]) for name in derived)
    lifted_count = stats.output_facts

    ground_mean = _trimmed_mean(ground_times)
    lifted_mean = _trimmed_mean(lifted_times)
    overhead = (
        100.0 * (lifted_mean - ground_mean) / ground_mean if ground_mean > 0 else 0.0
    )
    return {
        "params": {
            "tuples": spec.tuples,
            "features": spec.features,
            "variational_pct": spec.variational_pct,
            "planted_unsat": spec.planted_unsat,
            "components": spec.components,
            "seed": spec.seed,
            "repetitions": repetitions,
        },
        "counts": {
            "input_tuples": info.input_tuples,
            "variational_input_facts": info.variational_tuples,
            "relation_sizes": info.relation_sizes,
            "ground_output_facts": ground_count,
            "lifted_output_facts": lifted_count,
            "output_fact_delta": ground_count - lifted_count,
            "unsat_dropped": stats.unsat_dropped,
            "planted_unsat": info.planted_unsat,
            "lifted_output_facts_with_pc": stats.output_facts_with_pc,
            "unique_pcs": stats.unique_pcs,
        },
        "timing": {
            "ground_seconds": ground_times,
            "lifted_seconds": lifted_times,
            "ground_trimmed_mean": ground_mean,
            "lifted_trimmed_mean": lifted_mean,
            "overhead_percent": overhead,
        },
    }
