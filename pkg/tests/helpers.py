"""Shared generators and brute-force oracles for the test suite.

Oracles here enumerate configurations exhaustively; they never call the
code paths they are used to check.
"""

from __future__ import annotations

import random

from pclift import featexpr as fx


def truth_table(expr, feature_names):
    """Tuple of evaluate() results over all 2^n configurations, fixed order."""
    return tuple(
        fx.evaluate(expr, rho) for rho in fx.all_configurations(feature_names)
    )


def pc_truth_table(pc, feature_names):
    return tuple(
        pc.evaluate(rho) for rho in fx.all_configurations(feature_names)
    )


def random_expr(rng, features, max_depth=5):
    """Random feature expression over ``features`` (list of Feature)."""
    if max_depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.08:
            return fx.TRUE_EXPR
        if roll < 0.16:
            return fx.FALSE_EXPR
        return fx.Var(rng.choice(features))
    kind = rng.random()
    if kind < 0.25:
        return fx.Not(random_expr(rng, features, max_depth - 1))
    left = random_expr(rng, features, max_depth - 1)
    right = random_expr(rng, features, max_depth - 1)
    return (fx.And if kind < 0.625 else fx.Or)(left, right)


def equivalent_variant(rng, expr):
    """Rewrite ``expr`` into a syntactically different, equivalent formula."""
    choices = []
    if isinstance(expr, fx.And):
        choices = [
            fx.And(expr.right, expr.left),
            fx.Not(fx.Or(fx.Not(expr.left), fx.Not(expr.right))),
        ]
    elif isinstance(expr, fx.Or):
        choices = [
            fx.Or(expr.right, expr.left),
            fx.Not(fx.And(fx.Not(expr.left), fx.Not(expr.right))),
        ]
    elif isinstance(expr, fx.Not):
        choices = [fx.Not(fx.Not(expr))]  # wrap, not unwrap: stays equivalent
    variants = [
        fx.Not(fx.Not(expr)),
        fx.And(expr, expr),
        fx.Or(expr, expr),
        fx.And(expr, fx.TRUE_EXPR),
        fx.Or(expr, fx.FALSE_EXPR),
    ] + choices
    return rng.choice(variants)


def fresh_store(feature_names=()):
    registry = fx.FeatureRegistry()
    features = [registry.register(n) for n in feature_names]
    return fx.PcStore(registry), features


def random_graph(rng, max_nodes=12, max_edges=20, feature_names=("FA", "FB", "FC")):
    """Random FactGraph with PC attributes, for serialization round-trips."""
    from pclift.factgraph import FactGraph

    kinds = ["COMPONENT", "FILE", "CLASS", "FUNCTION", "VARIABLE"]
    etypes = ["contain", "write", "varWrite", "call", "varInfFunc", "cFunction"]
    g = FactGraph()
    n = rng.randint(1, max_nodes)
    ids = [f"n{i}" for i in range(n)]
    for i, node_id in enumerate(ids):
        g.add_node(node_id, kinds[i % len(kinds)])
        if rng.random() < 0.3:
            g.set_node_pc_text(node_id, random_pc_text(rng, feature_names))
    for _ in range(rng.randint(0, max_edges)):
        etype = rng.choice(etypes)
        src = rng.choice(ids)
        dst = rng.choice(ids)
        g.add_edge(etype, src, dst)
        if rng.random() < 0.4:
            g.set_edge_pc_text((etype, src, dst), random_pc_text(rng, feature_names))
    return g


def random_pc_text(rng, feature_names):
    terms = []
    for _ in range(rng.randint(1, 2)):
        name = rng.choice(feature_names)
        terms.append(name if rng.random() < 0.7 else f"!{name}")
    return " & ".join(terms)
