"""Shared test helpers: random families and independent cross-oracles.

Everything here stays deliberately independent of the solver code paths it
is used to check: the MIS enumerator recurses over vertices directly, the
consecutive-ones checker tries every column permutation, and the random
families build graphs from raw edge lists.
"""
from __future__ import annotations

import itertools
import random

from fairkdiv.cliquewidth import (
    CliqueExpression,
    EtaNode,
    RhoNode,
    UnionNode,
    VertexNode,
    evaluate_expression,
)
from fairkdiv.model import ConflictInstance


def random_instance(rng: random.Random, n: int, k: int, pmax: int, density: float = 0.4) -> ConflictInstance:
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    ]
    profits = [[rng.randint(0, pmax) for _ in range(n)] for _ in range(k)]
    return ConflictInstance.build(n=n, k=k, edges=edges, profits=profits)


def random_edgeless_instance(rng: random.Random, n: int, k: int, pmax: int) -> ConflictInstance:
    profits = [[rng.randint(0, pmax) for _ in range(n)] for _ in range(k)]
    return ConflictInstance.build(n=n, k=k, edges=[], profits=profits)


def random_convex_instance(
    rng: random.Random, na: int, nb: int, k: int, pmax: int
) -> ConflictInstance:
    """Convex under the identity order: each B-vertex gets a random interval."""
    edges = []
    for b in range(nb):
        if na == 0:
            continue
        lo = rng.randint(1, na)
        hi = rng.randint(lo, na)
        for a in range(lo, hi + 1):
            edges.append((a - 1, na + b))
    profits = [[rng.randint(0, pmax) for _ in range(na + nb)] for _ in range(k)]
    return ConflictInstance.build(n=na + nb, k=k, edges=edges, profits=profits)


def random_expression(rng: random.Random, max_leaves: int, num_labels: int) -> CliqueExpression:
    counter = [0]

    def build(budget: int):
        if budget <= 1:
            counter[0] += 1
            node = VertexNode(label=rng.randint(1, num_labels), vertex=counter[0])
        else:
            split = rng.randint(1, budget - 1)
            node = UnionNode(build(split), build(budget - split))
        for _ in range(rng.randint(0, 3)):
            i, j = rng.randint(1, num_labels), rng.randint(1, num_labels)
            if i == j:
                continue
            node = EtaNode(i, j, node) if rng.random() < 0.5 else RhoNode(i, j, node)
        return node

    root = build(rng.randint(1, max_leaves))
    return CliqueExpression(
        root=root,
        num_labels=num_labels,
        vertex_ids=frozenset(range(1, counter[0] + 1)),
    )


def instance_for_expression(
    expr: CliqueExpression, rng: random.Random, k: int, pmax: int
) -> ConflictInstance:
    graph = evaluate_expression(expr)
    n = len(graph.labels)
    edges = [(u - 1, v - 1) for u, v in graph.edges]
    profits = [[rng.randint(0, pmax) for _ in range(n)] for _ in range(k)]
    return ConflictInstance.build(n=n, k=k, edges=edges, profits=profits)


def whole_graph_expression(inst: ConflictInstance) -> CliqueExpression:
    """An n-label expression for an arbitrary graph: one label per vertex."""
    if inst.n == 0:
        raise ValueError("needs at least one vertex")
    node = VertexNode(label=1, vertex=1)
    for v in range(2, inst.n + 1):
        node = UnionNode(node, VertexNode(label=v, vertex=v))
    for u, v in inst.edges:
        node = EtaNode(u + 1, v + 1, node)
    return CliqueExpression(
        root=node,
        num_labels=inst.n,
        vertex_ids=frozenset(range(1, inst.n + 1)),
    )


def mis_weight(inst: ConflictInstance, weights: list[int]) -> int:
    """Maximum-weight independent set by direct recursion (cross-oracle)."""
    adj = inst.adjacency()

    def go(candidates: frozenset[int]) -> int:
        if not candidates:
            return 0
        v = min(candidates)
        skip = go(candidates - {v})
        take = weights[v] + go(candidates - {v} - adj[v])
        return max(skip, take)

    return go(frozenset(range(inst.n)))


def c1p_by_permutations(columns: list[int], rows: list[set[int]]) -> bool:
    """Exhaustive consecutive-ones check, usable up to ~7 columns."""
    for perm in itertools.permutations(columns):
        pos = {c: i for i, c in enumerate(perm)}
        if all(
            not r or max(pos[c] for c in r) - min(pos[c] for c in r) + 1 == len(r)
            for r in rows
        ):
            return True
    return False


def check_result_schema(payload: dict, k: int) -> None:
    """Assert a solver JSON document matches the documented result schema."""
    assert isinstance(payload["optimum"], int)
    assert isinstance(payload["profile"], list) and len(payload["profile"]) == k
    assert all(isinstance(x, int) for x in payload["profile"])
    assert isinstance(payload["method"], str)
    stats = payload["stats"]
    assert isinstance(stats["elapsed-ms"], (int, float))
    assert isinstance(stats["dp-cells"], int)
    assert isinstance(stats["profiles-stored"], int)
    if "witness" in payload:
        witness = payload["witness"]
        assert isinstance(witness, list) and len(witness) == k
        for cls in witness:
            assert all(isinstance(v, int) and v >= 1 for v in cls)
