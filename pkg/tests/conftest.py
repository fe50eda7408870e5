import random

import pytest

from fairkdiv.model import ConflictInstance

# Endpoint table of the 27-vertex convex bipartite fixture used throughout:
# 13 A-vertices, 14 B-vertices, B-neighborhoods given as A-position intervals.
FIXTURE_B_MINUS = (1, 2, 3, 3, 3, 4, 5, 6, 5, 8, 6, 10, 11, 12)
FIXTURE_B_PLUS = (4, 4, 4, 6, 6, 6, 6, 6, 11, 11, 13, 13, 13, 13)


@pytest.fixture
def t1_instance() -> ConflictInstance:
    """Two vertices, no conflicts, two agents: p_1 = (3,1), p_2 = (2,2)."""
    return ConflictInstance.build(n=2, k=2, edges=[], profits=[[3, 1], [2, 2]])


def build_interval_instance(b_minus, b_plus, k=2, pmax=1, seed=0) -> ConflictInstance:
    s = max(b_plus)
    rng = random.Random(seed)
    edges = []
    for i, (lo, hi) in enumerate(zip(b_minus, b_plus)):
        for a in range(lo, hi + 1):
            edges.append((a - 1, s + i))
    n = s + len(b_minus)
    profits = [[rng.randint(0, pmax) for _ in range(n)] for _ in range(k)]
    return ConflictInstance.build(n=n, k=k, edges=edges, profits=profits)


@pytest.fixture
def example_graph() -> ConflictInstance:
    """The 27-vertex convex bipartite fixture with unit-range profits."""
    return build_interval_instance(FIXTURE_B_MINUS, FIXTURE_B_PLUS)
