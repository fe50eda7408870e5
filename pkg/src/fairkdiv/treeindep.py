"""Solver driven by a tree decomposition of bounded independence number.

The decomposition's quality parameter here is not bag size but the largest
independent set inside any bag: each agent's class meets a bag in at most
that many vertices, so enumerating the per-bag colorings stays polynomial.
The decomposition is first normalized to leaf/introduce/forget/join nodes;
a state is a coloring of the current bag mapped to the profiles of all
colorings of the subtree's vertices agreeing with it.

Chordal graphs are the ell = 1 case: their clique trees (built here via
maximum cardinality search) have bags that are cliques.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import Coloring, ConflictInstance, Profile, validate_coloring
from .profiles import (
    DEFAULT_PROFILE_CAP,
    ProfileCapError,
    ProfileSet,
    best_profile,
    dominance_prune,
)

DEFAULT_ALPHA_NODE_CAP = 10**6

# coloring keys are tuples of colors (0 = uncolored) aligned to sorted(bag)
ColoringKey = tuple[int, ...]
TinTable = dict[ColoringKey, ProfileSet]


class DecompositionError(ValueError):
    """Structural or axiom failure of a tree decomposition."""


class AlphaCapError(RuntimeError):
    """Bag independence-number search exceeded its node cap."""


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by id plus tree edges between bag ids; vertices 0-based."""

    n: int
    bags: dict[int, frozenset[int]]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ids = set(self.bags)
        for x, y in self.edges:
            if x not in ids or y not in ids:
                raise DecompositionError(f"tree edge ({x},{y}) references an unknown bag")
            if x == y:
                raise DecompositionError(f"tree self-loop at bag {x}")
        if ids:
            if len(self.edges) != len(ids) - 1:
                raise DecompositionError(
                    f"{len(ids)} bags need {len(ids) - 1} tree edges, found {len(self.edges)}"
                )
            seen = {min(ids)}
            frontier = [min(ids)]
            neigh: dict[int, list[int]] = {i: [] for i in ids}
            for x, y in self.edges:
                neigh[x].append(y)
                neigh[y].append(x)
            while frontier:
                x = frontier.pop()
                for y in neigh[x]:
                    if y not in seen:
                        seen.add(y)
                        frontier.append(y)
            if seen != ids:
                raise DecompositionError("disconnected tree")

    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1


def parse_tree_decomposition(text: str) -> TreeDecomposition:
    """Parse the PACE-style .td format.

    s td <num_bags> <max_bag_size> <n>; bag lines `b <id> <v...>`; remaining
    lines are tree edges `<id> <id>`; comments start with `c`.
    """
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise DecompositionError(f"line {lineno}: duplicate 's td' line")
            if len(parts) != 5 or parts[1] != "td":
                raise DecompositionError(f"line {lineno}: header must be 's td <bags> <size> <n>'")
            try:
                header = tuple(int(p) for p in parts[2:])
            except ValueError:
                raise DecompositionError(f"line {lineno}: non-integer header field")
        elif parts[0] == "b":
            if header is None:
                raise DecompositionError(f"line {lineno}: bag line before header")
            try:
                values = [int(p) for p in parts[1:]]
            except ValueError:
                raise DecompositionError(f"line {lineno}: non-integer in bag line")
            if not values:
                raise DecompositionError(f"line {lineno}: bag line without id")
            bag_id = values[0]
            if bag_id in bags:
                raise DecompositionError(f"line {lineno}: duplicate bag id {bag_id}")
            n = header[2]
            for v in values[1:]:
                if not (1 <= v <= n):
                    raise DecompositionError(f"line {lineno}: vertex {v} out of range 1..{n}")
            bags[bag_id] = frozenset(v - 1 for v in values[1:])
        else:
            if header is None:
                raise DecompositionError(f"line {lineno}: edge line before header")
            try:
                values = [int(p) for p in parts]
            except ValueError:
                raise DecompositionError(f"line {lineno}: non-integer in tree edge line")
            if len(values) != 2:
                raise DecompositionError(f"line {lineno}: tree edge needs two bag ids")
            edges.append((values[0], values[1]))
    if header is None:
        raise DecompositionError("missing 's td' header")
    if header[0] != len(bags):
        raise DecompositionError(f"header declares {header[0]} bags, found {len(bags)}")
    return TreeDecomposition(n=header[2], bags=bags, edges=tuple(edges))


def serialize_tree_decomposition(td: TreeDecomposition) -> str:
    lines = [f"s td {len(td.bags)} {max((len(b) for b in td.bags.values()), default=0)} {td.n}"]
    for bag_id in sorted(td.bags):
        lines.append("b " + " ".join(str(x) for x in [bag_id] + sorted(v + 1 for v in td.bags[bag_id])))
    for x, y in td.edges:
        lines.append(f"{x} {y}")
    return "\n".join(lines) + "\n"


def bag_independence_number(
    inst: ConflictInstance, bag: Iterable[int], node_cap: int = DEFAULT_ALPHA_NODE_CAP
) -> int:
    """Exact independence number of the induced bag subgraph (branch and bound)."""
    adj = inst.adjacency()
    nodes = [0]

    def alpha(vertices: frozenset[int]) -> int:
        nodes[0] += 1
        if nodes[0] > node_cap:
            raise AlphaCapError(f"bag independence search exceeded {node_cap} nodes")
        if not vertices:
            return 0
        v = max(vertices, key=lambda x: (len(adj[x] & vertices), -x))
        conflicts = adj[v] & vertices
        if not conflicts:
            # v has maximum degree, so the whole remainder is independent
            return len(vertices)
        return max(1 + alpha(vertices - {v} - conflicts), alpha(vertices - {v}))

    return alpha(frozenset(bag))


def validate_td(
    inst: ConflictInstance,
    td: TreeDecomposition,
    alpha_node_cap: int = DEFAULT_ALPHA_NODE_CAP,
) -> tuple[int, int]:
    """Check the three decomposition axioms; return (width, independence number).

    Axioms: every vertex in a bag, every edge inside a bag, and per-vertex
    bag sets connected in the tree.
    """
    if td.n != inst.n:
        raise DecompositionError(f"decomposition is for {td.n} vertices, instance has {inst.n}")
    covered: set[int] = set()
    for bag in td.bags.values():
        for v in bag:
            if not (0 <= v < inst.n):
                raise DecompositionError(f"bag vertex {v + 1} out of range")
        covered |= bag
    missing = sorted(set(range(inst.n)) - covered)
    if missing:
        raise DecompositionError(f"axiom 1 violated: vertex {missing[0] + 1} is in no bag")
    for u, v in inst.edges:
        if not any(u in bag and v in bag for bag in td.bags.values()):
            raise DecompositionError(
                f"axiom 2 violated: edge ({u + 1},{v + 1}) is inside no bag"
            )
    neigh: dict[int, list[int]] = {i: [] for i in td.bags}
    for x, y in td.edges:
        neigh[x].append(y)
        neigh[y].append(x)
    for v in range(inst.n):
        holders = {i for i, bag in td.bags.items() if v in bag}
        start = min(holders)
        seen = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for y in neigh[x]:
                if y in holders and y not in seen:
                    seen.add(y)
                    frontier.append(y)
        if seen != holders:
            raise DecompositionError(
                f"axiom 3 violated: bags containing vertex {v + 1} are disconnected"
            )
    ell = 0
    for bag_id in sorted(td.bags):
        ell = max(ell, bag_independence_number(inst, td.bags[bag_id], alpha_node_cap))
    return td.width(), ell


@dataclass(eq=False)
class NiceNode:
    """One node of a normalized decomposition: leaf, introduce, forget, or join."""

    kind: str
    bag: frozenset[int]
    vertex: int | None = None
    children: tuple["NiceNode", ...] = ()

    def check(self) -> None:
        if self.kind == "leaf":
            assert not self.bag and not self.children
        elif self.kind == "introduce":
            (child,) = self.children
            assert self.vertex is not None and self.vertex not in child.bag
            assert self.bag == child.bag | {self.vertex}
        elif self.kind == "forget":
            (child,) = self.children
            assert self.vertex is not None and self.vertex in child.bag
            assert self.bag == child.bag - {self.vertex}
        elif self.kind == "join":
            first, second = self.children
            assert self.bag == first.bag == second.bag
        else:
            raise AssertionError(f"unknown node kind {self.kind}")


@dataclass(frozen=True)
class NiceTreeDecomposition:
    root: NiceNode

    def nodes(self) -> list[NiceNode]:
        """Post-order: children before parents."""
        out: list[NiceNode] = []
        stack: list[tuple[NiceNode, bool]] = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                out.append(node)
            else:
                stack.append((node, True))
                for child in node.children:
                    stack.append((child, False))
        return out


def _introduce_chain(base: NiceNode, vertices: Iterable[int]) -> NiceNode:
    node = base
    for v in sorted(vertices):
        node = NiceNode(kind="introduce", bag=node.bag | {v}, vertex=v, children=(node,))
    return node


def _forget_chain(base: NiceNode, vertices: Iterable[int]) -> NiceNode:
    node = base
    for v in sorted(vertices):
        node = NiceNode(kind="forget", bag=node.bag - {v}, vertex=v, children=(node,))
    return node


def make_nice(td: TreeDecomposition) -> NiceTreeDecomposition:
    """Normalize to leaf/introduce/forget/join nodes with an empty root bag.

    Rooted at the smallest bag id; every produced bag is a subset of some
    original bag, so the independence number cannot grow.
    """
    if not td.bags:
        return NiceTreeDecomposition(root=NiceNode(kind="leaf", bag=frozenset()))
    root_id = min(td.bags)
    neigh: dict[int, list[int]] = {i: [] for i in td.bags}
    for x, y in td.edges:
        neigh[x].append(y)
        neigh[y].append(x)

    def build(bag_id: int, parent: int | None) -> NiceNode:
        bag = td.bags[bag_id]
        children = [build(c, bag_id) for c in sorted(neigh[bag_id]) if c != parent]
        if not children:
            return _introduce_chain(NiceNode(kind="leaf", bag=frozenset()), bag)
        bridges = []
        for child in children:
            lowered = _forget_chain(child, child.bag - bag)
            bridges.append(_introduce_chain(lowered, bag - lowered.bag))
        node = bridges[0]
        for other in bridges[1:]:
            node = NiceNode(kind="join", bag=bag, children=(node, other))
        return node

    top = build(root_id, None)
    root = _forget_chain(top, top.bag)
    nice = NiceTreeDecomposition(root=root)
    for node in nice.nodes():
        node.check()
    return nice


def enumerate_bag_colorings(inst: ConflictInstance, bag: Iterable[int]) -> list[ColoringKey]:
    """All maps bag -> {0..k} whose positive classes are bag-independent.

    Returned tuples align with sorted(bag); deterministic lexicographic order.
    """
    vertices = sorted(bag)
    adj = inst.adjacency()
    out: list[ColoringKey] = []
    colors = [0] * len(vertices)

    def extend(i: int) -> None:
        if i == len(vertices):
            out.append(tuple(colors))
            return
        v = vertices[i]
        for c in range(inst.k + 1):
            if c > 0 and any(
                colors[j] == c for j, w in enumerate(vertices[:i]) if w in adj[v]
            ):
                continue
            colors[i] = c
            extend(i + 1)
        colors[i] = 0

    extend(0)
    return out


def tin_dp_node(
    node: NiceNode,
    child_tables: list[TinTable],
    inst: ConflictInstance,
    cap: int | None = None,
    prune: bool = False,
) -> TinTable:
    """Table of one nice node from its children's tables."""
    k = inst.k
    limit = DEFAULT_PROFILE_CAP if cap is None else cap

    def store(raw: dict[ColoringKey, set[Profile]]) -> TinTable:
        out: TinTable = {}
        for key, profiles in raw.items():
            if not profiles:
                continue
            if len(profiles) > limit:
                raise ProfileCapError(limit)
            pset = ProfileSet(k, profiles)
            out[key] = dominance_prune(pset) if prune else pset
        return out

    if node.kind == "leaf":
        return store({(): {(0,) * k}})

    if node.kind == "introduce":
        (child,) = child_tables
        v = node.vertex
        bag_sorted = sorted(node.bag)
        pos = bag_sorted.index(v)
        adj_v = inst.adjacency()[v]
        child_sorted = sorted(node.bag - {v})
        raw: dict[ColoringKey, set[Profile]] = {}
        for child_key, pset in child.items():
            for color in range(k + 1):
                if color > 0 and any(
                    child_key[i] == color for i, w in enumerate(child_sorted) if w in adj_v
                ):
                    continue
                key = child_key[:pos] + (color,) + child_key[pos:]
                if color == 0:
                    raw.setdefault(key, set()).update(pset)
                else:
                    p = inst.profits[color - 1][v]
                    raw.setdefault(key, set()).update(
                        q[: color - 1] + (q[color - 1] + p,) + q[color:] for q in pset
                    )
        return store(raw)

    if node.kind == "forget":
        (child,) = child_tables
        v = node.vertex
        child_sorted = sorted(node.bag | {v})
        pos = child_sorted.index(v)
        raw = {}
        for child_key, pset in child.items():
            key = child_key[:pos] + child_key[pos + 1 :]
            raw.setdefault(key, set()).update(pset)
        return store(raw)

    if node.kind == "join":
        first, second = child_tables
        bag_sorted = sorted(node.bag)
        raw = {}
        for key, set1 in first.items():
            set2 = second.get(key)
            if set2 is None:
                continue
            correction = [0] * k
            for v, color in zip(bag_sorted, key):
                if color > 0:
                    correction[color - 1] += inst.profits[color - 1][v]
            bucket = raw.setdefault(key, set())
            for q1 in set1:
                for q2 in set2:
                    bucket.add(tuple(a + b - w for a, b, w in zip(q1, q2, correction)))
        return store(raw)

    raise AssertionError(f"unknown node kind {node.kind}")


def _run_tables(
    inst: ConflictInstance,
    nice: NiceTreeDecomposition,
    cap: int | None,
    prune: bool,
    stats: dict,
) -> dict[int, TinTable]:
    tables: dict[int, TinTable] = {}
    for node in nice.nodes():
        children = [tables[id(c)] for c in node.children]
        table = tin_dp_node(node, children, inst, cap=cap, prune=prune)
        stats["dp-cells"] = stats.get("dp-cells", 0) + len(table)
        stats["profiles-stored"] = stats.get("profiles-stored", 0) + sum(
            len(s) for s in table.values()
        )
        tables[id(node)] = table
    return tables


def tin_profile_set(
    inst: ConflictInstance,
    td: TreeDecomposition,
    cap: int | None = None,
    stats: dict | None = None,
) -> ProfileSet:
    """Exact full profile set via the root's empty-bag cell."""
    stats = stats if stats is not None else {}
    validate_td(inst, td)
    nice = make_nice(td)
    tables = _run_tables(inst, nice, cap, False, stats)
    return tables[id(nice.root)][()]


def solve_tin(
    inst: ConflictInstance,
    td: TreeDecomposition,
    cap: int | None = None,
    prune: bool = False,
    stats: dict | None = None,
) -> tuple[int, Profile, Coloring]:
    """Optimum satisfaction level, profile, and a validated witness."""
    stats = stats if stats is not None else {}
    validate_td(inst, td)
    nice = make_nice(td)
    tables = _run_tables(inst, nice, cap, prune, stats)
    root_set = tables[id(nice.root)][()]
    optimum, profile = best_profile(root_set)

    color_of: dict[int, int] = {}

    def descend(node: NiceNode, key: ColoringKey, target: Profile) -> None:
        if node.kind == "leaf":
            return
        if node.kind == "introduce":
            v = node.vertex
            bag_sorted = sorted(node.bag)
            pos = bag_sorted.index(v)
            color = key[pos]
            child_key = key[:pos] + key[pos + 1 :]
            if color > 0:
                assert color_of.setdefault(v, color) == color
                p = inst.profits[color - 1][v]
                target = target[: color - 1] + (target[color - 1] - p,) + target[color:]
            descend(node.children[0], child_key, target)
            return
        if node.kind == "forget":
            v = node.vertex
            child_sorted = sorted(node.bag | {v})
            pos = child_sorted.index(v)
            child = tables[id(node.children[0])]
            for color in range(inst.k + 1):
                child_key = key[:pos] + (color,) + key[pos:]
                pset = child.get(child_key)
                if pset is not None and target in pset:
                    descend(node.children[0], child_key, target)
                    return
            raise AssertionError("forget decomposition lost the target profile")
        if node.kind == "join":
            first, second = node.children
            t1, t2 = tables[id(first)], tables[id(second)]
            bag_sorted = sorted(node.bag)
            correction = [0] * inst.k
            for v, color in zip(bag_sorted, key):
                if color > 0:
                    correction[color - 1] += inst.profits[color - 1][v]
            for q1 in sorted(t1[key]):
                q2 = tuple(t - a + w for t, a, w in zip(target, q1, correction))
                if all(x >= 0 for x in q2) and q2 in t2[key]:
                    descend(first, key, q1)
                    descend(second, key, q2)
                    return
            raise AssertionError("join decomposition lost the target profile")
        raise AssertionError(node.kind)

    descend(nice.root, (), profile)
    witness = tuple(
        frozenset(v for v, c in color_of.items() if c == j + 1) for j in range(inst.k)
    )
    validate_coloring(inst, witness)
    return optimum, profile, witness


def maximum_cardinality_search(inst: ConflictInstance) -> list[int]:
    """MCS visit order; its reverse is a perfect elimination order iff chordal."""
    adj = inst.adjacency()
    weight = [0] * inst.n
    visited = [False] * inst.n
    order = []
    for _ in range(inst.n):
        v = max(
            (x for x in range(inst.n) if not visited[x]),
            key=lambda x: (weight[x], -x),
        )
        visited[v] = True
        order.append(v)
        for w in adj[v]:
            if not visited[w]:
                weight[w] += 1
    return order


def clique_tree_of_chordal(inst: ConflictInstance) -> TreeDecomposition | None:
    """Clique-tree decomposition of a chordal instance, or None if not chordal.

    Bags are the maximal cliques, so every bag has independence number 1;
    the tree is a maximum-weight spanning tree of the clique intersection
    graph, which is a valid decomposition exactly for chordal graphs.
    """
    adj = inst.adjacency()
    order = maximum_cardinality_search(inst)
    position = {v: i for i, v in enumerate(order)}
    candidates: list[frozenset[int]] = []
    for v in order:
        earlier = frozenset(w for w in adj[v] if position[w] < position[v])
        for x in earlier:
            if not earlier - {x} <= adj[x]:
                return None
        candidates.append(earlier | {v})
    cliques: list[frozenset[int]] = []
    for cand in sorted(candidates, key=lambda c: (-len(c), sorted(c))):
        if not any(cand <= kept for kept in cliques):
            cliques.append(cand)
    cliques.sort(key=sorted)
    if not cliques:
        return TreeDecomposition(n=inst.n, bags={1: frozenset()}, edges=())
    bags = {i + 1: c for i, c in enumerate(cliques)}
    pairs = sorted(
        ((i, j) for i in bags for j in bags if i < j),
        key=lambda p: (-len(bags[p[0]] & bags[p[1]]), p),
    )
    parent = {i: i for i in bags}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j))
    return TreeDecomposition(n=inst.n, bags=bags, edges=tuple(edges))
