"""Graphs and exact half-integral vertices of the fractional matching polytope.

Edge values are stored doubled (0, 1, 2 stand for 0, 1/2, 1), so nothing in
the vertex model ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Edge = tuple[int, int]
Cycle = tuple[int, ...]

ZERO, HALF, ONE = 0, 1, 2


class StructuralError(ValueError):
    """Input that cannot even be read as a graph/vertex (bad indices, loops...)."""


class IllegalVertex(ValueError):
    """A value assignment that is not a vertex of the polytope."""


def edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def cycle_edges(cycle: Sequence[int]) -> list[Edge]:
    k = len(cycle)
    return [edge(cycle[i], cycle[(i + 1) % k]) for i in range(k)]


def canonical_cycle(nodes: Sequence[int]) -> Cycle:
    """Rotate to the minimum node, then orient toward its smaller neighbour."""
    nodes = list(nodes)
    if len(nodes) < 3:
        return tuple(nodes)
    i = nodes.index(min(nodes))
    rot = nodes[i:] + nodes[:i]
    if rot[-1] < rot[1]:
        rot = [rot[0]] + rot[:0:-1]
    return tuple(rot)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 0:
            raise StructuralError("negative node count")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise StructuralError(f"node index out of range in edge ({u}, {v})")
            if u == v:
                raise StructuralError(f"self-loop at node {u}")
            e = edge(u, v)
            if e in seen:
                raise StructuralError(f"duplicate edge ({e[0]}, {e[1]})")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(n, tuple((int(u), int(v)) for u, v in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return edge(u, v) in self.edge_set

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Graph":
        return cls.from_edges(obj["n"], obj["edges"])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def disjoint_triangles(k: int) -> Graph:
    es = []
    for t in range(k):
        a, b, c = 3 * t, 3 * t + 1, 3 * t + 2
        es += [(a, b), (b, c), (a, c)]
    return Graph.from_edges(3 * k, es)


@dataclass(frozen=True, order=True)
class FracVertex:
    """A vertex given by its value-1 edges and its value-1/2 odd cycles.

    Construction canonicalises (sorted matching, canonical cycles, sorted
    cycle list) but does not validate against a graph; see validate_vertex.
    Ordering is by (cycles, matching), which puts the zero vertex first.
    """

    cycles: tuple[Cycle, ...] = ()
    matching: tuple[Edge, ...] = ()

    def __init__(self, matching: Iterable[Sequence[int]] = (), cycles: Iterable[Sequence[int]] = ()):
        object.__setattr__(self, "matching", tuple(sorted(edge(int(u), int(v)) for u, v in matching)))
        object.__setattr__(self, "cycles", tuple(sorted(canonical_cycle([int(c) for c in cyc]) for cyc in cycles)))

    def __repr__(self):
        return f"FracVertex(matching={list(self.matching)}, cycles={list(self.cycles)})"

    @cached_property
    def cycle_set(self) -> frozenset[Cycle]:
        return frozenset(self.cycles)

    @cached_property
    def matching_set(self) -> frozenset[Edge]:
        return frozenset(self.matching)

    @cached_property
    def cycle_edge_set(self) -> frozenset[Edge]:
        return frozenset(e for c in self.cycles for e in cycle_edges(c))

    @cached_property
    def values(self) -> dict[Edge, int]:
        """Doubled edge values of the support."""
        vals = {e: ONE for e in self.matching}
        for e in self.cycle_edge_set:
            vals[e] = HALF
        return vals

    def value(self, e: Edge) -> int:
        return self.values.get(e, ZERO)

    @cached_property
    def mate(self) -> dict[int, int]:
        out = {}
        for u, v in self.matching:
            out[u] = v
            out[v] = u
        return out

    @cached_property
    def cycle_of(self) -> dict[int, Cycle]:
        return {v: c for c in self.cycles for v in c}

    @cached_property
    def covered(self) -> frozenset[int]:
        """V(G_x): nodes with x(delta(v)) = 1."""
        return frozenset(self.mate) | frozenset(self.cycle_of)

    @property
    def is_zero(self) -> bool:
        return not self.matching and not self.cycles

    def to_json(self) -> dict:
        return {"matching": [list(e) for e in self.matching], "cycles": [list(c) for c in self.cycles]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "FracVertex":
        return cls(obj.get("matching", ()), obj.get("cycles", ()))


ZERO_VERTEX = FracVertex()


def _half_edges_to_cycles(half: Iterable[Edge]) -> list[list[int]]:
    nbrs: dict[int, list[int]] = {}
    for u, v in half:
        nbrs.setdefault(u, []).append(v)
        nbrs.setdefault(v, []).append(u)
    for v, ns in nbrs.items():
        if len(ns) != 2:
            raise IllegalVertex(f"half-valued edges at node {v} do not form a cycle (degree {len(ns)})")
    cycles, seen = [], set()
    for start in sorted(nbrs):
        if start in seen:
            continue
        cyc, prev, cur = [start], None, start
        seen.add(start)
        while True:
            a, b = nbrs[cur]
            nxt = a if a != prev else b
            if nxt == start:
                break
            cyc.append(nxt)
            seen.add(nxt)
            prev, cur = cur, nxt
        cycles.append(cyc)
    return cycles


def vertex_from_values(g: Graph, values: Mapping[Edge, int]) -> FracVertex:
    """Build and validate the vertex with the given doubled edge values."""
    for e, val in values.items():
        if val not in (ZERO, HALF, ONE):
            raise IllegalVertex(f"edge {e} has doubled value {val}")
        if val and e not in g.edge_set:
            raise StructuralError(f"edge {e} not in graph")
    ones = [e for e, val in values.items() if val == ONE]
    half = [e for e, val in values.items() if val == HALF]
    v = FracVertex(ones, _half_edges_to_cycles(half))
    report = validate_vertex(g, v)
    if report is not None:
        raise IllegalVertex(report)
    return v


def validate_vertex(g: Graph, v: FracVertex) -> str | None:
    """Return None when v is a vertex of P_FM(g), else the first violation.

    Out-of-range node indices raise StructuralError instead.
    """
    for e in v.matching:
        for a in e:
            if not 0 <= a < g.n:
                raise StructuralError(f"node index {a} out of range")
    for c in v.cycles:
        for a in c:
            if not 0 <= a < g.n:
                raise StructuralError(f"node index {a} out of range")

    used: dict[int, Edge] = {}
    for e in v.matching:
        if e[0] == e[1]:
            return f"matching edge {e} is a loop"
        if e not in g.edge_set:
            return f"matching edge {e} not in graph"
        for a in e:
            if a in used:
                return f"matching edges {used[a]} and {e} share node {a}"
            used[a] = e

    on_cycle: dict[int, Cycle] = {}
    for c in v.cycles:
        if len(c) < 3:
            return f"cycle {list(c)} has fewer than 3 nodes"
        if len(set(c)) != len(c):
            return f"cycle {list(c)} repeats a node"
        if len(c) % 2 == 0:
            return f"even cycle {list(c)}"
        for e in cycle_edges(c):
            if e not in g.edge_set:
                return f"cycle edge {e} not in graph"
        for a in c:
            if a in on_cycle:
                return f"cycles {list(on_cycle[a])} and {list(c)} share node {a}"
            on_cycle[a] = c

    for a in sorted(set(used) & set(on_cycle)):
        return f"matching and cycle share node {a}"
    return None


def potential(v: FracVertex) -> Fraction:
    """1^T x + |C_x| / 2, exactly."""
    return len(v.matching) + Fraction(sum(len(c) for c in v.cycles) + len(v.cycles), 2)


def doubled_potential(v: FracVertex) -> int:
    return 2 * len(v.matching) + sum(len(c) + 1 for c in v.cycles)


@dataclass(frozen=True)
class DiffComponent:
    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]
    in_mx: frozenset[Edge]
    in_my: frozenset[Edge]
    in_cx: frozenset[Edge]
    in_cy: frozenset[Edge]


@dataclass(frozen=True)
class DiffGraph:
    graph: Graph
    components: tuple[DiffComponent, ...]


def diff_edges(x: FracVertex, y: FracVertex) -> set[Edge]:
    keys = set(x.values) | set(y.values)
    return {e for e in keys if x.value(e) != y.value(e)}


def connected_components(edges: Iterable[Edge]) -> list[tuple[list[int], list[Edge]]]:
    """Components of an edge set, as (sorted nodes, sorted edges), in order of min node."""
    parent: dict[int, int] = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = list(edges)
    for u, v in edges:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, tuple[list[int], list[Edge]]] = {}
    for a in parent:
        groups.setdefault(find(a), ([], []))[0].append(a)
    for e in edges:
        groups[find(e[0])][1].append(e)
    return [(sorted(ns), sorted(es)) for _, (ns, es) in sorted(groups.items())]


def diff_graph(g: Graph, x: FracVertex, y: FracVertex) -> DiffGraph:
    """G_x delta G_y with per-component membership tags."""
    for v in (x, y):
        rep = validate_vertex(g, v)
        if rep is not None:
            raise IllegalVertex(f"vertex not valid on this graph: {rep}")
    comps = []
    for nodes, es in connected_components(diff_edges(x, y)):
        s = frozenset(es)
        comps.append(DiffComponent(
            tuple(nodes), tuple(es),
            s & x.matching_set, s & y.matching_set,
            s & x.cycle_edge_set, s & y.cycle_edge_set,
        ))
    dg = Graph.from_edges(g.n, sorted(diff_edges(x, y)))
    return DiffGraph(dg, tuple(comps))


@dataclass(frozen=True)
class LiftedVertex:
    """A vertex of the loop-augmented polytope: slack of node v is the loop e_v.

    odd_cycles holds the real odd cycles plus a length-1 tuple (v,) for every
    loop carrying value 1 (i.e. every node the base vertex leaves uncovered).
    """

    base: FracVertex
    odd_cycles: frozenset[Cycle] = field(default_factory=frozenset)


@dataclass(frozen=True)
class LoopGraph:
    base: Graph

    @property
    def loops(self) -> tuple[int, ...]:
        return tuple(range(self.base.n))

    def lift(self, x: FracVertex) -> LiftedVertex:
        loops = {(v,) for v in range(self.base.n) if v not in x.covered}
        return LiftedVertex(x, frozenset(x.cycle_set | loops))

    def loop_value(self, x: FracVertex, v: int) -> int:
        """Doubled value of the loop e_v (the slack of node v)."""
        return ONE - sum(x.value(edge(v, u)) for u in self.base.adj[v])
