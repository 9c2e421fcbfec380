"""Brute-force ground truth: vertex enumeration, exact adjacency, BFS diameter."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .core_model import ONE, ZERO, FracVertex, Graph, Cycle, Edge, edge
from .linalg import integer_rank

MAX_ENUM_N = 12
MAX_SKELETON_N = 9


class SizeGuardError(RuntimeError):
    pass


def odd_cycles(g: Graph) -> list[Cycle]:
    """All simple odd cycles of g in canonical form, sorted."""
    return [c for c in simple_cycles(g) if len(c) % 2 == 1]


def simple_cycles(g: Graph) -> list[Cycle]:
    return list(_simple_cycles_cached(g))


@lru_cache(maxsize=64)
def _simple_cycles_cached(g: Graph) -> tuple[Cycle, ...]:
    out = []
    adj = g.adj
    for s in range(g.n):
        # cycles whose minimum node is s; orientation fixed by path[1] < path[-1]
        stack = [(s, [s], {s})]
        while stack:
            cur, path, seen = stack.pop()
            for nxt in adj[cur]:
                if nxt == s and len(path) >= 3 and path[1] < path[-1]:
                    out.append(tuple(path))
                elif nxt > s and nxt not in seen:
                    stack.append((nxt, path + [nxt], seen | {nxt}))
    return tuple(sorted(out))


def _matchings(g: Graph, allowed: frozenset[int]) -> list[tuple[Edge, ...]]:
    es = [e for e in g.edges if e[0] in allowed and e[1] in allowed]
    out: list[tuple[Edge, ...]] = []

    def rec(i, used, cur):
        if i == len(es):
            out.append(tuple(cur))
            return
        rec(i + 1, used, cur)
        u, v = es[i]
        if u not in used and v not in used:
            cur.append(es[i])
            rec(i + 1, used | {u, v}, cur)
            cur.pop()

    rec(0, frozenset(), [])
    return out


def estimate_vertex_count(g: Graph) -> int:
    """Cheap upper bound on the number of matchings times cycle families."""
    return sum(comb(g.m, k) for k in range(g.n // 2 + 1)) * (1 + g.m) ** max(1, g.n // 3)


def enumerate_vertices(g: Graph, max_n: int = MAX_ENUM_N) -> list[FracVertex]:
    """Every vertex of P_FM(g): node-disjoint (matching, odd-cycle family) pairs."""
    if g.n > max_n:
        raise SizeGuardError(
            f"refusing to enumerate vertices for n={g.n} > {max_n} "
            f"(rough count estimate {estimate_vertex_count(g):.3g})")
    return list(_enumerate_cached(g))


@lru_cache(maxsize=256)
def _enumerate_cached(g: Graph) -> tuple[FracVertex, ...]:
    cycles = odd_cycles(g)
    families: list[tuple[Cycle, ...]] = []

    def rec(i, used, cur):
        families.append(tuple(cur))
        for j in range(i, len(cycles)):
            c = cycles[j]
            if used.isdisjoint(c):
                cur.append(c)
                rec(j + 1, used | set(c), cur)
                cur.pop()

    rec(0, frozenset(), [])
    allnodes = frozenset(range(g.n))
    out = []
    for fam in families:
        free = allnodes - {v for c in fam for v in c}
        for mat in _matchings(g, free):
            out.append(FracVertex(mat, fam))
    return tuple(sorted(out))


def tight_constraint_rows(g: Graph, x: FracVertex, y: FracVertex) -> list[list[int]]:
    """Rows of the P_FM constraint matrix tight at both x and y."""
    rows = []
    both = x.covered & y.covered
    for v in sorted(both):
        rows.append([1 if v in e else 0 for e in g.edges])
    for j, e in enumerate(g.edges):
        if x.value(e) == ZERO and y.value(e) == ZERO:
            r = [0] * g.m
            r[j] = 1
            rows.append(r)
    return rows


def is_adjacent_exact(g: Graph, x: FracVertex, y: FracVertex) -> bool:
    """x, y adjacent iff the constraints tight at both have rank m - 1.

    P_FM is full-dimensional, so this is the whole criterion. The unit rows of
    the edges zero in both vertices are eliminated first (each pivots its own
    column); Bareiss elimination finishes on the node rows restricted to the
    remaining columns.
    """
    if x == y:
        raise ValueError("identical vertices")
    support = sorted(set(x.values) | set(y.values))
    nzero = g.m - len(support)
    both = sorted(x.covered & y.covered)
    rows = [[1 if v in e else 0 for e in support] for v in both]
    return nzero + integer_rank(rows) == g.m - 1


def is_adjacent_full_matrix(g: Graph, x: FracVertex, y: FracVertex) -> bool:
    """Same test on the unreduced tight-constraint matrix (slower, for checking)."""
    if x == y:
        raise ValueError("identical vertices")
    return integer_rank(tight_constraint_rows(g, x, y)) == g.m - 1


@dataclass(frozen=True)
class Skeleton:
    vertices: tuple[FracVertex, ...]
    adjacency: tuple[tuple[int, ...], ...]

    def index(self, v: FracVertex) -> int:
        return self._index[v]

    @property
    def _index(self) -> dict[FracVertex, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {v: i for i, v in enumerate(self.vertices)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def distances_from(self, i: int) -> list[int]:
        dist = [-1] * len(self.vertices)
        dist[i] = 0
        q = deque([i])
        while q:
            a = q.popleft()
            for b in self.adjacency[a]:
                if dist[b] < 0:
                    dist[b] = dist[a] + 1
                    q.append(b)
        return dist

    def distance(self, x: FracVertex, y: FracVertex) -> int:
        return self.distances_from(self.index(x))[self.index(y)]


def build_skeleton(g: Graph, max_n: int = MAX_SKELETON_N) -> Skeleton:
    if g.n > max_n:
        raise SizeGuardError(f"refusing to build the skeleton for n={g.n} > {max_n}")
    return _skeleton_cached(g)


@lru_cache(maxsize=32)
def _skeleton_cached(g: Graph) -> Skeleton:
    verts = enumerate_vertices(g, max_n=max(g.n, MAX_ENUM_N))
    adj: list[list[int]] = [[] for _ in verts]
    for i in range(len(verts)):
        x = verts[i]
        for j in range(i + 1, len(verts)):
            if _adjacent_fast(g, x, verts[j]):
                adj[i].append(j)
                adj[j].append(i)
    return Skeleton(tuple(verts), tuple(tuple(a) for a in adj))


def _adjacent_fast(g: Graph, x: FracVertex, y: FracVertex) -> bool:
    return is_adjacent_exact(g, x, y)


def bfs_diameter(g: Graph, max_n: int = MAX_SKELETON_N) -> tuple[int, tuple[FracVertex, FracVertex]]:
    """Exact combinatorial diameter of P_FM(g) by all-pairs BFS, plus one extremal pair."""
    sk = build_skeleton(g, max_n=max_n)
    best, pair = 0, (sk.vertices[0], sk.vertices[0])
    for i in range(len(sk.vertices)):
        dist = sk.distances_from(i)
        if min(dist) < 0:
            raise RuntimeError("skeleton is disconnected")
        j = max(range(len(dist)), key=lambda k: (dist[k], -k))
        if dist[j] > best:
            best, pair = dist[j], (sk.vertices[i], sk.vertices[j])
    return best, pair
