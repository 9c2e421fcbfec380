"""Closed-form diameter of P_FM (maximum potential) and the loop-lifted lower bound."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from .core_model import FracVertex, Graph, LoopGraph, potential
from .skeleton import MAX_SKELETON_N, SizeGuardError, bfs_diameter, enumerate_vertices

ENUM_BELOW_N = 10
MAX_BNB_N = 96


@dataclass(frozen=True)
class DiameterReport:
    formula_value: Fraction
    argmax_vertex: FracVertex
    bfs_value: int | None = None
    agreement: bool | None = None

    def to_json(self) -> dict:
        out = {"formula_value": str(self.formula_value), "argmax_vertex": self.argmax_vertex.to_json()}
        if self.bfs_value is not None:
            out["bfs_value"] = self.bfs_value
            out["agreement"] = self.agreement
        return out


def chordless_odd_cycles(g: Graph, order: list[int]) -> dict[int, list[tuple[int, ...]]]:
    """Induced odd cycles, keyed by their earliest node in `order`.

    Cycles with a chord are never needed: a chord splits an odd cycle into a
    shorter odd cycle and an even one, and the odd cycle plus a perfect
    matching of the leftover path has the same potential.
    """
    rank = {v: i for i, v in enumerate(order)}
    adj = g.adj
    out: dict[int, list[tuple[int, ...]]] = {v: [] for v in order}
    for s in order:
        rs = rank[s]
        stack = [(s, (s,))]
        while stack:
            cur, path = stack.pop()
            # a later node that sees s must close the cycle, else s has a chord
            closing = len(path) >= 3 and s in adj[cur]
            for nxt in adj[cur]:
                if rank[nxt] <= rs:
                    if nxt == s and len(path) >= 3 and len(path) % 2 == 1 and rank[path[1]] < rank[path[-1]]:
                        out[s].append(path)
                    continue
                if closing or nxt in path:
                    continue
                # chordless: nxt sees no path node except cur, and s only when closing
                if any(p in adj[nxt] for p in path[1:-1]):
                    continue
                stack.append((nxt, path + (nxt,)))
    return out


def _bnb_max(g: Graph) -> tuple[int, FracVertex]:
    """Exact maximum doubled potential by memoised branch-and-bound over free-node masks."""
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    cyc = chordless_odd_cycles(g, order)
    bit = {v: 1 << v for v in range(g.n)}
    nmask = [sum(bit[u] for u in g.adj[v]) for v in range(g.n)]
    cmask = {v: [(sum(bit[a] for a in c), c) for c in cs] for v, cs in cyc.items()}
    memo: dict[int, tuple[int, tuple]] = {}

    def ub(free: int) -> int:
        live = sum(1 for v in range(g.n) if free >> v & 1 and nmask[v] & free)
        return (4 * live) // 3

    def components(f: int) -> list[int]:
        out = []
        while f:
            low = f & -f
            comp, frontier = low, low
            while frontier:
                b = frontier & -frontier
                frontier &= ~b
                grow = nmask[b.bit_length() - 1] & f & ~comp
                comp |= grow
                frontier |= grow
            out.append(comp)
            f &= ~comp
        return out

    def solve(free: int) -> tuple[int, tuple]:
        # drop nodes with no free neighbour: they can only stay uncovered
        f = free
        for v in range(g.n):
            if f >> v & 1 and not nmask[v] & f:
                f &= ~bit[v]
        if not f:
            return 0, ()
        hit = memo.get(f)
        if hit is not None:
            return hit
        parts = components(f)
        if len(parts) > 1:
            val, choice = 0, ()
            for part in parts:
                pv, pc = solve(part)
                val, choice = val + pv, choice + pc
            memo[f] = (val, choice)
            return val, choice
        v = next(u for u in order if f >> u & 1)
        best = (-1, ())
        for gain, used, piece in _options(v, f) + [(0, bit[v], None)]:
            r = f & ~used
            if gain + ub(r) <= best[0]:
                continue
            val, choice = solve(r)
            if gain + val > best[0]:
                best = (gain + val, choice if piece is None else (piece,) + choice)
        memo[f] = best
        return best

    def _options(v, f):
        opts = []
        for mask, c in cmask[v]:
            if mask & f == mask:
                opts.append((len(c) + 1, mask, ("c", c)))
        for u in sorted(g.adj[v]):
            if f >> u & 1:
                opts.append((2, bit[v] | bit[u], ("m", (v, u))))
        opts.sort(key=lambda t: -t[0] / bin(t[1]).count("1"))
        return opts

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * g.n + 100))
    try:
        val, choice = solve((1 << g.n) - 1)
    finally:
        sys.setrecursionlimit(old)
    mat = [p for k, p in choice if k == "m"]
    cycles = [p for k, p in choice if k == "c"]
    return val, FracVertex(mat, cycles)


def max_potential(g: Graph, max_n: int = MAX_BNB_N, method: str = "auto") -> tuple[Fraction, FracVertex]:
    """max over vertices of 1^T x + |C_x|/2, with the smallest maximiser when enumerating."""
    if g.n > max_n:
        raise SizeGuardError(f"refusing exact potential maximisation for n={g.n} > {max_n}")
    if method == "enumerate" or (method == "auto" and g.n < ENUM_BELOW_N):
        # max() keeps the first maximiser, and enumeration is in canonical order
        best = max(enumerate_vertices(g), key=potential)
        return potential(best), best
    val, x = _bnb_max(g)
    return Fraction(val, 2), x


def diameter(g: Graph, cross_check: bool = False, max_n: int = MAX_BNB_N) -> DiameterReport:
    val, x = max_potential(g, max_n=max_n)
    if not cross_check:
        return DiameterReport(val, x)
    bfs, _ = bfs_diameter(g, max_n=MAX_SKELETON_N)
    return DiameterReport(val, x, bfs, Fraction(bfs) == val)


def lifted_cycle_diff(g: Graph, x: FracVertex, y: FracVertex) -> int:
    """|C-bar_x delta C-bar_y| on the loop-augmented graph (loops count as unit cycles)."""
    lg = LoopGraph(g)
    return len(lg.lift(x).odd_cycles ^ lg.lift(y).odd_cycles)


def cycle_diff_lower_bound(g: Graph, x: FracVertex, y: FracVertex) -> int:
    """Skeleton-distance lower bound: each move changes the lifted cycle set by at most 2."""
    return math.ceil(lifted_cycle_diff(g, x, y) / 2)
