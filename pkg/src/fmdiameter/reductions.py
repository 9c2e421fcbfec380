"""Partition-into-triangles reductions: the decision test and the APX gadget."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core_model import (
    HALF, ONE, ZERO, Cycle, Edge, FracVertex, Graph, cycle_edges, edge, potential,
    vertex_from_values,
)
from .diameter import max_potential

Triangle = tuple[int, int, int]

# the 18 gadget edges of one side, as pairs of labels; "u", "v", "z" are the
# triangle's own nodes and 1..9 the gadget nodes t1..t9
GADGET_EDGES = (
    ("u", 1), ("u", 2), (1, 2), ("v", 4), ("v", 5), (4, 5), ("z", 7), ("z", 8), (7, 8),
    (3, 1), (3, 2), (4, 6), (5, 6), (7, 9), (8, 9), (3, 6), (6, 9), (3, 9),
)
# inner node -> (its two arm nodes, its attachment label)
ARMS = {3: ((1, 2), "u"), 6: ((4, 5), "v"), 9: ((7, 8), "z")}


class ReductionError(RuntimeError):
    pass


def enumerate_triangles(g: Graph) -> list[Triangle]:
    out = []
    for u, v in g.edges:
        for w in sorted(g.adj[u] & g.adj[v]):
            if w > v:
                out.append((u, v, w))
    return sorted(out)


@dataclass(frozen=True)
class PitSolution:
    triangles: tuple[Triangle, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for t in self.triangles:
            if seen & set(t):
                raise ReductionError(f"triangles overlap at {sorted(seen & set(t))}")
            seen |= set(t)
        object.__setattr__(self, "triangles", tuple(sorted(tuple(sorted(t)) for t in self.triangles)))

    def __len__(self):
        return len(self.triangles)


def brute_force_pit(g: Graph) -> PitSolution:
    """Maximum set of node-disjoint triangles by exhaustive search."""
    tris = enumerate_triangles(g)
    best: list[Triangle] = []

    def rec(i, used, cur):
        nonlocal best
        if len(cur) + (len(tris) - i) <= len(best) or len(cur) + (g.n - len(used)) // 3 <= len(best):
            if len(cur) > len(best):
                best = list(cur)
            return
        if i == len(tris):
            if len(cur) > len(best):
                best = list(cur)
            return
        t = tris[i]
        if used.isdisjoint(t):
            cur.append(t)
            rec(i + 1, used | set(t), cur)
            cur.pop()
        rec(i + 1, used, cur)

    rec(0, frozenset(), [])
    return PitSolution(tuple(best))


def greedy_pit(g: Graph) -> PitSolution:
    used: set[int] = set()
    out = []
    for t in enumerate_triangles(g):
        if used.isdisjoint(t):
            out.append(t)
            used |= set(t)
    return PitSolution(tuple(out))


@dataclass(frozen=True)
class PitAnswer:
    answer: bool
    partition: PitSolution | None
    diameter: Fraction


def pit_decide_via_diameter(g: Graph) -> PitAnswer:
    """Yes iff the diameter equals 2|V|/3; the partition is read off the maximiser's cycles."""
    if g.n % 3 != 0:
        raise ValueError(f"node count {g.n} is not divisible by 3")
    val, x = max_potential(g)
    yes = val == Fraction(2 * g.n, 3)
    part = None
    if yes:
        if any(len(c) != 3 for c in x.cycles) or len(x.cycles) != g.n // 3:
            raise ReductionError("maximiser at 2|V|/3 is not a triangle partition")
        part = PitSolution(tuple(x.cycles))
    return PitAnswer(yes, part, val)


@dataclass(frozen=True)
class GadgetGraph:
    graph: Graph
    origin: tuple[tuple, ...]  # per node: ("original", v), ("mirror", v), ("gadget", t, i), ("mirror-gadget", t, i)
    triangles: tuple[Triangle, ...]
    base_n: int
    kept: tuple[int, ...]  # nodes of the input graph that survived stripping
    stripped: tuple[int, ...]

    @property
    def k_tot(self) -> int:
        return len(self.triangles)

    def node(self, side: int, label, t: int) -> int:
        """Node id for a label ("u"/"v"/"z" or 1..9) of triangle t on side 0 or 1."""
        if isinstance(label, str):
            v = self.triangles[t]["uvz".index(label)]
            return v if side == 0 else v + self.base_n
        return 2 * self.base_n + 18 * t + 9 * side + (label - 1)

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "origin": [list(o) for o in self.origin],
            "triangles": [list(t) for t in self.triangles],
            "stripped": list(self.stripped),
        }


def strip_triangle_free_nodes(g: Graph) -> tuple[Graph, list[int], list[int]]:
    """Drop nodes in no triangle, relabelling the rest in order; returns (graph, kept, stripped)."""
    on = {a for t in enumerate_triangles(g) for a in t}
    kept = [v for v in range(g.n) if v in on]
    stripped = [v for v in range(g.n) if v not in on]
    idx = {v: i for i, v in enumerate(kept)}
    es = [(idx[a], idx[b]) for a, b in g.edges if a in idx and b in idx]
    return Graph.from_edges(len(kept), es), kept, stripped


def build_apx_gadget(g: Graph) -> GadgetGraph:
    h, kept, stripped = strip_triangle_free_nodes(g)
    tris = enumerate_triangles(h)
    n = h.n
    total = 2 * n + 18 * len(tris)
    origin: list[tuple] = [("original", v) for v in range(n)] + [("mirror", v) for v in range(n)]
    origin += [None] * (18 * len(tris))
    es: list[Edge] = [(v, v + n) for v in range(n)]
    for ti, t in enumerate(tris):
        for side in (0, 1):
            base = 2 * n + 18 * ti + 9 * side
            for i in range(1, 10):
                origin[base + i - 1] = ("gadget" if side == 0 else "mirror-gadget", ti, i)

            def nid(label):
                if isinstance(label, str):
                    return t["uvz".index(label)] + side * n
                return base + label - 1

            es += [(nid(a), nid(b)) for a, b in GADGET_EDGES]
    gp = Graph.from_edges(total, es)
    return GadgetGraph(gp, tuple(origin), tuple(tris), n, tuple(kept), tuple(stripped))


def side_triangles(gg: GadgetGraph, t: int, side: int, selected: bool) -> list[Cycle]:
    node = lambda lab: gg.node(side, lab, t)
    if selected:
        groups = [("u", 1, 2), ("v", 4, 5), ("z", 7, 8), (3, 6, 9)]
    else:
        groups = [(1, 2, 3), (4, 5, 6), (7, 8, 9)]
    return [tuple(node(a) for a in grp) for grp in groups]


def pit_solution_to_vertex(gg: GadgetGraph, t_star: PitSolution) -> FracVertex:
    index = {t: i for i, t in enumerate(gg.triangles)}
    for t in t_star.triangles:
        if t not in index:
            raise ReductionError(f"{t} is not a triangle of the (stripped) graph")
    chosen = {index[t] for t in t_star.triangles}
    cycles = []
    for ti in range(gg.k_tot):
        for side in (0, 1):
            cycles += side_triangles(gg, ti, side, ti in chosen)
    covered = {a for t in t_star.triangles for a in t}
    mat = [(v, v + gg.base_n) for v in range(gg.base_n) if v not in covered]
    return FracVertex(mat, cycles)


def _inner_roles(gg: GadgetGraph) -> dict[int, tuple[int, int, int, tuple[int, int]]]:
    """inner gadget node -> (triangle, side, label, its two arm nodes)."""
    out = {}
    for ti in range(gg.k_tot):
        for side in (0, 1):
            for lab, (arms, _) in ARMS.items():
                out[gg.node(side, lab, ti)] = (ti, side, lab, (gg.node(side, arms[0], ti), gg.node(side, arms[1], ti)))
    return out


def _excise(cycle: Cycle, block: list[int]) -> list[int]:
    """Nodes of the path left after removing a run of consecutive cycle nodes."""
    k = len(cycle)
    pos = sorted(cycle.index(a) for a in block)
    # rotate so that the block sits at the end
    for start in range(k):
        run = [(start + s) % k for s in range(len(block))]
        if sorted(run) == pos:
            return [cycle[(start + len(block) + s) % k] for s in range(k - len(block))]
    raise ReductionError(f"{block} is not a consecutive run of {cycle}")


def _path_matching(path: list[int]) -> set[Edge]:
    return {edge(path[i], path[i + 1]) for i in range(0, len(path) - 1, 2)}


def triangle_rounding(gg: GadgetGraph, w: FracVertex, trace: list | None = None) -> FracVertex:
    """Replace non-triangle cycles one at a time, keeping the potential unchanged."""
    g = gg.graph
    roles = _inner_roles(gg)
    x = w
    while True:
        longs = [c for c in x.cycles if len(c) > 3]
        if not longs:
            return x
        c = longs[0]
        ce = set(cycle_edges(c))
        vals = dict(x.values)
        for e in ce:
            vals.pop(e, None)
        groups: dict[tuple[int, int], list[Edge]] = {}
        for e in sorted(ce):
            if e[0] in roles and e[1] in roles and roles[e[0]][:2] == roles[e[1]][:2]:
                groups.setdefault(roles[e[0]][:2], []).append(e)
        if not groups:
            raise ReductionError(f"cycle {list(c)} uses no inner gadget edge")
        # one gadget side at a time; two inner edges there means the excision case
        key = min(groups, key=lambda k: (len(groups[k]) < 2, k))
        inner_edges = groups[key]
        if len(inner_edges) >= 2:
            inner = sorted({a for e in inner_edges for a in e})
            rest = _excise(c, inner)
            new_tri = tuple(inner)
            kind = "inner"
        else:
            p, q = inner_edges[0]
            # q continues along the cycle to one of its arm nodes
            nb = [b for b in (c[(c.index(q) + 1) % len(c)], c[c.index(q) - 1]) if b != p][0]
            a1, a2 = roles[q][3] if nb == roles[q][3][0] else roles[q][3][::-1]
            if nb != a1:
                raise ReductionError(f"cycle {list(c)} leaves {q} off its arm")
            if edge(a1, a2) in ce:
                rest = _excise(c, [q, a1, a2])
                new_tri = (q, a1, a2)
                kind = "arm"
            else:
                if a2 in x.covered:
                    raise ReductionError(f"arm node {a2} is covered; no surgery applies to {list(c)}")
                rest = _excise(c, [a1])
                new_tri = None
                vals[edge(a1, a2)] = ONE
                kind = "reroute"
        for e in _path_matching(rest):
            vals[e] = ONE
        if new_tri is not None:
            for e in cycle_edges(new_tri):
                vals[e] = HALF
        nx = vertex_from_values(g, vals)
        if potential(nx) != potential(x):
            raise ReductionError(f"surgery {kind} on {list(c)} changed the potential")
        if trace is not None:
            trace.append((kind, c))
        x = nx


def count_side_triangles(gg: GadgetGraph, x: FracVertex) -> list[tuple[int, int]]:
    """Per original triangle, the number of x-triangles inside its gadget on each side."""
    out = []
    for ti in range(gg.k_tot):
        counts = []
        for side in (0, 1):
            pool = {gg.node(side, lab, ti) for lab in ("u", "v", "z", *range(1, 10))}
            counts.append(sum(1 for c in x.cycles if set(c) <= pool))
        out.append(tuple(counts))
    return out


def extract_triangles(gg: GadgetGraph, x: FracVertex) -> PitSolution:
    if any(len(c) != 3 for c in x.cycles):
        raise ReductionError("extract_triangles needs a triangle-only vertex")
    counts = count_side_triangles(gg, x)
    k1 = [ti for ti, (a, _) in enumerate(counts) if a == 4]
    k2 = [ti for ti, (_, b) in enumerate(counts) if b == 4]
    pick = k1 if len(k1) >= len(k2) else k2
    return PitSolution(tuple(gg.triangles[ti] for ti in pick))


@dataclass(frozen=True)
class LChain:
    opt_g: int
    opt_gp: Fraction
    k: int
    k_prime: int
    potential_w: Fraction
    potential_x: Fraction
    cycles_x: int
    holds: dict

    @property
    def ok(self) -> bool:
        return all(self.holds.values())

    def to_json(self) -> dict:
        return {
            "opt_G": self.opt_g, "opt_G_prime": str(self.opt_gp), "k": self.k, "k_prime": self.k_prime,
            "potential_w": str(self.potential_w), "potential_x": str(self.potential_x),
            "cycles_x": self.cycles_x, "checks": self.holds, "ok": self.ok,
        }


def l_reduction_chain(g: Graph, gg: GadgetGraph, w: FracVertex, k_prime: int,
                      opt_gp: Fraction | None = None, opt_g: int | None = None) -> LChain:
    """Check every inequality of the chain opt_G - k <= opt_G' - k' for one w."""
    if opt_g is None:
        h, _, _ = strip_triangle_free_nodes(g)
        opt_g = len(brute_force_pit(h))
    if opt_gp is None:
        opt_gp, _ = max_potential(gg.graph)
    x = triangle_rounding(gg, w)
    k = len(extract_triangles(gg, x))
    pw, px = potential(w), potential(x)
    holds = {
        "k_prime<=potential(w)": k_prime <= pw,
        "potential(x)=potential(w)": px == pw,
        "potential(x)>=k_prime": px >= k_prime,
        "|C_x|<=6k_tot+2k": len(x.cycles) <= 6 * gg.k_tot + 2 * k,
        "potential(w)<=opt_G'": pw <= opt_gp,
        "opt_G-k<=opt_G'-k_prime": opt_g - k <= opt_gp - k_prime,
    }
    return LChain(opt_g, opt_gp, k, k_prime, pw, px, len(x.cycles), holds)


def induced_triangle_check(g: Graph, tri: Triangle) -> bool:
    return all(g.has_edge(a, b) for a, b in combinations(tri, 2))
