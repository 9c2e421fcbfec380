"""Constructive walk z -> w -> r -> y on the skeleton of P_FM with token accounting.

Every move is paid by exactly two half-tokens, owned by the nodes of V(G_w)
and the cycles of C_w, so the walk is never longer than potential(w).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core_model import (
    HALF, ONE, ZERO, Cycle, Edge, FracVertex, Graph, connected_components, cycle_edges, edge,
    potential,
)
from .moves import Move, apply_move, classify_structural, cycle_token, node_token
from .skeleton import is_adjacent_exact


class PathBuildError(RuntimeError):
    """A step the correctness argument says is always possible turned out impossible."""


def is_packed(cycle: Cycle, matching: Iterable[Edge]) -> bool:
    ms = matching if isinstance(matching, (set, frozenset)) else set(matching)
    return sum(1 for e in cycle_edges(cycle) if e in ms) == (len(cycle) - 1) // 2


def cycle_arcs(cycle: Cycle, marked: set[int]) -> list[tuple[int, ...]]:
    """Arcs of the cycle between cyclically consecutive marked nodes (endpoints included)."""
    k = len(cycle)
    pos = [i for i, a in enumerate(cycle) if a in marked]
    arcs = []
    for t, p in enumerate(pos):
        q = pos[(t + 1) % len(pos)]
        span = (q - p) % k or k
        arcs.append(tuple(cycle[(p + s) % k] for s in range(span + 1)))
    return arcs


def _orient(path: tuple[int, ...]) -> tuple[int, ...]:
    return path if path[0] <= path[-1] else path[::-1]


def path_edges(path: tuple[int, ...]) -> list[Edge]:
    return [edge(path[i], path[i + 1]) for i in range(len(path) - 1)]


def exposing_matching(cycle: Cycle, a: int) -> set[Edge]:
    """The perfect matching of cycle - a."""
    k, i = len(cycle), cycle.index(a)
    return {edge(cycle[(i + 2 * s + 1) % k], cycle[(i + 2 * s + 2) % k]) for s in range((k - 1) // 2)}


@dataclass
class TokenLedger:
    """Half-tokens of the walk. Ownership is fixed once w is known."""

    spent_nodes: set[int] = field(default_factory=set)
    spent_cycles: set[Cycle] = field(default_factory=set)
    spend_log: list[tuple[int, tuple]] = field(default_factory=list)
    owned_nodes: frozenset[int] | None = None
    owned_cycles: frozenset[Cycle] | None = None

    def spend(self, move_index: int, payers: tuple) -> None:
        if len(payers) != 2:
            raise PathBuildError(f"move {move_index} has {len(payers)} payers, expected 2")
        for kind, ref in payers:
            pool = self.spent_nodes if kind == "node" else self.spent_cycles
            if ref in pool:
                raise PathBuildError(f"token of {kind} {ref} spent twice (move {move_index})")
            if self.owned_nodes is not None:
                owned = self.owned_nodes if kind == "node" else self.owned_cycles
                if ref not in owned:
                    raise PathBuildError(f"{kind} {ref} owns no token (move {move_index})")
            pool.add(ref)
        self.spend_log.append((move_index, payers))

    def tokened(self, ell: FracVertex) -> frozenset[int]:
        """T(l): covered nodes whose token is still unspent."""
        base = ell.covered if self.owned_nodes is None else ell.covered & self.owned_nodes
        return frozenset(base - self.spent_nodes)


def tilde_matching(ell: FracVertex, tokened: frozenset[int]) -> set[Edge]:
    return {e for e in ell.matching if e[0] not in tokened and e[1] not in tokened}


@dataclass(frozen=True)
class WitnessEntry:
    u: int
    v: int
    q: tuple[int, ...]  # node sequence of Q(u, v); () for a single witness

    @property
    def single(self) -> bool:
        return self.u == self.v

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.u,) if self.single else (self.u, self.v)


@dataclass(frozen=True)
class TargetComponent:
    nodes: tuple[int, ...]  # path order from the smaller endpoint, or cycle order
    edges: frozenset[Edge]
    is_cycle: bool
    dangerous: bool


@dataclass(frozen=True)
class PathCertificate:
    z: FracVertex
    y: FracVertex
    bound: int
    phases: tuple[tuple[str, tuple[Move, ...]], ...]
    vertices: tuple[FracVertex, ...]
    cases: tuple[str | None, ...] = ()
    witnesses: tuple[tuple[Cycle, WitnessEntry], ...] = ()

    @property
    def moves(self) -> list[Move]:
        return [m for _, ms in self.phases for m in ms]

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def w(self) -> FracVertex:
        return self.vertices[len(self.phases[0][1])]

    @property
    def r(self) -> FracVertex:
        return self.vertices[len(self.phases[0][1]) + len(self.phases[1][1])]

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "phases": [{"name": n, "moves": [m.to_json() for m in ms]} for n, ms in self.phases],
            "vertices": [v.to_json() for v in self.vertices],
            "cases": list(self.cases),
            "witnesses": [{"cycle": list(c), "u": e.u, "v": e.v, "q": list(e.q)} for c, e in self.witnesses],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PathCertificate":
        verts = tuple(FracVertex.from_json(v) for v in obj["vertices"])
        if not verts:
            raise ValueError("certificate has no vertices")
        phases = tuple((ph["name"], tuple(Move.from_json(m) for m in ph["moves"])) for ph in obj["phases"])
        wit = tuple((tuple(d["cycle"]), WitnessEntry(d["u"], d["v"], tuple(d["q"])))
                    for d in obj.get("witnesses", ()))
        return cls(verts[0], verts[-1], int(obj["bound"]), phases, verts,
                   tuple(obj.get("cases", ())), wit)


class _Walk:
    def __init__(self, g: Graph, z: FracVertex, y: FracVertex, paranoid: bool):
        self.g, self.z, self.y = g, z, y
        self.ell = z
        self.paranoid = paranoid
        self.ledger = TokenLedger()
        self.vertices = [z]
        self.moves: list[Move] = []
        self.cases: list[str | None] = []
        self.ysupport_adj: dict[int, list[int]] = {}
        for a, b in y.values:
            self.ysupport_adj.setdefault(a, []).append(b)
            self.ysupport_adj.setdefault(b, []).append(a)
        self.witnesses: dict[Cycle, WitnessEntry] = {}
        self.targets: dict[Cycle, set[Edge]] = {}
        self.witness_of: dict[int, Cycle] = {}

    def move(self, label: str, deltas: dict[Edge, int], payers: tuple) -> None:
        nxt = apply_move(self.g, self.ell, Move(label, deltas, payers))
        if nxt == self.ell:
            raise PathBuildError(f"move {label} does not change the vertex")
        if self.paranoid and not is_adjacent_exact(self.g, self.ell, nxt):
            raise PathBuildError(f"move {label} at step {len(self.moves)} is not a skeleton edge")
        case = classify_structural(self.ell, nxt)
        self.ledger.spend(len(self.moves), payers)
        self.moves.append(Move(label, dict(deltas), payers))
        self.cases.append(case.tag if case else None)
        self.vertices.append(nxt)
        self.ell = nxt

    # --- phase 1 -------------------------------------------------------

    def find_critical_cycle(self) -> tuple[Cycle, tuple[int, ...]] | None:
        ell, tok = self.ell, self.ledger.tokened(self.ell)
        for c in self.y.cycles:
            if c in ell.cycle_set:
                continue
            marked = {a for a in c if a in tok}
            if len(marked) < 2:
                continue
            odd = [a for a in cycle_arcs(c, marked) if (len(a) - 1) % 2 == 1]
            if all(len(a) >= 4 and self._anchored(a[0], a[-1]) for a in odd):
                return c, min(_orient(a) for a in odd)
        return None

    def _anchored(self, a: int, b: int) -> bool:
        ell = self.ell
        if ell.mate.get(a) == b:
            return True
        ca = ell.cycle_of.get(a)
        return ca is not None and ca == ell.cycle_of.get(b)

    def step3_path(self) -> tuple[int, ...] | None:
        ell = self.ell
        mt = tilde_matching(ell, self.ledger.tokened(ell))
        tmate = {}
        for a, b in mt:
            tmate[a], tmate[b] = b, a
        found = []
        for s in sorted(self.ysupport_adj):
            if s in ell.covered:
                continue
            for first in self.ysupport_adj[s]:
                # G_y has maximum degree 2, so the alternating walk is forced
                path = [s, first]
                while True:
                    a = path[-1]
                    if a not in ell.covered:
                        if a != s:
                            found.append(tuple(path))
                        break
                    b = tmate.get(a)
                    if b is None or b in path or edge(a, b) not in self.y.values:
                        break
                    nxt = [c for c in self.ysupport_adj.get(b, ()) if c != a]
                    if not nxt or nxt[0] in path:
                        break
                    path += [b, nxt[0]]
        if not found:
            return None
        return min((len(p), _orient(p)) for p in found)[1]

    def step4_cycle(self) -> tuple[Cycle, int] | None:
        ell = self.ell
        for c in self.y.cycles:
            if c in ell.cycle_set or not is_packed(c, ell.matching_set):
                continue
            free = [a for a in c if a not in ell.covered]
            if free:
                return c, min(free)
        return None

    def run_algorithm1(self) -> None:
        while (found := self.find_critical_cycle()) is not None:
            _, p = found
            v1, vk = p[0], p[-1]
            if self.ell.mate.get(v1) == vk:
                self.move("▷", {edge(v1, p[1]): ONE, edge(vk, p[-2]): ONE, edge(v1, vk): ZERO},
                          (node_token(v1), node_token(p[1])))
                continue
            cbar = self.ell.cycle_of.get(v1)
            if cbar is None or cbar != self.ell.cycle_of.get(vk):
                raise PathBuildError(f"critical path {p} is not anchored")
            if cbar in self.y.cycle_set:
                raise PathBuildError(f"critical path {p} anchored only on cycle {cbar} of C_l and C_y")
            keep = exposing_matching(cbar, v1)
            deltas = {e: (ONE if e in keep else ZERO) for e in cycle_edges(cbar)}
            deltas[edge(v1, p[1])] = ONE
            self.move("◁", deltas, (node_token(v1), node_token(p[1])))

        while (p := self.step3_path()) is not None:
            mt = tilde_matching(self.ell, self.ledger.tokened(self.ell))
            deltas = {e: (ZERO if e in mt else ONE) for e in path_edges(p)}
            self.move("○", deltas, (node_token(p[0]), node_token(p[-1])))

        while (found4 := self.step4_cycle()) is not None:
            c, v = found4
            self.move("◇", {e: HALF for e in cycle_edges(c)}, (cycle_token(c), node_token(v)))

    def check_algorithm1_post(self) -> None:
        if self.find_critical_cycle() is not None:
            raise PathBuildError("critical cycle left at w")
        if self.step3_path() is not None:
            raise PathBuildError("augmenting path left at w")
        if self.step4_cycle() is not None:
            raise PathBuildError("packed cycle with uncovered node left at w")

    # --- witnesses and targets -------------------------------------------

    def build_good_witnesses(self) -> None:
        w, tok = self.ell, self.ledger.tokened(self.ell)
        mt = tilde_matching(w, tok)
        for c in self.y.cycles:
            if c in w.cycle_set:
                continue
            entry = None
            for e in cycle_edges(c):
                if e[0] in tok and e[1] in tok:
                    entry = WitnessEntry(e[0], e[1], e)
                    break
            if entry is None:
                marked = {a for a in c if a in tok}
                if not marked:
                    raise PathBuildError(f"cycle {c} has no tokened node at w")
                for arc in cycle_arcs(c, marked):
                    if (len(arc) - 1) % 2 == 0:
                        continue
                    if len(marked) == 1:
                        if is_packed(c, w.matching_set) and exposing_matching(c, arc[0]) <= w.matching_set:
                            entry = WitnessEntry(arc[0], arc[0], ())
                            break
                        continue
                    pe = path_edges(arc)
                    if not all((e in mt) == (i % 2 == 1) for i, e in enumerate(pe)):
                        continue
                    if len(pe) > 1 and self._same_support_component(w, arc[0], arc[-1]):
                        continue
                    a = _orient(arc)
                    entry = WitnessEntry(a[0], a[-1], a)
                    break
            if entry is None:
                raise PathBuildError(f"no witness for cycle {c}")
            self.witnesses[c] = entry
            for a in entry.nodes:
                self.witness_of[a] = c
        for c, entry in self.witnesses.items():
            self.targets[c] = build_target_matching(c, entry, w)

    @staticmethod
    def _same_support_component(w: FracVertex, a: int, b: int) -> bool:
        if w.mate.get(a) == b:
            return True
        ca = w.cycle_of.get(a)
        return ca is not None and ca == w.cycle_of.get(b)

    def is_witness_of_unborn(self, a: int) -> bool:
        c = self.witness_of.get(a)
        return c is not None and c not in self.ell.cycle_set

    def single_witness_cycle(self, a: int) -> Cycle | None:
        c = self.witness_of.get(a)
        if c is not None and c not in self.ell.cycle_set and self.witnesses[c].single:
            return c
        return None

    def target_graph(self) -> list[TargetComponent]:
        return target_graph(self.ell, self.y, self.targets, self.ledger.tokened(self.ell),
                            self.witness_of)

    # --- phase 2 -------------------------------------------------------

    def least_intersecting(self, c: Cycle, comps: list[TargetComponent]) -> tuple[int, ...]:
        where = {a: k for k, comp in enumerate(comps) for a in comp.nodes}
        best = None
        cset = set(c)
        for v in sorted(c):
            if v not in where:
                key, h = 1, (v,)
            else:
                comp = comps[where[v]]
                key = len(cset & set(comp.nodes))
                if comp.is_cycle:
                    h = None
                elif comp.nodes[0] == v:
                    h = comp.nodes
                elif comp.nodes[-1] == v:
                    h = comp.nodes[::-1]
                else:
                    h = None
            if h is not None and (best is None or key < best[0]):
                best = (key, h)
        if best is None or best[0] != 1:
            raise PathBuildError(f"no least-intersecting component meets {c} in one node")
        return best[1]

    def run_algorithm2(self) -> None:
        while True:
            left = [c for c in self.ell.cycles if c not in self.y.cycle_set]
            if not left:
                return
            c = left[0]
            h = self.least_intersecting(c, self.target_graph())
            v1, vk = h[0], h[-1]
            flip = {e: (ZERO if e in self.ell.matching_set else ONE) for e in path_edges(h)}
            keep = exposing_matching(c, v1)
            flip.update({e: (ONE if e in keep else ZERO) for e in cycle_edges(c)})
            cbar = self.single_witness_cycle(vk)
            if cbar is not None:
                flip.update({e: HALF for e in cycle_edges(cbar)})
                self.move("△", flip, (node_token(vk), cycle_token(c)))
                continue
            cbar = self.ell.cycle_of.get(vk)
            if cbar is not None and cbar != c and cbar not in self.y.cycle_set:
                keep2 = exposing_matching(cbar, vk)
                flip.update({e: (ONE if e in keep2 else ZERO) for e in cycle_edges(cbar)})
                self.move("▽", flip, (cycle_token(c), cycle_token(cbar)))
                continue
            tok = self.ledger.tokened(self.ell)
            payer = next((a for a in h if a in tok and a not in self.witness_of), None)
            if payer is None:
                raise PathBuildError(f"no non-witness tokened node on {h} to round {c}")
            self.move("□", flip, (node_token(payer), cycle_token(c)))

    # --- phase 3 -------------------------------------------------------

    def find_k_linking_path(self, comp: TargetComponent) -> tuple[tuple[int, ...], Cycle, Cycle, int, int]:
        """Return (P, C, C_bar, v, v_bar) with P an M_l-augmenting path crossing comp on {v, v_bar}."""
        ell, tok = self.ell, self.ledger.tokened(self.ell)
        for e in sorted(comp.edges & ell.matching_set):
            v, vb = e
            if v not in tok or vb not in tok:
                continue
            c, cb = self.witness_of.get(v), self.witness_of.get(vb)
            if c is None or cb is None or c == cb:
                continue
            p1 = self._walk_to_exposed(c, v)
            p2 = self._walk_to_exposed(cb, vb)
            if p1 is None or p2 is None:
                continue
            p = tuple(p1[::-1]) + tuple(p2)
            if self._is_k_linking(p, comp, c, cb, v, vb):
                return p, c, cb, v, vb
        raise PathBuildError(f"no K-linking path for component {comp.nodes}")

    def _walk_to_exposed(self, c: Cycle, v: int) -> list[int] | None:
        entry = self.witnesses[c]
        qedges = set(path_edges(entry.q))
        mc = self.targets[c]
        exposed = next(a for a in c if all(a not in f for f in mc))
        k, i = len(c), c.index(v)
        for step in (1, -1):
            if edge(v, c[(i + step) % k]) in qedges:
                continue
            seq = [v]
            j = i
            while seq[-1] != exposed:
                j = (j + step) % k
                seq.append(c[j])
                if len(seq) > k:
                    return None
            return seq
        return None

    def _is_k_linking(self, p, comp, c, cb, v, vb) -> bool:
        ell = self.ell
        pe = path_edges(p)
        if len(pe) % 2 == 0 or p[0] in ell.covered or p[-1] in ell.covered:
            return False
        if not all((e in ell.matching_set) == (i % 2 == 1) for i, e in enumerate(pe)):
            return False
        if set(pe) & comp.edges != {edge(v, vb)}:
            return False
        allowed = (set(cycle_edges(c)) - set(path_edges(self.witnesses[c].q))) | \
                  (set(cycle_edges(cb)) - set(path_edges(self.witnesses[cb].q)))
        return all(e == edge(v, vb) or e in allowed for e in pe)

    def run_algorithm3(self) -> None:
        while True:
            comps = self.target_graph()
            paths = [k for k in comps if not k.is_cycle]
            if not paths:
                break
            k = paths[0]
            tok = self.ledger.tokened(self.ell)
            idx = [i for i, a in enumerate(k.nodes) if a in tok]
            if len(idx) < 2:
                raise PathBuildError(f"path component {k.nodes} has fewer than two tokens")
            vi, vj = k.nodes[idx[0]], k.nodes[idx[-1]]
            deltas = {e: (ZERO if e in self.ell.matching_set else ONE) for e in k.edges}
            for a in (vi, vj):
                cyc = self.single_witness_cycle(a)
                if cyc is not None:
                    deltas.update({e: HALF for e in cycle_edges(cyc)})
            self.move("⊕", deltas, (node_token(vi), node_token(vj)))

        while True:
            comps = self.target_graph()
            safe = [k for k in comps if k.is_cycle and not k.dangerous]
            if not safe:
                break
            k = safe[0]
            tok = self.ledger.tokened(self.ell)
            payers = [a for a in k.nodes if a in tok and a not in self.witness_of]
            if len(payers) < 2:
                raise PathBuildError(f"safe cycle component {k.nodes} lacks two free tokens")
            a, b = sorted(payers)[:2]
            deltas = {e: (ZERO if e in self.ell.matching_set else ONE) for e in k.edges}
            self.move("⊖", deltas, (node_token(a), node_token(b)))

        while True:
            comps = self.target_graph()
            if not comps:
                break
            k = comps[0]
            if not (k.is_cycle and k.dangerous):
                raise PathBuildError(f"unexpected target component {k.nodes} in step 4")
            p, c, cb, v, vb = self.find_k_linking_path(k)
            u = self.witnesses[c].u if self.witnesses[c].v == v else self.witnesses[c].v
            ub = self.witnesses[cb].u if self.witnesses[cb].v == vb else self.witnesses[cb].v
            deltas = {e: (ZERO if e in self.ell.matching_set else ONE) for e in path_edges(p)}
            self.move("⊗", deltas, (node_token(u), node_token(v)))
            ce = set(cycle_edges(c)) | set(cycle_edges(cb))
            deltas = {}
            for e in k.edges:
                if e == edge(v, vb) or e in ce:
                    continue
                deltas[e] = ZERO if e in self.ell.matching_set else ONE
            deltas.update({e: HALF for e in ce})
            self.move("⊘", deltas, (node_token(ub), node_token(vb)))

        for c in self.y.cycles:
            if c in self.ell.cycle_set:
                continue
            entry = self.witnesses.get(c)
            if entry is None or entry.single:
                raise PathBuildError(f"cycle {c} reached the last step without a witness pair")
            self.move("⊙", {e: HALF for e in cycle_edges(c)},
                      (node_token(entry.u), node_token(entry.v)))


def build_target_matching(c: Cycle, entry: WitnessEntry, w: FracVertex) -> set[Edge]:
    """Maximum matching of c (one of |c| choices) compatible with the witness entry,
    maximising the overlap with M_w; ties go to the smallest exposed node."""
    qnodes = set(entry.q)
    qedges = set(path_edges(entry.q)) if entry.q else set()
    best = None
    for a in sorted(c):
        mc = exposing_matching(c, a)
        if entry.single:
            if a != entry.u:
                continue
        else:
            if a in qnodes or len(mc & qedges) * 2 != len(qnodes):
                continue
        key = -len(mc & w.matching_set)
        if best is None or key < best[0]:
            best = (key, mc)
    if best is None:
        raise PathBuildError(f"no target matching for cycle {c}")
    return best[1]


def target_graph(ell: FracVertex, y: FracVertex, targets: dict[Cycle, set[Edge]],
                 tokened: frozenset[int], witness_of: dict[int, Cycle]) -> list[TargetComponent]:
    """Components of M_l xor (M_y + target matchings of unborn cycles), tagged."""
    want = set(y.matching)
    for c, mc in targets.items():
        if c not in ell.cycle_set:
            want |= mc
    seen: set[int] = set()
    for a, b in want:
        if a in seen or b in seen:
            raise PathBuildError("target edges do not form a matching")
        seen |= {a, b}
    sym = want ^ ell.matching_set
    out = []
    for nodes, es in connected_components(sym):
        is_cycle = len(es) == len(nodes)
        order = _component_order(nodes, es, is_cycle)
        tok = [a for a in order if a in tokened]
        dangerous = all(witness_of.get(a) is not None and witness_of[a] not in ell.cycle_set for a in tok)
        out.append(TargetComponent(tuple(order), frozenset(es), is_cycle, dangerous))
    return out


def _component_order(nodes: list[int], es: list[Edge], is_cycle: bool) -> list[int]:
    nbrs: dict[int, list[int]] = {a: [] for a in nodes}
    for a, b in es:
        nbrs[a].append(b)
        nbrs[b].append(a)
    start = min(nodes) if is_cycle else min(a for a in nodes if len(nbrs[a]) == 1)
    order, prev = [start], None
    while len(order) < len(nodes):
        cur = order[-1]
        nxt = min(b for b in nbrs[cur] if b != prev)
        prev = cur
        order.append(nxt)
    return order


def build_path(g: Graph, z: FracVertex, y: FracVertex, paranoid: bool = True) -> PathCertificate:
    """Walk from z to y of length at most potential(w) for the intermediate vertex w."""
    walk = _Walk(g, z, y, paranoid)
    walk.run_algorithm1()
    if paranoid:
        walk.check_algorithm1_post()
    w = walk.ell
    walk.ledger.owned_nodes = w.covered
    walk.ledger.owned_cycles = w.cycle_set
    for kind, ref in (p for _, ps in walk.ledger.spend_log for p in ps):
        owned = w.covered if kind == "node" else w.cycle_set
        if ref not in owned:
            raise PathBuildError(f"{kind} {ref} paid during the first phase but owns no token at w")
    n1 = len(walk.moves)
    walk.build_good_witnesses()
    walk.run_algorithm2()
    n2 = len(walk.moves)
    walk.run_algorithm3()
    if walk.ell != y:
        raise PathBuildError(f"walk ended at {walk.ell}, not at {y}")
    bound = int(potential(w))
    if len(walk.moves) > bound:
        raise PathBuildError(f"walk of length {len(walk.moves)} exceeds bound {bound}")
    phases = (("z->w", tuple(walk.moves[:n1])), ("w->r", tuple(walk.moves[n1:n2])),
              ("r->y", tuple(walk.moves[n2:])))
    return PathCertificate(z, y, bound, phases, tuple(walk.vertices), tuple(walk.cases),
                           tuple(sorted(walk.witnesses.items())))
