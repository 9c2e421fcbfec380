"""Sufficient adjacency cases for P_FM, move application, cost-vector certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core_model import (
    HALF, ONE, ZERO, Cycle, Edge, FracVertex, Graph, connected_components, cycle_edges,
    diff_edges, vertex_from_values,
)

MOVE_LABELS = ("▷", "◁", "○", "◇", "△", "▽", "□", "⊕", "⊖", "⊗", "⊘", "⊙")

# ASCII names used in JSON and logs
LABEL_NAMES = {
    "▷": "rtri", "◁": "ltri", "○": "circ", "◇": "diamond",
    "△": "utri", "▽": "dtri", "□": "square",
    "⊕": "oplus", "⊖": "ominus", "⊗": "otimes", "⊘": "oslash", "⊙": "odot",
}

# which sufficient cases each move realises, per the correctness arguments of
# the three walk phases (⊘ added E: see notes in path_builder)
EXPECTED_CASES = {
    "▷": {"B"}, "○": {"B"},
    "◁": {"F", "C"}, "□": {"F", "C"},
    "◇": {"C"}, "⊙": {"C"},
    "△": {"D", "E"}, "▽": {"E"},
    "⊕": {"B", "E", "F"}, "⊖": {"A"}, "⊗": {"B"},
    "⊘": {"F", "C", "E"},
}


class IllegalMove(ValueError):
    pass


Token = tuple  # ("node", v) or ("cycle", cycle)


def node_token(v: int) -> Token:
    return ("node", v)


def cycle_token(c: Cycle) -> Token:
    return ("cycle", tuple(c))


@dataclass(frozen=True)
class Move:
    label: str
    edge_deltas: Mapping[Edge, int]
    payers: tuple[Token, ...] = ()

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "deltas": [[u, v, val] for (u, v), val in sorted(self.edge_deltas.items())],
            "payers": [[kind, ref if kind == "node" else list(ref)] for kind, ref in self.payers],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Move":
        deltas = {(min(u, v), max(u, v)): int(val) for u, v, val in obj["deltas"]}
        payers = tuple(
            ("node", int(ref)) if kind == "node" else ("cycle", tuple(int(a) for a in ref))
            for kind, ref in obj.get("payers", ()))
        return cls(obj["label"], deltas, payers)


def apply_move(g: Graph, x: FracVertex, mv: Move) -> FracVertex:
    """Return the canonical vertex obtained by overwriting x with mv.edge_deltas."""
    for e in mv.edge_deltas:
        if e not in g.edge_set:
            raise IllegalMove(f"move {mv.label} touches non-edge {e}")
    vals = dict(x.values)
    for e, val in mv.edge_deltas.items():
        if val == ZERO:
            vals.pop(e, None)
        else:
            vals[e] = val
    try:
        return vertex_from_values(g, vals)
    except ValueError as exc:
        raise IllegalMove(f"illegal move {mv.label}: {exc}") from exc


@dataclass(frozen=True)
class StructuralCase:
    tag: str
    component: tuple[Edge, ...]
    cycles: tuple[Cycle, ...] = ()
    path: tuple[Edge, ...] = ()
    cycle_owner: tuple[str, ...] = field(default=())


def _packed(cycle: Cycle, matching: frozenset[Edge]) -> bool:
    return sum(1 for e in cycle_edges(cycle) if e in matching) == (len(cycle) - 1) // 2


def _path_order(es: list[Edge]) -> list[int] | None:
    """Node sequence of a simple path given by its edges, or None."""
    deg: dict[int, list[int]] = {}
    for u, v in es:
        deg.setdefault(u, []).append(v)
        deg.setdefault(v, []).append(u)
    ends = sorted(a for a, ns in deg.items() if len(ns) == 1)
    if any(len(ns) > 2 for ns in deg.values()) or len(ends) != 2:
        return None
    seq, prev = [ends[0]], None
    while len(seq) <= len(es):
        cur = seq[-1]
        nxt = [b for b in deg[cur] if b != prev]
        if not nxt:
            break
        prev = cur
        seq.append(nxt[0])
    return seq if len(seq) == len(es) + 1 else None


def _is_even_cycle(es: list[Edge]) -> bool:
    deg: dict[int, int] = {}
    for u, v in es:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return len(es) % 2 == 0 and all(d == 2 for d in deg.values()) and len(connected_components(es)) == 1


def classify_structural(x: FracVertex, y: FracVertex) -> StructuralCase | None:
    """Match the difference x vs y against the six sufficient adjacency cases.

    Returns None when no case applies; that does not mean non-adjacent.
    """
    if x == y:
        return None
    comps = connected_components(diff_edges(x, y))
    if len(comps) != 1:
        return None
    _, kedges = comps[0]
    kset = set(kedges)

    involved: list[tuple[Cycle, str]] = []
    for owner, v, other in (("x", x, y), ("y", y, x)):
        for c in v.cycles:
            ce = set(cycle_edges(c))
            if ce & kset:
                if not ce <= kset or not _packed(c, other.matching_set):
                    return None
                involved.append((c, owner))
    cyc_edges = {e for c, _ in involved for e in cycle_edges(c)}
    half_in_k = {e for e in kset if x.value(e) == HALF or y.value(e) == HALF}
    if half_in_k != cyc_edges:
        return None
    pedges = sorted(kset - cyc_edges)
    for e in pedges:
        if {x.value(e), y.value(e)} != {ZERO, ONE}:
            return None
    cycles = tuple(c for c, _ in involved)
    owners = tuple(o for _, o in involved)

    if not involved:
        if _is_even_cycle(pedges):
            return StructuralCase("A", tuple(kedges), path=tuple(pedges))
        if _path_order(pedges) is not None:
            return StructuralCase("B", tuple(kedges), path=tuple(pedges))
        return None

    if len(involved) == 1:
        cnodes = set(cycles[0])
        if not pedges:
            return StructuralCase("C", tuple(kedges), cycles, cycle_owner=owners)
        seq = _path_order(pedges)
        if seq is None:
            return None
        on = [a for a in seq if a in cnodes]
        if len(on) == 1 and on[0] in (seq[0], seq[-1]):
            return StructuralCase("F", tuple(kedges), cycles, tuple(pedges), owners)
        return None

    if len(involved) == 2:
        c1, c2 = set(cycles[0]), set(cycles[1])
        shared = c1 & c2
        if not pedges:
            if len(shared) == 1 and owners[0] != owners[1]:
                return StructuralCase("D", tuple(kedges), cycles, cycle_owner=owners)
            return None
        if shared:
            return None
        seq = _path_order(pedges)
        if seq is None:
            return None
        inner = set(seq[1:-1])
        ends = {seq[0], seq[-1]}
        if inner & (c1 | c2):
            return None
        if len(ends & c1) == 1 and len(ends & c2) == 1:
            return StructuralCase("E", tuple(kedges), cycles, tuple(pedges), owners)
    return None


@dataclass(frozen=True)
class CostCertificate:
    costs: dict[Edge, Fraction]
    verdict: str  # "verified", "falsified", or "undefined-coefficient"
    optimum: Fraction | None = None
    detail: str = ""


def _objective(c: Mapping[Edge, Fraction], v: FracVertex) -> Fraction:
    return sum((c[e] * Fraction(val, 2) for e, val in v.values.items()), Fraction(0))


def cost_vector(g: Graph, z: FracVertex, y: FracVertex, case: StructuralCase) -> dict[Edge, Fraction] | None:
    """Cost vector making z and y the only optimal vertices; None if undefined."""
    kset = set(case.component)
    c: dict[Edge, Fraction] = {}
    for e in g.edges:
        if e not in kset:
            c[e] = Fraction(1) if z.value(e) > 0 else Fraction(-1)

    if case.tag in ("A", "D", "E"):
        for e in kset:
            c[e] = Fraction(1)
        return c

    if case.tag == "B":
        a, b = z, y
        if sum(1 for e in kset if e in a.matching_set) < sum(1 for e in kset if e in b.matching_set):
            a, b = b, a
        nb = sum(1 for e in kset if e in b.matching_set)
        na = sum(1 for e in kset if e in a.matching_set)
        for e in kset:
            c[e] = Fraction(1) if e in b.matching_set else Fraction(nb, na)
        return c

    # C and F: let `a` be the vertex owning the cycle, `b` the other one
    a, b = (z, y) if case.cycle_owner[0] == "x" else (y, z)
    cyc = case.cycles[0]
    cedges = set(cycle_edges(cyc))
    if case.tag == "C":
        nb = sum(1 for e in cedges if e in b.matching_set)
        for e in cedges:
            c[e] = Fraction(1) if e in b.matching_set else Fraction(2 * nb, len(cedges) + 1)
        return c

    pedges = set(case.path)
    na = sum(1 for e in pedges if e in a.matching_set)
    nb = sum(1 for e in pedges if e in b.matching_set)
    if nb == 0:
        return None
    for e in kset:
        if a.value(e) > 0:
            c[e] = Fraction(1)
        elif e in pedges and e in b.matching_set:
            c[e] = (na + Fraction(1, 2)) / nb
        else:
            c[e] = Fraction(1)
    return c


def certify_edge_by_costs(g: Graph, z: FracVertex, y: FracVertex, case: StructuralCase | None,
                          vertices: list[FracVertex] | None = None) -> CostCertificate:
    """Build the case's cost vector and check by enumeration that z, y are the unique optima."""
    if case is None:
        raise ValueError("no structural case: cost certification needs a classified pair")
    c = cost_vector(g, z, y, case)
    if c is None:
        return CostCertificate({}, "undefined-coefficient",
                               detail="case F coefficient divides by |M_y ∩ E(P)| = 0")
    if vertices is None:
        from .skeleton import enumerate_vertices
        vertices = enumerate_vertices(g)
    vz, vy = _objective(c, z), _objective(c, y)
    if vz != vy:
        return CostCertificate(c, "falsified", vz, f"c.z = {vz} != c.y = {vy}")
    for v in vertices:
        if v == z or v == y:
            continue
        val = _objective(c, v)
        if val >= vz:
            return CostCertificate(c, "falsified", vz, f"vertex {v} reaches {val} >= {vz}")
    return CostCertificate(c, "verified", vz)
