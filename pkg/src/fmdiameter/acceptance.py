"""Per-graph checks behind the acceptance sweep.

Each check takes a graph (and its skeleton when one is needed) and returns a
CheckResult with a pair count and the failures found. Scripts, the `corpus`
CLI verb and tests/test_acceptance.py all call these same functions.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from itertools import product
from fractions import Fraction
from pathlib import Path

import numpy as np

from .audit import audit_certificate
from .core_model import FracVertex, Graph, LoopGraph, connected_components, cycle_edges, potential
from .corpus import corpus
from .diameter import cycle_diff_lower_bound, lifted_cycle_diff, max_potential
from .moves import certify_edge_by_costs, classify_structural, cost_vector
from .path_builder import build_path
from .skeleton import Skeleton, build_skeleton


@dataclass
class CheckResult:
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str, limit: int = 20) -> None:
        if len(self.failures) < limit:
            self.failures.append(msg)
        else:
            self.extra["suppressed"] = self.extra.get("suppressed", 0) + 1

    def merge(self, other: "CheckResult") -> None:
        self.checked += other.checked
        for f in other.failures:
            self.fail(f)
        for k, v in other.extra.items():
            if isinstance(v, int):
                self.extra[k] = self.extra.get(k, 0) + v
            elif isinstance(v, dict):
                bucket = self.extra.setdefault(k, {})
                for kk, vv in v.items():
                    bucket[kk] = bucket.get(kk, 0) + vv

    def to_json(self) -> dict:
        return {"checked": self.checked, "failures": self.failures, "extra": self.extra}

    @classmethod
    def from_json(cls, obj: dict) -> "CheckResult":
        return cls(obj["checked"], list(obj["failures"]), dict(obj["extra"]))


def check_formula(g: Graph, sk: Skeleton) -> CheckResult:
    """Max potential equals the BFS diameter of the skeleton."""
    res = CheckResult(1)
    val, _ = max_potential(g)
    bfs = max(max(sk.distances_from(i)) for i in range(len(sk.vertices)))
    if Fraction(bfs) != val:
        res.fail(f"formula {val} != bfs {bfs}")
    res.extra["agree"] = int(res.ok)
    return res


def check_walks(g: Graph, sk: Skeleton, sources: list[int] | None = None) -> CheckResult:
    """build_path on every ordered pair (optionally restricted to some sources)."""
    res = CheckResult()
    adj = [set(a) for a in sk.adjacency]
    idx = sk._index
    cases: dict[str, int] = {}
    for i in range(len(sk.vertices)) if sources is None else sources:
        z = sk.vertices[i]
        for y in sk.vertices:
            res.checked += 1
            try:
                cert = build_path(g, z, y, paranoid=False)
            except Exception as exc:  # noqa: BLE001 - every failure is a finding
                res.fail(f"{z} -> {y}: {type(exc).__name__}: {exc}")
                continue
            verts = cert.vertices
            for k in range(len(verts) - 1):
                if idx[verts[k + 1]] not in adj[idx[verts[k]]]:
                    res.fail(f"{z} -> {y}: step {k} is not a skeleton edge")
                    break
            if cert.length > potential(cert.w):
                res.fail(f"{z} -> {y}: length {cert.length} > potential(w)")
            for v in audit_certificate(g, cert):
                res.fail(f"{z} -> {y}: {v}")
                break
            for mv, tag in zip(cert.moves, cert.cases):
                key = f"{mv.label}{tag}"
                cases[key] = cases.get(key, 0) + 1
    res.extra["cases"] = cases
    return res


def check_lower_bound(g: Graph, sk: Skeleton) -> CheckResult:
    """Lifted cycle difference bound against BFS distance; tight for (0, argmax)."""
    res = CheckResult()
    verts = sk.vertices
    lg = LoopGraph(g)
    lifted = [lg.lift(v).odd_cycles for v in verts]
    for i in range(len(verts)):
        dist = sk.distances_from(i)
        for j in range(i + 1, len(verts)):
            res.checked += 1
            lb = math.ceil(len(lifted[i] ^ lifted[j]) / 2)
            if lb > dist[j]:
                res.fail(f"{verts[i]} / {verts[j]}: bound {lb} > distance {dist[j]}")
    val, best = max_potential(g)
    zero = next(v for v in verts if v.is_zero)
    if best != zero and Fraction(cycle_diff_lower_bound(g, zero, best)) != val:
        res.fail(f"bound at (0, {best}) is {cycle_diff_lower_bound(g, zero, best)}, potential {val}")
    return res


def check_drift(g: Graph, sk: Skeleton) -> CheckResult:
    """Every skeleton edge changes the lifted odd-cycle set by at most two."""
    res = CheckResult()
    for i, nbrs in enumerate(sk.adjacency):
        for j in nbrs:
            if j < i:
                continue
            res.checked += 1
            d = lifted_cycle_diff(g, sk.vertices[i], sk.vertices[j])
            if d > 2:
                res.fail(f"{sk.vertices[i]} / {sk.vertices[j]}: drift {d}")
    return res


def value_matrix(g: Graph, sk: Skeleton) -> np.ndarray:
    """Doubled edge values, one row per skeleton vertex."""
    col = g.edge_index
    mat = np.zeros((len(sk.vertices), g.m), dtype=np.int64)
    for i, v in enumerate(sk.vertices):
        for e, val in v.values.items():
            mat[i, col[e]] = val
    return mat


def check_structural(g: Graph, sk: Skeleton) -> CheckResult:
    """Classified pairs are skeleton edges and their cost vectors single them out."""
    res = CheckResult()
    verts = sk.vertices
    adj = [set(a) for a in sk.adjacency]
    mat = value_matrix(g, sk)
    verdicts: dict[str, int] = {}
    tags: dict[str, int] = {}
    res.extra["rank_misses"] = 0
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            case = classify_structural(verts[i], verts[j])
            if case is None:
                continue
            res.checked += 1
            tags[case.tag] = tags.get(case.tag, 0) + 1
            if j not in adj[i]:
                res.extra["rank_misses"] += 1
                res.fail(f"{verts[i]} / {verts[j]}: case {case.tag} but not adjacent")
            c = cost_vector(g, verts[i], verts[j], case)
            if c is None:
                verdict = "undefined-coefficient"
            else:
                verdict = _certify_vectorised(g, c, mat, i, j)
                if verdict == "falsified":
                    res.fail(f"{verts[i]} / {verts[j]}: case {case.tag} cost vector falsified")
            key = f"{case.tag}:{verdict}"
            verdicts[key] = verdicts.get(key, 0) + 1
    res.extra["verdicts"] = verdicts
    res.extra["tags"] = tags
    return res


def _certify_vectorised(g: Graph, c: dict, mat: np.ndarray, i: int, j: int) -> str:
    scale = math.lcm(*(q.denominator for q in c.values()))
    vec = np.array([int(c[e] * scale) for e in g.edges], dtype=np.int64)
    obj = mat @ vec
    top = obj.max()
    if obj[i] != top or obj[j] != top or int((obj == top).sum()) != 2:
        return "falsified"
    return "verified"


def certify_pair_slow(g: Graph, sk: Skeleton, i: int, j: int) -> str:
    """Reference path through Fraction arithmetic, used to cross-check the vectorised one."""
    case = classify_structural(sk.vertices[i], sk.vertices[j])
    return certify_edge_by_costs(g, sk.vertices[i], sk.vertices[j], case, list(sk.vertices)).verdict


def sample_vertices(g: Graph, count: int, seed: int, max_cycle_len: int = 15) -> list:
    """Seeded random vertices: disjoint odd cycles first, then a random matching on the rest."""
    import random

    import networkx as nx

    rng = random.Random(seed)
    G = nx.Graph(list(g.edges))
    G.add_nodes_from(range(g.n))
    odd = sorted(tuple(c) for c in nx.simple_cycles(G, length_bound=max_cycle_len) if len(c) % 2 == 1)
    out = []
    for _ in range(count):
        used: set[int] = set()
        cycles = []
        for c in rng.sample(odd, len(odd)):
            if used.isdisjoint(c) and rng.random() < 0.5:
                cycles.append(c)
                used |= set(c)
        mat = []
        for e in rng.sample(list(g.edges), g.m):
            if used.isdisjoint(e) and rng.random() < 0.7:
                mat.append(e)
                used |= set(e)
        out.append(FracVertex(mat, cycles))
    return out


def naive_length(z: FracVertex, y: FracVertex) -> int:
    """Fewest moves over every choice of roundings."""
    rz = [cycle_edges(c) for c in z.cycles]
    ry = [cycle_edges(c) for c in y.cycles]
    best = None
    for a in product(*rz):
        mz = set(z.matching) | set(a)
        for b in product(*ry):
            my = set(y.matching) | set(b)
            cost = len(z.cycles) + len(y.cycles) + len(connected_components(mz ^ my))
            best = cost if best is None else min(best, cost)
    return best


CHECKS = {
    1: ("formula", check_formula),
    2: ("walks", check_walks),
    3: ("lower-bound", check_lower_bound),
    4: ("structural", check_structural),
    8: ("drift", check_drift),
}

# walks and cost certification are quadratic in the vertex count: only small graphs
PAIRWISE_MAX_N = 7


def criteria_for(g: Graph, max_pairwise_n: int = PAIRWISE_MAX_N) -> tuple[int, ...]:
    return (1, 2, 3, 4, 8) if g.n <= max_pairwise_n else (1, 3, 8)


def run_graph(g: Graph, criteria=(1, 2, 3, 4, 8), walk_sources: list[int] | None = None) -> dict[int, CheckResult]:
    sk = build_skeleton(g)
    out = {}
    for k in criteria:
        _, fn = CHECKS[k]
        out[k] = fn(g, sk, walk_sources) if k == 2 else fn(g, sk)
    return out


def run_corpus(out_path: str | Path, seed: int = 0, max_n: int = 7, count: int = 200,
               max_pairwise_n: int = PAIRWISE_MAX_N, log=None) -> dict[int, CheckResult]:
    """Run every check over the corpus, appending one JSON line per graph.

    Graphs already present in out_path are not recomputed, so an interrupted
    run resumes where it stopped and a finished one is returned unchanged.
    """
    out_path = Path(out_path)
    done: dict[str, dict] = {}
    if out_path.exists():
        for line in out_path.read_text().splitlines():
            if line.strip():
                rec = json.loads(line)
                done[rec["name"]] = rec
    with out_path.open("a") as fh:
        for name, g in corpus(seed, max_n, count):
            if name in done:
                continue
            t0 = time.perf_counter()
            res = run_graph(g, criteria_for(g, max_pairwise_n))
            rec = {"name": name, "n": g.n, "m": g.m,
                   "results": {str(k): r.to_json() for k, r in res.items()},
                   "seconds": round(time.perf_counter() - t0, 3)}
            fh.write(json.dumps(rec) + "\n")
            fh.flush()
            done[name] = rec
            if log is not None:
                log(f"{name} n={g.n} {rec['seconds']}s")
    return summarise(done.values())


def summarise(records) -> dict[int, CheckResult]:
    total: dict[int, CheckResult] = {}
    for rec in records:
        for k, r in rec["results"].items():
            total.setdefault(int(k), CheckResult()).merge(CheckResult.from_json(r))
    return total

