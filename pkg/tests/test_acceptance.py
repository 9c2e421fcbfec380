"""Acceptance criteria 1-8, one PASS/FAIL line each.

Criteria 1, 3 and 8 run over the whole corpus in-process. Criteria 2 and 4 are
quadratic in the skeleton size, so the in-process run covers every graph up to
6 nodes and a seeded sample of 7-node graphs. If results/corpus_seed0.jsonl
holds a finished sweep (scripts/run_corpus.py), its records are folded in and
the line says so. FMD_FULL=1 runs everything in-process instead.
"""

from __future__ import annotations

import itertools
import json
import os
import random
from fractions import Fraction
from pathlib import Path

import pytest

from fmdiameter.acceptance import CheckResult, naive_length, run_graph, sample_vertices
from fmdiameter.core_model import FracVertex, Graph, complete_graph, cycle_graph, disjoint_triangles, potential
from fmdiameter.corpus import corpus
from fmdiameter.diameter import max_potential
from fmdiameter.path_builder import build_path
from fmdiameter.reductions import (
    PitSolution, brute_force_pit, build_apx_gadget, l_reduction_chain,
    pit_decide_via_diameter, pit_solution_to_vertex, triangle_rounding,
)

ROOT = Path(__file__).resolve().parent.parent
SWEEP = ROOT / "results" / "corpus_seed0.jsonl"
FULL = os.environ.get("FMD_FULL") == "1"
SEED = 0
N7_SAMPLE = 12


def report(capsys, k: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


def failures(r: CheckResult) -> int:
    return len(r.failures) + r.extra.get("suppressed", 0)


@pytest.fixture(scope="session")
def graphs():
    return corpus(SEED)


@pytest.fixture(scope="session")
def in_process(graphs):
    """name -> {criterion: CheckResult} from this run."""
    rng = random.Random(SEED)
    n7 = [name for name, g in graphs if g.n == 7]
    pairwise = set(n7) if FULL else set(rng.sample(n7, N7_SAMPLE))
    out = {}
    for name, g in graphs:
        crit = (1, 3, 8) + ((2, 4) if g.n <= 6 or name in pairwise else ())
        out[name] = run_graph(g, crit)
    return out


@pytest.fixture(scope="session")
def sweep(graphs):
    """Finished sweep records keyed by name, or None."""
    if not SWEEP.exists():
        return None
    recs = {}
    for line in SWEEP.read_text().splitlines():
        if line.strip():
            rec = json.loads(line)
            recs[rec["name"]] = rec
    return recs if all(name in recs for name, _ in graphs) else None


def combined(k, graphs, in_process, sweep):
    """Criterion k over the corpus, preferring in-process results; returns (result, graphs covered, source)."""
    total = CheckResult()
    covered = 0
    for name, g in graphs:
        if k in in_process[name]:
            total.merge(in_process[name][k])
            covered += 1
        elif sweep is not None and str(k) in sweep[name]["results"]:
            total.merge(CheckResult.from_json(sweep[name]["results"][str(k)]))
            covered += 1
    source = "in-process" if sweep is None else f"in-process + {SWEEP.relative_to(ROOT)}"
    return total, covered, source


def eligible(graphs, k):
    return sum(1 for _, g in graphs if k in (1, 3, 8) or g.n <= 7)


def test_criterion_1_formula_equals_bfs(capsys, graphs, in_process):
    r, covered, _ = combined(1, graphs, in_process, None)
    report(capsys, 1, r.ok, f"{covered} graphs (996 atlas n<=7, 200 random n<=9), {failures(r)} mismatches")
    assert r.ok, r.failures


def test_criterion_2_walks(capsys, graphs, in_process, sweep):
    r, covered, source = combined(2, graphs, in_process, sweep)
    want = eligible(graphs, 2)
    scope = "all" if covered == want else f"{covered} of {want} (n<=6 exhaustive, {N7_SAMPLE} sampled n=7)"
    report(capsys, 2, r.ok, f"{scope} graphs, {r.checked} ordered pairs, {failures(r)} failures [{source}]")
    assert r.ok, r.failures


def test_criterion_3_lower_bound(capsys, graphs, in_process):
    r, covered, _ = combined(3, graphs, in_process, None)
    report(capsys, 3, r.ok, f"{covered} graphs, {r.checked} pairs, {failures(r)} violations")
    assert r.ok, r.failures


def test_criterion_4_structural_adjacency(capsys, graphs, in_process, sweep):
    r, covered, source = combined(4, graphs, in_process, sweep)
    verdicts = r.extra.get("verdicts", {})
    falsified = {k: v for k, v in verdicts.items() if k.endswith(":falsified")}
    # every other failure is a classified pair the rank test calls non-adjacent
    rank_bad = failures(r) - sum(falsified.values())
    undefined = sum(v for k, v in verdicts.items() if k.endswith(":undefined-coefficient"))
    want = eligible(graphs, 4)
    scope = "all" if covered == want else f"{covered} of {want}"
    report(capsys, 4, r.ok,
           f"{scope} graphs, {r.checked} classified pairs; rank test {'100%' if not rank_bad else f'{rank_bad} misses'}; "
           f"cost vectors falsified {falsified or 0}, undefined {undefined} [{source}]")
    assert r.ok, f"{failures(r)} failures, e.g. {r.failures[:3]}"


def test_criterion_5_example_a(capsys):
    fx = json.loads((ROOT / "tests" / "fixtures" / "example_a.json").read_text())
    g = Graph.from_edges(fx["graph"]["n"], fx["graph"]["edges"])
    z, y = FracVertex.from_json(fx["z"]), FracVertex.from_json(fx["y"])
    naive = naive_length(z, y)
    built = build_path(g, z, y, paranoid=True).length
    ok = naive >= 5 and built <= 4
    report(capsys, 5, ok, f"{g.n}-node union of 4 triangles: naive {naive} moves, build_path {built}")
    assert ok


def test_criterion_6_pit(capsys, graphs):
    checked, bad, yes, no = 0, [], 0, 0
    extra = [("2K3", disjoint_triangles(2)), ("C6", cycle_graph(6))]
    for name, g in [*((n, g) for n, g in graphs if g.n in (3, 6, 9)), *extra]:
        ans = pit_decide_via_diameter(g)
        truth = 3 * len(brute_force_pit(g)) == g.n
        checked += 1
        yes += truth
        no += not truth
        if ans.answer != truth:
            bad.append(name)
    two_k3 = pit_decide_via_diameter(disjoint_triangles(2)).answer
    c6 = pit_decide_via_diameter(cycle_graph(6)).answer
    ok = not bad and two_k3 and not c6
    report(capsys, 6, ok, f"{checked} graphs with |V| in {{3,6,9}} ({yes} yes, {no} no), {len(bad)} disagreements")
    assert ok, bad


GADGET_BASES = [("K3", complete_graph(3)), ("2K3", disjoint_triangles(2)), ("K4", complete_graph(4))]


def test_criterion_7_gadget_chain(capsys):
    lines, ok = [], True
    for name, g in GADGET_BASES:
        gg = build_apx_gadget(g)
        size_ok = gg.graph.n == 2 * g.n + 18 * gg.k_tot
        fwd_ok = True
        picks = []
        for r in range(len(gg.triangles) + 1):
            for pick in itertools.combinations(gg.triangles, r):
                if len({a for t in pick for a in t}) == 3 * r:
                    picks.append(pick)
                    x = pit_solution_to_vertex(gg, PitSolution(pick))
                    fwd_ok &= potential(x) == Fraction(gg.graph.n, 2) + 3 * gg.k_tot + r
        opt_gp, argmax = max_potential(gg.graph)
        opt_g = len(brute_force_pit(g))
        ws = sample_vertices(gg.graph, 100, SEED) + [argmax]
        ws += [pit_solution_to_vertex(gg, PitSolution(p)) for p in picks]
        round_ok = all(potential(triangle_rounding(gg, w)) == potential(w) for w in ws)
        chain_bad = 0
        tested = 0
        for w in ws:
            top = int(potential(w))
            for k_prime in sorted({0, top // 2, top}):
                tested += 1
                chain_bad += not l_reduction_chain(g, gg, w, k_prime, opt_gp=opt_gp, opt_g=opt_g).ok
        part = size_ok and fwd_ok and round_ok and not chain_bad
        ok &= part
        lines.append(f"{name}: |V'|={gg.graph.n} opt_G'={opt_gp} size {size_ok} forward {fwd_ok} "
                     f"rounding {round_ok} chain {tested - chain_bad}/{tested}")
    report(capsys, 7, ok, "; ".join(lines))
    assert ok


def test_criterion_8_drift(capsys, graphs, in_process):
    r, covered, _ = combined(8, graphs, in_process, None)
    report(capsys, 8, r.ok, f"{covered} graphs, {r.checked} skeleton edges, {failures(r)} with drift > 2")
    assert r.ok, r.failures
