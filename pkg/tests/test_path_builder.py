import dataclasses
import json
from pathlib import Path

import pytest
from hypothesis import given

from conftest import graph_with_vertices
from fmdiameter.audit import audit_certificate
from fmdiameter.core_model import FracVertex, Graph, complete_graph, cycle_graph, path_graph, potential
from fmdiameter.diameter import max_potential
from fmdiameter.moves import EXPECTED_CASES
from fmdiameter.path_builder import (
    PathCertificate, WitnessEntry, _Walk, build_path, build_target_matching, exposing_matching,
    target_graph,
)
from fmdiameter.skeleton import is_adjacent_exact

FIXTURES = Path(__file__).parent / "fixtures"
K3 = complete_graph(3)
ZERO = FracVertex()
HALF_K3 = FracVertex([], [(0, 1, 2)])


def labels(cert):
    return [m.label for m in cert.moves]


def test_same_vertex_gives_empty_walk():
    cert = build_path(K3, HALF_K3, HALF_K3)
    assert cert.length == 0 and cert.bound == potential(HALF_K3)


def test_k3_zero_to_half_cycle():
    cert = build_path(K3, ZERO, HALF_K3)
    assert cert.length == 2 and cert.bound == 2
    # the augmenting edge is taken first, then the triangle is born from it
    assert labels(cert) == ["○", "◇"]


def test_p3_single_augmentation():
    y = FracVertex([(0, 1)])
    cert = build_path(path_graph(3), ZERO, y)
    assert labels(cert) == ["○"] and cert.w == y


def test_safe_path_component_single_plus_move():
    cert = build_path(path_graph(3), FracVertex([(0, 1)]), FracVertex([(1, 2)]))
    assert cert.vertices[-1] == FracVertex([(1, 2)]) and cert.length == 1


def test_no_critical_cycle_without_cycles_in_y():
    walk = _Walk(K3, ZERO, FracVertex([(0, 1)]), paranoid=True)
    assert walk.find_critical_cycle() is None


PAW = Graph.from_edges(4, [(0, 3), (1, 2), (1, 3), (2, 3)])  # triangle 1-2-3 with a pendant at 3


def _witnesses(g, z, y):
    walk = _Walk(g, z, y, paranoid=True)
    walk.run_algorithm1()
    walk.build_good_witnesses()
    return walk.witnesses


def test_witness_pair_from_tokened_edge():
    wit = _witnesses(PAW, FracVertex([(0, 3), (1, 2)]), FracVertex([], [(1, 2, 3)]))
    assert wit == {(1, 2, 3): WitnessEntry(1, 2, (1, 2))}


def test_single_witness_on_packed_cycle():
    # after the first phase the triangle is packed by {1, 2} and only node 3 keeps a token
    wit = _witnesses(PAW, FracVertex([(0, 3)]), FracVertex([], [(1, 2, 3)]))
    assert wit == {(1, 2, 3): WitnessEntry(3, 3, ())}


def test_target_matching_triangle_pair():
    mc = build_target_matching((0, 1, 2), WitnessEntry(0, 1, (0, 1)), ZERO)
    assert mc == {(0, 1)}


def test_target_matching_single_witness_five_cycle():
    c = (0, 1, 2, 3, 4)
    mc = build_target_matching(c, WitnessEntry(2, 2, ()), FracVertex([(0, 1), (3, 4)]))
    assert mc == exposing_matching(c, 2) == {(0, 1), (3, 4)}


def test_exposing_matching():
    assert exposing_matching((0, 1, 2, 3, 4), 2) == {(3, 4), (0, 1)}


def test_target_graph_empty_at_y():
    y = FracVertex([(0, 1)])
    assert target_graph(y, y, {}, frozenset(), {}) == []


def test_target_graph_single_edge():
    (comp,) = target_graph(ZERO, FracVertex([(0, 1)]), {}, frozenset({0, 1}), {})
    assert comp.edges == {(0, 1)} and not comp.is_cycle and not comp.dangerous


def test_example_a_fixture():
    rec = json.loads((FIXTURES / "example_a.json").read_text())
    g = Graph.from_json(rec["graph"])
    z, y = FracVertex.from_json(rec["z"]), FracVertex.from_json(rec["y"])
    cert = build_path(g, z, y)
    assert cert.length <= 4 == rec["bound"]
    assert audit_certificate(g, cert) == []


@pytest.mark.parametrize("rec", json.loads((FIXTURES / "move_exemplars.json").read_text()),
                         ids=lambda r: "".join(r["labels"]))
def test_move_exemplars(rec):
    g = Graph.from_json(rec["graph"])
    z, y = FracVertex.from_json(rec["z"]), FracVertex.from_json(rec["y"])
    cert = build_path(g, z, y)
    assert labels(cert) == rec["labels"]
    assert audit_certificate(g, cert) == []
    for mv, tag in zip(cert.moves, cert.cases):
        assert tag in EXPECTED_CASES[mv.label]


def test_two_triangles_removed_by_one_move():
    rec = next(r for r in json.loads((FIXTURES / "move_exemplars.json").read_text()) if r["labels"] == ["▽"])
    g = Graph.from_json(rec["graph"])
    cert = build_path(g, FracVertex.from_json(rec["z"]), FracVertex.from_json(rec["y"]))
    (mv,) = cert.moves
    assert all(kind == "cycle" for kind, _ in mv.payers)


@given(graph_with_vertices(k=2, max_n=6))
def test_walk_properties(gzy):
    g, z, y = gzy
    cert = build_path(g, z, y, paranoid=True)
    assert cert.vertices[0] == z and cert.vertices[-1] == y
    assert cert.length <= potential(cert.w) <= max_potential(g)[0]
    for a, b in zip(cert.vertices, cert.vertices[1:]):
        assert is_adjacent_exact(g, a, b)
    for mv, tag in zip(cert.moves, cert.cases):
        assert tag in EXPECTED_CASES[mv.label]
    assert audit_certificate(g, cert) == []
    w_support = set(cert.w.values)
    assert w_support <= set(z.values) | set(y.values)


@given(graph_with_vertices(k=2, max_n=6))
def test_certificate_json_round_trip(gzy):
    g, z, y = gzy
    cert = build_path(g, z, y, paranoid=False)
    again = PathCertificate.from_json(json.loads(json.dumps(cert.to_json())))
    assert again == cert


# --- the auditor must notice tampering -------------------------------------

def _cert_with_witnesses():
    rec = next(r for r in json.loads((FIXTURES / "move_exemplars.json").read_text()) if r["labels"] == ["⊗", "⊘"])
    g = Graph.from_json(rec["graph"])
    return g, build_path(g, FracVertex.from_json(rec["z"]), FracVertex.from_json(rec["y"]))


def _replace_move(cert, index, **changes):
    phases, k = [], 0
    for name, ms in cert.phases:
        ms = list(ms)
        for j in range(len(ms)):
            if k == index:
                ms[j] = dataclasses.replace(ms[j], **changes)
            k += 1
        phases.append((name, tuple(ms)))
    return dataclasses.replace(cert, phases=tuple(phases))


def test_audit_flags_missing_payer():
    g, cert = _cert_with_witnesses()
    bad = _replace_move(cert, 0, payers=cert.moves[0].payers[:1])
    assert any("payers" in v for v in audit_certificate(g, bad))


def test_audit_flags_double_spend():
    g, cert = _cert_with_witnesses()
    bad = _replace_move(cert, 1, payers=cert.moves[0].payers)
    assert any("spent twice" in v for v in audit_certificate(g, bad))


def test_audit_flags_unowned_token():
    g, cert = _cert_with_witnesses()
    bad = _replace_move(cert, 0, payers=(("node", 0), ("cycle", (0, 1, 5))))
    assert any("owns no token" in v for v in audit_certificate(g, bad))


def test_audit_flags_wrong_endpoint_and_bound():
    g, cert = _cert_with_witnesses()
    assert any("does not end at y" in v for v in audit_certificate(g, dataclasses.replace(cert, y=ZERO)))
    assert any("bound" in v for v in audit_certificate(g, dataclasses.replace(cert, bound=1)))


def test_audit_flags_bad_witness():
    g, cert = _cert_with_witnesses()
    (c, e), *rest = cert.witnesses
    forged = ((c, WitnessEntry(e.u, e.u, ())),) + tuple(rest)
    assert audit_certificate(g, dataclasses.replace(cert, witnesses=forged))


def test_audit_flags_missing_witness():
    g, cert = _cert_with_witnesses()
    assert any("witness table" in v for v in audit_certificate(g, dataclasses.replace(cert, witnesses=cert.witnesses[1:])))


def test_audit_clean_on_c5():
    g = cycle_graph(5)
    cert = build_path(g, FracVertex([(0, 1), (2, 3)]), FracVertex([], [(0, 1, 2, 3, 4)]))
    assert audit_certificate(g, cert) == []


LONG_Q = Graph.from_edges(7, [(0, 2), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5),
                              (3, 4), (3, 6), (4, 5)])
LONG_Q_Z = FracVertex([(0, 5), (3, 6)])
LONG_Q_Y = FracVertex([], [(1, 4, 3, 2, 5)])


def test_witness_pair_with_three_edge_path():
    wit = _witnesses(LONG_Q, LONG_Q_Z, LONG_Q_Y)
    assert wit == {(1, 4, 3, 2, 5): WitnessEntry(3, 5, (3, 4, 1, 5))}
    cert = build_path(LONG_Q, LONG_Q_Z, LONG_Q_Y)
    assert audit_certificate(LONG_Q, cert) == []


def test_audit_flags_even_witness_path():
    cert = build_path(LONG_Q, LONG_Q_Z, LONG_Q_Y)
    forged = (((1, 4, 3, 2, 5), WitnessEntry(3, 1, (3, 4, 1))),)
    assert any("odd path" in v for v in audit_certificate(LONG_Q, dataclasses.replace(cert, witnesses=forged)))
