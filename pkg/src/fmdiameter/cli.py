"""Command-line front end: `fmdiameter <verb> --graph g.json ...`.

Every verb prints one JSON object (or writes it to --out). Exit codes:
0 computed or verified, 1 a checked property failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .core_model import FracVertex, Graph, edge, potential, validate_vertex
from .skeleton import MAX_ENUM_N, MAX_SKELETON_N, SizeGuardError, build_skeleton, bfs_diameter, \
    enumerate_vertices, is_adjacent_exact


class InputError(ValueError):
    """Bad input file; reported on stderr with exit code 2."""


_PAIR = re.compile(r"\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


def _load_json(path) -> tuple[str, object]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return text, json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: malformed JSON ({exc.msg})") from exc


def _edge_lines(text: str) -> list[int]:
    """Line number of each [u, v] pair after the "edges" key, in order."""
    start = text.find('"edges"')
    if start < 0:
        return []
    return [text.count("\n", 0, m.start()) + 1 for m in _PAIR.finditer(text, start)]


def parse_graph_text(text: str, obj, source: str = "<graph>") -> Graph:
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise InputError(f"{source}: expected an object with keys n and edges")
    n = obj["n"]
    if not isinstance(n, int) or n < 0:
        raise InputError(f"{source}: n must be a non-negative integer")
    lines = _edge_lines(text)
    seen: dict = {}
    for k, pair in enumerate(obj["edges"]):
        where = f"{source}:{lines[k]}" if k < len(lines) else f"{source}: edge #{k}"
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(a, int) for a in pair)):
            raise InputError(f"{where}: edge #{k} is not a pair of integers")
        u, v = pair
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"{where}: edge #{k} [{u}, {v}] index out of range for n={n}")
        if u == v:
            raise InputError(f"{where}: edge #{k} [{u}, {v}] is a self-loop")
        e = edge(u, v)
        if e in seen:
            raise InputError(f"{where}: edge #{k} [{u}, {v}] is a duplicate edge (first seen as #{seen[e]})")
        seen[e] = k
    return Graph.from_edges(n, obj["edges"])


def parse_graph_file(path) -> Graph:
    text, obj = _load_json(path)
    return parse_graph_text(text, obj, str(path))


def parse_vertex_file(path, g: Graph) -> FracVertex:
    _, obj = _load_json(path)
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a vertex object with matching and cycles")
    try:
        v = FracVertex.from_json(obj)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    problem = validate_vertex(g, v)
    if problem:
        raise InputError(f"{path}: not a vertex of P_FM: {problem}")
    return v


def verify_cert(g: Graph, obj: dict) -> list[dict]:
    """Replay a path certificate; one entry per check, failures carry a reason."""
    from .audit import audit_certificate
    from .moves import IllegalMove, apply_move
    from .path_builder import PathCertificate

    checks: list[dict] = []

    def record(name, ok, detail=""):
        checks.append({"check": name, "ok": bool(ok), **({"detail": detail} if detail else {})})

    cert = PathCertificate.from_json(obj)
    verts, moves = cert.vertices, cert.moves
    if len(moves) != len(verts) - 1:
        record("shape", False, f"{len(moves)} moves for {len(verts)} vertices")
        return checks
    for i, v in enumerate(verts):
        problem = validate_vertex(g, v)
        if problem:
            record("vertex", False, f"vertex {i} invalid: {problem}")
    for i, mv in enumerate(moves):
        try:
            nxt = apply_move(g, verts[i], mv)
        except IllegalMove as exc:
            record("replay", False, f"move {i}: {exc}")
            continue
        if nxt != verts[i + 1]:
            record("replay", False, f"move {i} does not lead to vertex {i + 1}")
    for i in range(len(verts) - 1):
        if verts[i] == verts[i + 1] or not is_adjacent_exact(g, verts[i], verts[i + 1]):
            record("adjacency", False, f"edge check failed at step {i}")
    if not any(c["check"] == "adjacency" for c in checks):
        record("adjacency", True, f"{len(moves)} steps pass the rank test")

    w = cert.w
    spent: set = set()
    ledger_ok = True
    for i, mv in enumerate(moves):
        if len(mv.payers) < 2:
            record("ledger", False, f"ledger underflow at move {i}")
            ledger_ok = False
        elif len(mv.payers) > 2:
            record("ledger", False, f"move {i} pays {len(mv.payers)} tokens")
            ledger_ok = False
        for p in mv.payers:
            kind, ref = p
            owned = ref in w.covered if kind == "node" else ref in w.cycle_set
            if p in spent:
                record("ledger", False, f"token {p} spent twice (move {i})")
                ledger_ok = False
            elif not owned:
                record("ledger", False, f"token {p} of move {i} is not owned by w")
                ledger_ok = False
            spent.add(p)
    if ledger_ok:
        record("ledger", True, f"{2 * len(moves)} half-tokens spent once each")
    bound = potential(w)
    record("bound", cert.bound == bound, f"declared {cert.bound}, potential(w) = {bound}")
    record("length", len(moves) <= cert.bound, f"{len(moves)} <= {cert.bound}")
    if cert.witnesses and all(c["ok"] for c in checks):
        bad = audit_certificate(g, cert)
        record("invariants", not bad, "; ".join(bad[:5]))
    return checks


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=1, sort_keys=False)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _cmd_enumerate(args) -> int:
    g = parse_graph_file(args.graph)
    vs = enumerate_vertices(g, max_n=args.max_n or MAX_ENUM_N)
    _emit([v.to_json() for v in vs], args.out)
    return 0


def _cmd_skeleton(args) -> int:
    g = parse_graph_file(args.graph)
    sk = build_skeleton(g, max_n=args.max_n or MAX_SKELETON_N)
    edges = [[i, j] for i, nb in enumerate(sk.adjacency) for j in nb if i < j]
    _emit({"vertices": [v.to_json() for v in sk.vertices], "edges": edges}, args.out)
    return 0


def _cmd_bfs_diameter(args) -> int:
    g = parse_graph_file(args.graph)
    d, (x, y) = bfs_diameter(g, max_n=args.max_n or MAX_SKELETON_N)
    _emit({"diameter": d, "pair": [x.to_json(), y.to_json()]}, args.out)
    return 0


def _cmd_diameter(args) -> int:
    from .diameter import MAX_BNB_N, diameter
    g = parse_graph_file(args.graph)
    rep = diameter(g, cross_check=args.cross_check, max_n=args.max_n or MAX_BNB_N)
    _emit(rep.to_json(), args.out)
    return 1 if rep.agreement is False else 0


def _cmd_path(args) -> int:
    from .audit import audit_certificate
    from .path_builder import PathBuildError, build_path
    g = parse_graph_file(args.graph)
    z = parse_vertex_file(args.from_, g)
    y = parse_vertex_file(args.to, g)
    try:
        cert = build_path(g, z, y, paranoid=args.paranoid)
    except PathBuildError as exc:
        print(f"path construction failed: {exc}", file=sys.stderr)
        return 1
    bad = audit_certificate(g, cert) if args.paranoid else []
    _emit(cert.to_json(), args.out)
    for b in bad:
        print(f"invariant violated: {b}", file=sys.stderr)
    return 1 if bad else 0


def _cmd_verify_edge(args) -> int:
    from .moves import certify_edge_by_costs, classify_structural
    g = parse_graph_file(args.graph)
    x = parse_vertex_file(args.x, g)
    y = parse_vertex_file(args.y, g)
    if x == y:
        raise InputError("x and y are the same vertex")
    case = classify_structural(x, y)
    adjacent = is_adjacent_exact(g, x, y)
    out = {"structural_case": case.tag if case else None, "rank_adjacent": adjacent}
    status = 1 if case is not None and not adjacent else 0
    if args.costs:
        if case is None:
            out["cost_certified"] = None
        else:
            cc = certify_edge_by_costs(g, x, y, case)
            out["cost_certified"] = cc.verdict
            out["costs"] = [[u, v, str(c)] for (u, v), c in sorted(cc.costs.items())]
            if cc.detail:
                out["detail"] = cc.detail
            if cc.verdict == "falsified":
                status = 1
    _emit(out, args.out)
    return status


def _cmd_verify_cert(args) -> int:
    g = parse_graph_file(args.graph)
    _, obj = _load_json(args.cert)
    try:
        checks = verify_cert(g, obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.cert}: malformed certificate ({exc})") from exc
    ok = all(c["ok"] for c in checks)
    _emit({"verified": ok, "checks": checks}, args.out)
    return 0 if ok else 1


def _cmd_pit(args) -> int:
    from .reductions import pit_decide_via_diameter
    g = parse_graph_file(args.graph)
    try:
        ans = pit_decide_via_diameter(g)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = {"answer": ans.answer, "diameter": str(ans.diameter)}
    if ans.partition is not None:
        out["partition"] = [list(t) for t in ans.partition.triangles]
    _emit(out, args.out)
    return 0


def _cmd_gadget(args) -> int:
    from .reductions import build_apx_gadget
    g = parse_graph_file(args.graph)
    _emit(build_apx_gadget(g).to_json(), args.out)
    return 0


def _cmd_lreduce(args) -> int:
    from .reductions import build_apx_gadget, l_reduction_chain
    g = parse_graph_file(args.graph)
    gg = build_apx_gadget(g)
    _, obj = _load_json(args.cert)
    vobj = obj.get("vertex", obj) if isinstance(obj, dict) else obj
    w = FracVertex.from_json(vobj)
    problem = validate_vertex(gg.graph, w)
    if problem:
        raise InputError(f"{args.cert}: not a vertex of the gadget polytope: {problem}")
    k_prime = int(obj.get("k_prime", int(potential(w)))) if isinstance(obj, dict) else int(potential(w))
    chain = l_reduction_chain(g, gg, w, k_prime)
    _emit(chain.to_json(), args.out)
    return 0 if chain.ok else 1


def _cmd_corpus(args) -> int:
    from .acceptance import CHECKS, run_corpus
    out = args.out or f"corpus_seed{args.seed}.jsonl"
    total = run_corpus(out, seed=args.seed, max_n=args.max_n or 7, count=args.count)
    summary = {CHECKS[k][0]: {"checked": r.checked, "failures": len(r.failures) + r.extra.get("suppressed", 0),
                              "examples": r.failures[:3]}
               for k, r in sorted(total.items())}
    print(json.dumps({"records": out, "seed": args.seed, "summary": summary}, indent=1))
    return 0 if all(r.ok for r in total.values()) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fmdiameter", description="Diameter and walks on the fractional matching polytope.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_, graph=True):
        p = sub.add_parser(name, help=help_, description=help_)
        if graph:
            p.add_argument("--graph", required=True, help='graph JSON {"n": int, "edges": [[u, v], ...]}')
        p.add_argument("--out", help="write the JSON result here instead of stdout")
        p.set_defaults(func=fn)
        return p

    p = verb("enumerate", _cmd_enumerate, "list all vertices of P_FM in canonical order")
    p.add_argument("--max-n", type=int, help=f"size guard (default {MAX_ENUM_N})")
    p = verb("skeleton", _cmd_skeleton, "vertices and edges of the 1-skeleton")
    p.add_argument("--max-n", type=int, help=f"size guard (default {MAX_SKELETON_N})")
    p = verb("bfs-diameter", _cmd_bfs_diameter, "diameter by breadth-first search on the skeleton")
    p.add_argument("--max-n", type=int, help=f"size guard (default {MAX_SKELETON_N})")
    p = verb("diameter", _cmd_diameter, "diameter as the maximum potential of a vertex")
    p.add_argument("--cross-check", action="store_true", help="also run BFS on the skeleton and compare")
    p.add_argument("--max-n", type=int, help="size guard for the exact maximisation")
    p = verb("path", _cmd_path, "build a certified walk between two vertices")
    p.add_argument("--from", dest="from_", required=True, help="start vertex JSON")
    p.add_argument("--to", required=True, help="end vertex JSON")
    p.add_argument("--paranoid", action="store_true", help="rank-test every step and audit all invariants")
    p = verb("verify-edge", _cmd_verify_edge, "structural case and rank test for a vertex pair")
    p.add_argument("--x", required=True, help="first vertex JSON")
    p.add_argument("--y", required=True, help="second vertex JSON")
    p.add_argument("--costs", action="store_true", help="also certify with the case's cost vector")
    p = verb("verify-cert", _cmd_verify_cert, "replay a path certificate")
    p.add_argument("--cert", required=True, help="certificate JSON written by `path`")
    verb("pit", _cmd_pit, "decide partition into triangles through the diameter")
    verb("gadget", _cmd_gadget, "build the triangle-packing gadget graph")
    p = verb("lreduce", _cmd_lreduce, "check the inequality chain for a gadget vertex")
    p.add_argument("--cert", required=True, help='gadget vertex JSON, optionally {"vertex": ..., "k_prime": int}')
    p = verb("corpus", _cmd_corpus, "run the acceptance checks over the generated corpus (resumable)", graph=False)
    p.add_argument("--seed", type=int, default=0, help="seed for the random graphs (default 0)")
    p.add_argument("--max-n", type=int, help="largest atlas graph size (default 7)")
    p.add_argument("--count", type=int, default=200, help="number of random graphs (default 200)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
