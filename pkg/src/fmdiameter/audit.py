"""Independent replay of a walk certificate against the walk invariants.

Nothing here reuses the builder's state: token sets, tilde matchings, target
matchings and target graphs are all recomputed from the vertex sequence, the
payments and the witness table.
"""

from __future__ import annotations

from collections import defaultdict

from .core_model import Cycle, Edge, FracVertex, Graph, edge


def _cedges(c):
    return {edge(c[i], c[(i + 1) % len(c)]) for i in range(len(c))}


def _pedges(p):
    return {edge(p[i], p[i + 1]) for i in range(len(p) - 1)}


def _support_component(x: FracVertex, a: int) -> tuple:
    if a in x.mate:
        return ("m", edge(a, x.mate[a]))
    if a in x.cycle_of:
        return ("c", x.cycle_of[a])
    return ("none", a)


def _components(es: set[Edge]) -> list[tuple[set[int], set[Edge]]]:
    nbr = defaultdict(set)
    for a, b in es:
        nbr[a].add(b)
        nbr[b].add(a)
    seen, out = set(), []
    for s in sorted(nbr):
        if s in seen:
            continue
        stack, nodes = [s], {s}
        while stack:
            a = stack.pop()
            for b in nbr[a]:
                if b not in nodes:
                    nodes.add(b)
                    stack.append(b)
        seen |= nodes
        out.append((nodes, {e for e in es if e[0] in nodes}))
    return out


def _target_matching(c: Cycle, u: int, v: int, q: tuple, w: FracVertex) -> set[Edge]:
    k = len(c)
    cands = []
    for i in range(k):
        m = {edge(c[(i + 1 + 2 * s) % k], c[(i + 2 + 2 * s) % k]) for s in range(k // 2)}
        if u == v:
            ok = c[i] == u
        else:
            ok = c[i] not in q and len(m & _pedges(q)) * 2 == len(q)
        if ok:
            cands.append((-len(m & w.matching_set), c[i], m))
    cands.sort(key=lambda t: (t[0], t[1]))
    return cands[0][2] if cands else set()


def audit_certificate(g: Graph, cert) -> list[str]:
    """Return every violated invariant along cert (empty list = clean)."""
    bad: list[str] = []
    verts = list(cert.vertices)
    moves = cert.moves
    n1 = len(cert.phases[0][1])
    n2 = n1 + len(cert.phases[1][1])
    z, y, w = verts[0], cert.y, verts[n1]
    ysupp = set(y.values)
    yc_edges = set(y.cycle_edge_set)

    spent_before: list[set] = [set()]
    for mv in moves:
        if len(mv.payers) != 2:
            bad.append(f"move {mv.label} has {len(mv.payers)} payers")
        spent_before.append(spent_before[-1] | set(mv.payers))
    seen = set()
    for i, mv in enumerate(moves):
        for p in mv.payers:
            if p in seen:
                bad.append(f"token {p} spent twice (move {i})")
            seen.add(p)
            kind, ref = p
            if (kind == "node" and ref not in w.covered) or (kind == "cycle" and ref not in w.cycle_set):
                bad.append(f"payer {p} of move {i} owns no token")

    def spent_nodes(i):
        return {ref for kind, ref in spent_before[i] if kind == "node"}

    # first phase: (3) (4) (5) (6)
    for i in range(n1 + 1):
        ell = verts[i]
        tok = ell.covered - spent_nodes(i)
        mt = {e for e in ell.matching if e[0] not in tok and e[1] not in tok}
        if not mt <= ysupp:
            bad.append(f"(5) at step {i}")
        shared = {a for c in ell.cycles if c in y.cycle_set for a in c}
        mt_nodes = {a for e in mt for a in e}
        for a in ell.covered - shared:
            if (a in tok) == (a in mt_nodes):
                bad.append(f"(6) at step {i}, node {a}")
                break
        if i < n1:
            nxt = verts[i + 1]
            if not ell.covered <= nxt.covered:
                bad.append(f"(3) at step {i}")
            if not (ell.cycle_set - z.cycle_set) <= nxt.cycle_set:
                bad.append(f"(4) at step {i}")

    wit = dict(cert.witnesses)
    tok_w = w.covered - spent_nodes(n1)
    mt_w = {e for e in w.matching if e[0] not in tok_w and e[1] not in tok_w}
    unborn_w = [c for c in y.cycles if c not in w.cycle_set]
    if set(wit) != set(unborn_w):
        bad.append("witness table does not cover exactly C_y minus C_w")
    for c, ent in wit.items():
        u, v, q = ent.u, ent.v, ent.q
        if u not in tok_w or v not in tok_w:
            bad.append(f"witness of {c} holds no token at w")
        if u == v:
            ce = _cedges(c)
            if len(ce & w.matching_set) != len(c) // 2 or any(u in e for e in ce & w.matching_set):
                bad.append(f"single witness {u} of {c} invalid")
        else:
            qe = [edge(q[i], q[i + 1]) for i in range(len(q) - 1)]
            if {q[0], q[-1]} != {u, v} or not set(qe) <= _cedges(c) or len(qe) % 2 == 0:
                bad.append(f"Q({u},{v}) is not an odd path of {c}")
            if any((e in mt_w) != (j % 2 == 1) for j, e in enumerate(qe)):
                bad.append(f"Q({u},{v}) not tilde-augmenting")
            if len(qe) > 1 and _support_component(w, u) == _support_component(w, v):
                bad.append(f"pair ({u},{v}) of {c} shares a component of G_w")
    targets = {c: _target_matching(c, e.u, e.v, e.q, w) for c, e in wit.items()}
    witness_nodes = {a: c for c, e in wit.items() for a in {e.u, e.v}}

    def view(i):
        ell = verts[i]
        tok = (ell.covered & w.covered) - spent_nodes(i)
        want = set(y.matching)
        for c, m in targets.items():
            if c not in ell.cycle_set:
                want |= m
        comps = []
        for nodes, es in _components(want ^ ell.matching_set):
            is_cycle = len(es) == len(nodes)
            dangerous = all(a in witness_nodes and witness_nodes[a] not in ell.cycle_set
                            for a in nodes & tok)
            comps.append((frozenset(nodes), frozenset(es), is_cycle, dangerous))
        return ell, tok, want, comps

    def unborn_witnesses(ell, nodes):
        return {witness_nodes[a] for a in nodes if a in witness_nodes and witness_nodes[a] not in ell.cycle_set}

    for i in range(n1, n2 + 1):
        ell, tok, want, comps = view(i)
        for nodes, es, is_cycle, dangerous in comps:
            if not nodes & tok:
                bad.append(f"(7) at step {i}")
            if dangerous and is_cycle and len(unborn_witnesses(ell, nodes)) < 2:
                bad.append(f"(8) at step {i}")
            if dangerous and not is_cycle:
                deg = defaultdict(int)
                for a, b in es:
                    deg[a] += 1
                    deg[b] += 1
                for a in (x for x in nodes if deg[x] == 1):
                    c = witness_nodes.get(a)
                    single = c is not None and c not in ell.cycle_set and wit[c].u == wit[c].v
                    on = a in ell.cycle_of and ell.cycle_of[a] not in y.cycle_set
                    if not (single or on):
                        bad.append(f"(9) at step {i}, endpoint {a}")
        tedges = {e for _, es, _, _ in comps for e in es}
        for a, b in ell.matching_set & tedges:
            if (a in tok) != (b in tok):
                bad.append(f"(10) at step {i}")
            if a not in tok and b not in tok and edge(a, b) not in yc_edges:
                bad.append(f"(11) at step {i}")
        bad += _check_witness_tokens(ell, tok, wit, i)

    # properties of r
    r, tok_r, _, comps_r = view(n2)
    for nodes, es, is_cycle, dangerous in comps_r:
        if len(nodes & tok_r) < 2:
            bad.append("r(a): component with fewer than two tokens")
        deg = defaultdict(int)
        for a, b in es:
            deg[a] += 1
            deg[b] += 1
        for c, ent in wit.items():
            if c in r.cycle_set:
                continue
            if ent.u != ent.v and ent.u in nodes:
                if not _pedges(ent.q) <= es or deg[ent.u] != 2 or deg[ent.v] != 2:
                    bad.append(f"r(c): Q of {c} not inside its component")
            if dangerous and is_cycle and set(c) & nodes and not {ent.u, ent.v} <= nodes:
                bad.append(f"r(d): dangerous component misses witnesses of {c}")
    for c, ent in wit.items():
        if c in r.cycle_set or ent.u != ent.v:
            continue
        ce = _cedges(c)
        packed = len(ce & r.matching_set) == len(c) // 2
        at_end = any(not is_cycle and ent.u in nodes and
                     sum(ent.u in e for e in es) == 1 for nodes, es, is_cycle, _ in comps_r)
        if not packed or not at_end:
            bad.append(f"r(b): single witness {ent.u} of {c}")

    comp_r = {nodes: (es, nodes & tok_r) for nodes, es, _, _ in comps_r}
    for i in range(n2, len(verts)):
        if i > 0 and moves[i - 1].label == "⊗":
            # midpoint of the two-move step; (12) and (13) hold again after the second move
            continue
        ell, tok, _, comps = view(i)
        for nodes, es, _, _ in comps:
            if nodes not in comp_r or comp_r[nodes][0] != es or comp_r[nodes][1] != nodes & tok:
                bad.append(f"(13) at step {i}")
        bad += _check_witness_tokens(ell, tok, wit, i)
    if verts[-1] != y:
        bad.append("walk does not end at y")
    if len(moves) > cert.bound:
        bad.append("walk longer than its bound")
    return bad


def _check_witness_tokens(ell, tok, wit, i) -> list[str]:
    out = []
    for c, ent in wit.items():
        if c not in ell.cycle_set and not {ent.u, ent.v} <= tok:
            out.append(f"(12) at step {i}, cycle {c}")
    return out
