"""Search unions of four triangles for a pair the naive strategy cannot join in 4 moves.

z and y are two disjoint half-triangles each; the graph is the union of the
four triangles. The naive walk rounds each cycle of z and of y to one of its
edges (one move per cycle) and then joins the two matchings inside the
matching polytope, one move per component of their symmetric difference.

    python3 scripts/find_example_a.py --max-nodes 12 --out tests/fixtures/example_a.json
"""

import argparse
import json
from itertools import combinations

from fmdiameter.acceptance import naive_length
from fmdiameter.core_model import FracVertex, Graph, cycle_edges, potential
from fmdiameter.path_builder import build_path
from fmdiameter.skeleton import build_skeleton


def candidates(max_nodes: int):
    z_tris = [(0, 1, 2), (3, 4, 5)]
    seen = set()
    for n in range(6, max_nodes + 1):
        for t1, t2 in combinations(combinations(range(n), 3), 2):
            if set(t1) & set(t2) or n - 1 not in set(t1) | set(t2):
                continue
            key = tuple(sorted((t1, t2)))
            if key in seen or set(key) == set(z_tris):
                continue
            seen.add(key)
            edges = sorted({e for t in z_tris + [t1, t2] for e in cycle_edges(t)})
            used = {a for e in edges for a in e}
            if used != set(range(n)):
                continue
            yield Graph.from_edges(n, edges), FracVertex([], z_tris), FracVertex([], [t1, t2])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-nodes", type=int, default=12)
    ap.add_argument("--out", default="tests/fixtures/example_a.json")
    args = ap.parse_args()
    found = None
    scanned = 0
    for g, z, y in candidates(args.max_nodes):
        scanned += 1
        naive = naive_length(z, y)
        if naive < 5:
            continue
        cert = build_path(g, z, y)
        if cert.length <= 4:
            found = (g, z, y, naive, cert)
            break
    if found is None:
        print(json.dumps({"found": False, "scanned": scanned}))
        return 1
    g, z, y, naive, cert = found
    rec = {
        "graph": g.to_json(), "z": z.to_json(), "y": y.to_json(),
        "naive_moves": naive, "build_path_moves": cert.length, "bound": cert.bound,
        "potential_z": str(potential(z)), "potential_y": str(potential(y)),
        "scanned": scanned,
    }
    if g.n <= 9:
        rec["skeleton_distance"] = build_skeleton(g).distance(z, y)
    with open(args.out, "w") as fh:
        json.dump(rec, fh, indent=1)
        fh.write("\n")
    print(json.dumps(rec))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
