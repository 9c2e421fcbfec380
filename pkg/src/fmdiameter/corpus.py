"""Test corpus: every connected graph up to 7 nodes plus seeded random graphs up to 9."""

from __future__ import annotations

import random
from functools import lru_cache

import networkx as nx

from .core_model import Graph

RANDOM_COUNT = 200
RANDOM_N = (4, 9)
RANDOM_P = (0.15, 0.45)


def _to_graph(G: nx.Graph) -> Graph:
    mapping = {v: i for i, v in enumerate(sorted(G.nodes()))}
    return Graph.from_edges(G.number_of_nodes(), [(mapping[a], mapping[b]) for a, b in G.edges()])


@lru_cache(maxsize=None)
def atlas_graphs(max_n: int = 7) -> tuple[Graph, ...]:
    """One representative per isomorphism class of connected graphs on 1..max_n nodes."""
    if max_n > 7:
        raise ValueError("the graph atlas stops at 7 nodes")
    out = []
    for G in nx.graph_atlas_g()[1:]:
        if G.number_of_nodes() <= max_n and nx.is_connected(G):
            out.append(_to_graph(G))
    return tuple(out)


def random_graphs(seed: int = 0, count: int = RANDOM_COUNT, n_range: tuple[int, int] = RANDOM_N,
                  p_range: tuple[float, float] = RANDOM_P) -> tuple[Graph, ...]:
    """G(n, p) samples with n and p drawn uniformly; fully determined by the seed."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(*n_range)
        p = rng.uniform(*p_range)
        out.append(_to_graph(nx.gnp_random_graph(n, p, seed=rng.randrange(2 ** 32))))
    return tuple(out)


def corpus(seed: int = 0, max_n: int = 7, count: int = RANDOM_COUNT) -> list[tuple[str, Graph]]:
    named = [(f"atlas-{i}", g) for i, g in enumerate(atlas_graphs(max_n))]
    named += [(f"random-{seed}-{i}", g) for i, g in enumerate(random_graphs(seed, count))]
    return named
