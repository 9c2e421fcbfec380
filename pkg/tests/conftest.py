import itertools

from hypothesis import HealthCheck, settings, strategies as st

from fmdiameter.core_model import Graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen)


@st.composite
def graph_with_vertices(draw, k=2, max_n=6):
    from fmdiameter.skeleton import enumerate_vertices
    g = draw(graphs(max_n=max_n))
    vs = enumerate_vertices(g)
    return (g, *[draw(st.sampled_from(vs)) for _ in range(k)])
