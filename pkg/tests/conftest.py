"""Shared graph fixtures for the test suite."""
import numpy as np
import pytest

from smoothwalk import add_self_loops, build_graph, generate, is_bipartite, is_connected


@pytest.fixture
def k3():
    return generate("complete", 3)


@pytest.fixture
def k3_loops():
    return add_self_loops(generate("complete", 3))


@pytest.fixture
def p3():
    return generate("path", 3)


@pytest.fixture
def p3_loops():
    return add_self_loops(generate("path", 3))


@pytest.fixture
def c5():
    return generate("cycle", 5)


@pytest.fixture
def star4():
    # center 0, three leaves
    return build_graph(4, [(0, 1), (0, 2), (0, 3)])


def random_connected_nonbipartite(n, seed, p=0.5):
    """Draw Erdos-Renyi graphs until one is connected and non-bipartite."""
    rng = np.random.default_rng(seed)
    while True:
        g = generate("erdos_renyi", n, p=p, seed=int(rng.integers(1 << 30)))
        if is_connected(g) and not is_bipartite(g):
            return g


def symmetric_random_logits(g, rng, scale=1.0):
    """One Gaussian logit per undirected edge, mirrored to both directions."""
    logits = {}
    for u, v in sorted(g.edges):
        value = scale * float(rng.standard_normal())
        logits[(u, v)] = value
        if u != v:
            logits[(v, u)] = value
    return logits
