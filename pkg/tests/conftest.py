import itertools
import math

import networkx as nx
import numpy as np
import pytest

from eccsum import FiniteMetricSpace, PairSequence, WeightedGraph


def random_graph(rng, n, extra=None, wlo=0.1, whi=2.0):
    """Connected graph: a random spanning tree plus ``extra`` random edges."""
    order = rng.permutation(n)
    edges = {}
    for i in range(1, n):
        u, v = int(order[i]), int(order[rng.integers(0, i)])
        edges[(min(u, v), max(u, v))] = float(rng.uniform(wlo, whi))
    extra = int(rng.integers(0, n + 1)) if extra is None else extra
    for _ in range(extra):
        u, v = (int(a) for a in rng.choice(n, 2, replace=False))
        edges.setdefault((min(u, v), max(u, v)), float(rng.uniform(wlo, whi)))
    ids = tuple(f"g{i}" for i in range(n))
    return WeightedGraph(ids, tuple((u, v, w) for (u, v), w in sorted(edges.items())))


def random_space(rng, n, kind=None):
    """A random finite metric: Euclidean, graph shortest-path, or l1 points."""
    kind = kind or rng.choice(["euclid", "graph", "l1"])
    if kind == "euclid":
        return FiniteMetricSpace.from_points(rng.normal(size=(n, 2)))
    if kind == "l1":
        x = rng.normal(size=(n, 3))
        d = np.abs(x[:, None, :] - x[None, :, :]).sum(-1)
        return FiniteMetricSpace(tuple(f"x{i}" for i in range(n)), d)
    g = random_graph(rng, n)
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_weighted_edges_from(g.edges)
    d = np.zeros((n, n))
    for s, dist in nx.all_pairs_dijkstra_path_length(G):
        for t, v in dist.items():
            d[s, t] = v
    return FiniteMetricSpace(tuple(f"x{i}" for i in range(n)), d)


def random_sequence(rng, n_points, n_pairs, weighted=True):
    pairs = [tuple(int(a) for a in rng.integers(0, n_points, 2)) for _ in range(n_pairs)]
    w = list(rng.uniform(0.1, 2.0, n_pairs)) if weighted else None
    return PairSequence(pairs, w)


def brute_force_paths(g, step, p, u, v):
    """Minimal ``(sum step^p)^(1/p)`` over all simple paths, and one argmin."""
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from((a, b) for a, b, _ in g.edges)
    if u == v:
        return 0.0, [u]
    best, arg = math.inf, None
    for path in nx.all_simple_paths(G, u, v):
        s = math.fsum(step(a, b) ** p for a, b in zip(path, path[1:]))
        if s < best:
            best, arg = s, path
    return best ** (1.0 / p), arg


def lipschitz_ball_vertices(space):
    """Every vertex of {f : f(base) = 0, f(x) - f(y) <= d(x, y)}, by enumeration.

    Picks n - 1 constraints, solves them as equalities with f(base) = 0 and
    keeps feasible solutions. Only for spaces with a handful of points.
    """
    n = space.n
    base = space.base_point
    cons = [(x, y) for x in range(n) for y in range(n) if x != y]
    verts = []
    for combo in itertools.combinations(cons, n - 1):
        A = np.zeros((n, n))
        b = np.zeros(n)
        for r, (x, y) in enumerate(combo):
            A[r, x], A[r, y], b[r] = 1.0, -1.0, space.d[x, y]
        A[n - 1, base] = 1.0
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        f = np.linalg.solve(A, b)
        if np.all(f[:, None] - f[None, :] <= space.d + 1e-9):
            verts.append(f)
    return np.array(verts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
