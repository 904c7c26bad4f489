"""Weighted-graph path pseudometrics, best-path estimates and symmetry.

Every path quantity here has the form ``(min over paths sum step^p)^(1/p)``
for some nonnegative step cost on edges. Step costs are raised to the p-th
power once, shortest sums are found by label setting, and the root is
applied at the end.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .metric import FiniteMetricSpace, lip_constant
from .summing import ProbabilityMeasure

log = logging.getLogger(__name__)

P_MAX = 64.0
SYMMETRY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    vertices: tuple
    edges: tuple  # (u index, v index, weight), u < v

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        if not verts:
            raise InputError("graph needs at least one vertex")
        if len(set(verts)) != len(verts):
            raise InputError("vertex ids must be unique")
        n = len(verts)
        seen = set()
        edges = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise InputError(f"self-loop at {verts[u]!r}")
            if not (w > 0 and math.isfinite(w)):
                raise InputError(f"edge {verts[u]}-{verts[v]} has non-positive weight {w!r}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InputError(f"duplicate edge {verts[key[0]]}-{verts[key[1]]}")
            seen.add(key)
            edges.append((key[0], key[1], w))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        adj = [[] for _ in range(n)]
        for u, v, w in edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        object.__setattr__(self, "_adj", tuple(tuple(a) for a in adj))
        if not self._connected():
            raise InputError("graph is not connected")

    @classmethod
    def from_id_edges(cls, vertices, edges):
        """Build from ``(u_id, v_id, w)`` triples."""
        vertices = [str(v) for v in vertices]
        pos = {v: i for i, v in enumerate(vertices)}
        try:
            idx = [(pos[str(u)], pos[str(v)], w) for u, v, w in edges]
        except KeyError as exc:
            raise InputError(f"edge references unknown vertex {exc.args[0]!r}") from None
        return cls(tuple(vertices), tuple(idx))

    def _connected(self):
        n = len(self.vertices)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v, _ in self._adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == n

    @property
    def n(self):
        return len(self.vertices)

    def neighbors(self, u):
        return self._adj[u]

    def index(self, vid):
        try:
            return self.vertices.index(str(vid))
        except ValueError:
            raise InputError(f"unknown vertex {vid!r}") from None

    def edge_index_arrays(self):
        if not self.edges:
            return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
        u, v, w = zip(*self.edges)
        return np.array(u), np.array(v), np.array(w)


@dataclass
class PathResult:
    value: float
    path: list


@dataclass
class PathMatrix:
    """All-pairs values plus predecessor trees for path retrieval."""

    vertices: tuple
    values: np.ndarray
    pred: np.ndarray
    p: float
    kind: str = ""
    step_cost: np.ndarray = field(default=None, repr=False)

    def path(self, u, v):
        """Vertex ids of the optimal path from ``u`` to ``v`` (ids or indices)."""
        i = u if isinstance(u, (int, np.integer)) else self.vertices.index(str(u))
        j = v if isinstance(v, (int, np.integer)) else self.vertices.index(str(v))
        seq = [j]
        while seq[-1] != i:
            prev = int(self.pred[i, seq[-1]])
            if prev < 0:
                raise InputError("no path recorded")
            seq.append(prev)
        seq.reverse()
        return PathResult(float(self.values[i, j]), [self.vertices[k] for k in seq])

    def path_cost(self, ids):
        """Recompute ``(sum step^p)^(1/p)`` along an id path."""
        idx = [self.vertices.index(x) for x in ids]
        total = math.fsum(self.step_cost[a, b] for a, b in zip(idx, idx[1:]))
        return total ** (1.0 / self.p)


def _check_p(p):
    if not (1.0 <= p <= P_MAX):
        raise InputError(f"p must lie in [1, {P_MAX:g}], got {p!r}")


def _label_setting(g, cost):
    """All-pairs minimal sums of ``cost[u, v]`` along edges, with predecessors.

    Ties are broken toward the lexicographically smallest predecessor id so
    retrieved paths are reproducible.
    """
    n = g.n
    ids = g.vertices
    dist = np.full((n, n), np.inf)
    pred = np.full((n, n), -1, dtype=int)
    for s in range(n):
        ds = dist[s]
        ps = pred[s]
        ds[s] = 0.0
        ps[s] = s
        done = np.zeros(n, dtype=bool)
        heap = [(0.0, ids[s], s)]
        while heap:
            du, _, u = heapq.heappop(heap)
            if done[u] or du > ds[u]:
                continue
            done[u] = True
            for v, _w in g.neighbors(u):
                if done[v]:
                    continue
                nd = du + cost[u, v]
                cur = ds[v]
                eps = 1e-12 * (1.0 + abs(cur)) if math.isfinite(cur) else 0.0
                if nd < cur - eps:
                    ds[v] = nd
                    ps[v] = u
                    heapq.heappush(heap, (nd, ids[v], v))
                elif abs(nd - cur) <= eps and ids[u] < ids[ps[v]]:
                    ps[v] = u
    return dist, pred


def _path_metric(g, step, p, kind):
    """``step`` holds per-edge p-th power costs as an n x n array."""
    sums, pred = _label_setting(g, step)
    vals = sums ** (1.0 / p)
    np.fill_diagonal(vals, 0.0)
    vals = np.minimum(vals, vals.T)
    return PathMatrix(g.vertices, vals, pred, p, kind, step)


def _edge_cost_matrix(g, values):
    """Scatter per-edge values into an n x n array (inf off the edge set)."""
    u, v, _ = g.edge_index_arrays()
    c = np.full((g.n, g.n), np.inf)
    c[u, v] = values
    c[v, u] = values
    return c


def q_p(g, p):
    """Weighted p-shortest-path metric: steps cost ``w^p``."""
    _check_p(p)
    _, _, w = g.edge_index_arrays()
    return _path_metric(g, _edge_cost_matrix(g, w**p), p, "qp")


def _metric_on(g, d):
    D = d.d if isinstance(d, FiniteMetricSpace) else np.asarray(d, dtype=float)
    if D.shape != (g.n, g.n):
        raise InputError(f"metric is {D.shape}, graph has {g.n} vertices")
    if isinstance(d, FiniteMetricSpace) and tuple(d.points) != tuple(g.vertices):
        raise InputError("metric point ids do not match the graph vertices (same order required)")
    return D


def graph_space(g, p=1.0):
    """The graph's vertices as a metric space under ``q_p``."""
    return FiniteMetricSpace(g.vertices, q_p(g, p).values)


def d_p(g, d, p):
    """Path pseudodistance whose steps cost ``d(u, v)^p``."""
    _check_p(p)
    D = _metric_on(g, d)
    u, v, _ = g.edge_index_arrays()
    return _path_metric(g, _edge_cost_matrix(g, D[u, v] ** p), p, "dp")


def _measure_vector(g, mu):
    if isinstance(mu, ProbabilityMeasure):
        for i in mu.support:
            if not 0 <= i < g.n:
                raise InputError(f"measure supported at index {i}, outside the graph")
        return mu.vector(g.n)
    m = np.asarray(mu, dtype=float)
    if m.shape != (g.n,):
        raise InputError("measure vector length must equal the vertex count")
    return m


def profile_cost(D, mu_vec, p, u, v):
    """``sum_w mu_w |d(u, w) - d(v, w)|^p``."""
    supp = np.flatnonzero(mu_vec)
    return np.abs(D[u][..., supp] - D[v][..., supp]) ** p @ mu_vec[supp]


def d_p_mu(g, d, p, mu):
    """Path pseudodistance whose steps cost ``sum_w mu_w |d(u,w) - d(v,w)|^p``."""
    _check_p(p)
    D = _metric_on(g, d)
    m = _measure_vector(g, mu)
    u, v, _ = g.edge_index_arrays()
    return _path_metric(g, _edge_cost_matrix(g, profile_cost(D, m, p, u, v)), p, "dpmu")


def _index_values(g, f):
    if isinstance(f, dict):
        missing = [v for v in g.vertices if v not in f]
        if missing:
            raise InputError(f"index has no value for {missing[:3]}")
        f = [f[v] for v in g.vertices]
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n,):
        raise InputError(f"index has {f.size} values for {g.n} vertices")
    return f


def e_p(g, f, p):
    """Best-path estimate: steps cost ``|f(u) - f(v)|^p``."""
    _check_p(p)
    f = _index_values(g, f)
    u, v, _ = g.edge_index_arrays()
    return _path_metric(g, _edge_cost_matrix(g, np.abs(f[u] - f[v]) ** p), p, "ep")


def graph_lip_constant(g, f, p=1.0):
    """Lipschitz constant of an index with respect to ``q_p``."""
    return lip_constant(q_p(g, p).values, _index_values(g, f))


@dataclass
class SymmetryResult:
    classes: list
    transitive: bool
    matrix: PathMatrix = None
    warnings: list = field(default_factory=list)


def symmetry_classes(g, d, p, mu, tol=SYMMETRY_TOL):
    """Group vertices whose ``d_{p,mu}`` distance is at most ``tol``.

    Classes are the connected components of the thresholded relation. If
    some class holds a pair farther apart than ``tol`` the relation was not
    transitive at this tolerance; that is flagged, not hidden.
    """
    dm = d_p_mu(g, d, p, mu)
    n = g.n
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    close = dm.values <= tol
    for a in range(n):
        for b in range(a + 1, n):
            if close[a, b]:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)
    classes = [[g.vertices[i] for i in grp] for _, grp in sorted(groups.items())]
    warnings = []
    for grp in groups.values():
        sub = dm.values[np.ix_(grp, grp)]
        if np.any(sub > tol):
            warnings.append(
                f"class {[g.vertices[i] for i in grp]} contains pairs at distance up to "
                f"{sub.max():.3g} > tol {tol:g}"
            )
    for w in warnings:
        log.warning("symmetry_classes: %s", w)
    return SymmetryResult(classes, not warnings, dm, warnings)


@dataclass
class T2Report:
    passed: bool
    lip: float
    constant: float
    worst_part1: float
    worst_part2: float = None
    part2_checked: bool = False
    worst_pair1: tuple = None
    worst_pair2: tuple = None
    max_ratio1: float = 0.0
    max_ratio2: float = 0.0


def check_t2(g, d, p, f, certificate, slack=1e-9):
    """Check ``E_p(f) <= Lip(f) d_p`` and ``E_p(f) <= C(f) d_{p,mu*}`` on all pairs.

    ``certificate`` comes from ``pietsch_functional`` on the same metric and
    index; its measure is ``mu*`` and its constant ``C(f)``. With an infinite
    certificate only the first inequality is checked.
    """
    D = _metric_on(g, d)
    f = _index_values(g, f)
    ep = e_p(g, f, p).values
    lip = lip_constant(D, f)
    dp = d_p(g, D, p).values
    n = g.n
    iu = np.triu_indices(n, 1)

    def excess(bound):
        with np.errstate(invalid="ignore"):
            ex = ep - bound
        ex = np.where(np.isnan(ex), -np.inf, ex)[iu]
        if ex.size == 0:
            return 0.0, None
        j = int(np.argmax(ex))
        return float(ex[j]), (g.vertices[iu[0][j]], g.vertices[iu[1][j]])

    def ratio(den):
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(ep[iu] > 0, ep[iu] / den[iu], 0.0)
        return float(np.max(r, initial=0.0))

    bound1 = lip * dp if math.isfinite(lip) else np.full_like(dp, np.inf)
    w1, pair1 = excess(bound1)
    rep = T2Report(w1 <= slack, lip, certificate.constant, w1, worst_pair1=pair1,
                   max_ratio1=ratio(dp))
    if certificate.finite:
        dm = d_p_mu(g, D, p, certificate.measure).values
        w2, pair2 = excess(certificate.constant * dm)
        rep.worst_part2, rep.worst_pair2 = w2, pair2
        rep.part2_checked = True
        rep.max_ratio2 = ratio(dm)
        rep.passed = rep.passed and w2 <= slack
    return rep


# ---------------------------------------------------------------------------
# example graphs


def _check_n(n):
    if int(n) != n or n < 2:
        raise InputError(f"generator size n must be an integer >= 2, got {n!r}")
    return int(n)


def sequence_graph(n):
    """Vertices at ``1 - 1/2^i`` (i < n) plus their limit ``s`` at 1.

    Consecutive vertices are joined with weight ``1/2^(i+1)`` and every
    vertex is joined to ``s`` with weight ``1/2^i``.
    """
    n = _check_n(n)
    ids = [f"v{i}" for i in range(n)] + ["s"]
    s = n
    edges = [(i, i + 1, 0.5 ** (i + 1)) for i in range(n - 1)]
    edges += [(i, s, 0.5**i) for i in range(n)]
    return WeightedGraph(tuple(ids), tuple(edges))


def sequence_positions(n):
    return np.array([1 - 0.5**i for i in range(n)] + [1.0])


def two_apex_graph(n):
    """Sequence graph on the segment ``{0} x [0, 1]`` plus apexes at ``(-1, 0)``, ``(1, 0)``.

    Core vertices are ``c0 .. c{n-1}`` and ``s``; the apexes ``v1``, ``v2``
    are joined to every core vertex with Euclidean segment weights.
    """
    n = _check_n(n)
    core = sequence_graph(n)
    ys = sequence_positions(n)
    ids = [f"c{i}" for i in range(n)] + ["s", "v1", "v2"]
    m = n + 1
    edges = list(core.edges)
    for apex in (m, m + 1):
        for j, y in enumerate(ys):
            edges.append((j, apex, math.hypot(1.0, y)))
    return WeightedGraph(tuple(ids), tuple(edges))


def circle_graph(n):
    """``n`` equally spaced circle vertices ``c0 ..`` plus the center ``v0``.

    Neighbors on the circle are joined with arc weight ``2 pi / n``, each
    circle vertex is joined to the center with weight 1. Shortest paths give
    ``min(arc length, 2)`` between circle vertices and 1 to the center.
    """
    n = _check_n(n)
    ids = ["v0"] + [f"c{i}" for i in range(n)]
    arc = 2 * math.pi / n
    edges = [(0, i + 1, 1.0) for i in range(n)]
    if n == 2:
        edges.append((1, 2, arc))
    else:
        edges += [(i + 1, (i + 1) % n + 1, arc) for i in range(n)]
    return WeightedGraph(tuple(ids), tuple(edges))


def path_graph(n, weight=1.0):
    n = _check_n(n)
    ids = [str(i + 1) for i in range(n)]
    return WeightedGraph(tuple(ids), tuple((i, i + 1, weight) for i in range(n - 1)))
