"""Recompute the worked examples: discrete-space molecule, apex graph, circle graph.

Run: python scripts/reproduce_examples.py [--circle-n 16] [--apex-n 6]
"""

import argparse

import numpy as np

from eccsum import (
    FiniteMetricSpace,
    Molecule,
    PairSequence,
    ProbabilityMeasure,
    ae_norm,
    circle_graph,
    d_cc,
    d_p,
    d_p_mu,
    d_wc,
    f_y,
    graph_space,
    pairing,
    path_graph,
    pietsch_functional,
    symmetry_classes,
    two_apex_graph,
)


def discrete_space():
    sp = FiniteMetricSpace.discrete(4)
    m = Molecule({0: 0.5, 1: -0.5, 2: 0.5, 3: -0.5})
    seq = PairSequence([(0, 1), (2, 3)], [0.5, 0.5])
    norm, _ = ae_norm(sp, m)
    print("4-point discrete space")
    print(f"  AE norm of the molecule        {norm:.12g}")
    print(f"  best pairing with some f_y     "
          f"{max(abs(pairing(m, f_y(sp, y))) for y in range(4)):.12g}")
    print(f"  eccentric proximity (p = 1)    {d_cc(sp, seq, 1):.12g}")
    print(f"  weak proximity, exact          {d_wc(sp, seq, 1, 'exact').value:.12g}")


def path_counterexample():
    print("path graph with the discrete metric: d_p(1, n) vs (n-1)^(1/p)")
    for n in (3, 5, 10):
        g = path_graph(n)
        disc = FiniteMetricSpace(g.vertices, 1.0 - np.eye(n))
        for p in (1, 2, 3):
            print(f"  n={n:2d} p={p}  {d_p(g, disc, p).values[0, n - 1]:.12g}  "
                  f"{(n - 1) ** (1 / p):.12g}")


def apex_graph(n):
    g = two_apex_graph(n)
    sp = graph_space(g)
    a, b = g.index("v1"), g.index("v2")
    k = [i for i in range(g.n) if i not in (a, b)]
    f = np.arange(g.n, dtype=float)
    cert = pietsch_functional(sp, f, k, 1)
    print(f"two-apex graph, n = {n}")
    print(f"  f(v1) != f(v2): constant {cert.constant}, witness "
          f"{[g.vertices[i] for i in cert.witness_pair]}")
    f[b] = f[a]
    cert = pietsch_functional(sp, f, k, 1)
    print(f"  f(v1) == f(v2): constant {cert.constant:.12g}")


def circle(n):
    g = circle_graph(n)
    sp = graph_space(g)
    dirac = ProbabilityMeasure.dirac(0)
    dm = d_p_mu(g, sp, 2, dirac).values
    res = symmetry_classes(g, sp, 2, dirac)
    print(f"circle graph, n = {n}, measure at the center")
    print(f"  largest d_(2,mu) between circle vertices  {dm[1:, 1:].max():.3g}")
    print(f"  classes: {[len(c) for c in res.classes]}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--circle-n", type=int, default=16)
    ap.add_argument("--apex-n", type=int, default=6)
    args = ap.parse_args()
    discrete_space()
    path_counterexample()
    apex_graph(args.apex_n)
    circle(args.circle_n)


if __name__ == "__main__":
    main()
