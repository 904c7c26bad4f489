import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from eccsum.errors import InputError
from eccsum.lp import EQ, GE, LE, LinearProgram, LpStatus, format_lp, solve_lp

SUPPLY = np.array([4.0, 6.0, 5.0])
DEMAND = np.array([3.0, 7.0, 5.0])
COST = np.array([[4.0, 1.0, 3.0], [2.0, 5.0, 2.0], [3.0, 2.0, 6.0]])


def transport_bruteforce(supply, demand, cost):
    """Cheapest basic feasible assignment: try every 5-cell basis."""
    m, n = cost.shape
    cells = list(itertools.product(range(m), range(n)))
    rows = []
    for i in range(m):
        rows.append([1.0 if c[0] == i else 0.0 for c in cells])
    for j in range(n):
        rows.append([1.0 if c[1] == j else 0.0 for c in cells])
    A = np.array(rows)[:-1]  # one balance row is redundant
    b = np.concatenate([supply, demand])[:-1]
    best = np.inf
    for basis in itertools.combinations(range(len(cells)), m + n - 1):
        sub = A[:, basis]
        if abs(np.linalg.det(sub)) < 1e-9:
            continue
        x = np.linalg.solve(sub, b)
        if np.all(x >= -1e-9):
            best = min(best, float(cost.ravel()[list(basis)] @ x))
    return best


def transport_lp():
    m, n = COST.shape
    rows, rel, rhs = [], [], []
    for i in range(m):
        r = np.zeros((m, n))
        r[i] = 1
        rows.append(r.ravel()), rel.append(LE), rhs.append(SUPPLY[i])
    for j in range(n):
        r = np.zeros((m, n))
        r[:, j] = 1
        rows.append(r.ravel()), rel.append(GE), rhs.append(DEMAND[j])
    return LinearProgram.build(-COST.ravel(), rows, rel, rhs)


def test_single_bound():
    sol = solve_lp(LinearProgram.build([1.0], [[1.0], [1.0]], [LE, GE], [1.0, 0.0]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.x[0] == pytest.approx(1.0)
    assert sol.objective == pytest.approx(1.0)


def test_contradictory_bounds_infeasible():
    sol = solve_lp(LinearProgram.build([1.0], [[1.0], [1.0]], [LE, GE], [1.0, 2.0]))
    assert sol.status is LpStatus.INFEASIBLE


def test_unbounded():
    sol = solve_lp(LinearProgram.build([1.0, 1.0], [[1.0, -1.0]], [LE], [1.0]))
    assert sol.status is LpStatus.UNBOUNDED


def test_transport_matches_vertex_enumeration():
    expected = transport_bruteforce(SUPPLY, DEMAND, COST)
    sol = solve_lp(transport_lp())
    assert sol.optimal
    assert -sol.objective == pytest.approx(expected, abs=1e-9)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        LinearProgram.build([1.0, 2.0], [[1.0]], [LE], [1.0])
    with pytest.raises(InputError):
        LinearProgram.build([1.0], [[1.0]], [LE, LE], [1.0])
    with pytest.raises(InputError):
        LinearProgram.build([1.0], [[1.0]], ["<"], [1.0])
    with pytest.raises(InputError):
        solve_lp("not an lp")


def test_free_and_fixed_variables():
    # max x0 - x1, x0 + x1 = 1, x1 free, x0 fixed at 3
    lp = LinearProgram.build([1.0, -1.0], [[1.0, 1.0]], [EQ], [1.0], [3.0, -np.inf], [3.0, np.inf])
    sol = solve_lp(lp)
    assert sol.optimal
    assert sol.x == pytest.approx([3.0, -2.0])
    assert sol.objective == pytest.approx(5.0)


def test_redundant_equalities():
    lp = LinearProgram.build(
        [1.0, 1.0], [[1.0, 1.0], [2.0, 2.0], [1.0, 0.0]], [EQ, EQ, LE], [1.0, 2.0, 0.25]
    )
    sol = solve_lp(lp)
    assert sol.optimal
    assert sol.objective == pytest.approx(1.0)
    assert abs(sol.objective - sol.dual_objective) <= 1e-7


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook largest-coefficient rule
    c = [0.75, -20.0, 0.5, -6.0]
    A = [[0.25, -8.0, -1.0, 9.0], [0.5, -12.0, -0.5, 3.0], [0.0, 0.0, 1.0, 0.0]]
    sol = solve_lp(LinearProgram.build(c, A, [LE] * 3, [0.0, 0.0, 1.0]))
    assert sol.optimal
    assert sol.objective == pytest.approx(1.25)


def test_format_lp_mentions_every_row():
    text = format_lp(transport_lp())
    assert text.count(">=") == 3
    assert text.startswith("maximize")


def _random_lp(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
    A = rng.normal(size=(m, n))
    rel = list(rng.choice([LE, EQ, GE], size=m, p=[0.6, 0.2, 0.2]))
    b = rng.normal(size=m)
    c = rng.normal(size=n)
    lo = np.where(rng.random(n) < 0.3, -np.inf, -1.0)
    hi = np.where(rng.random(n) < 0.5, np.inf, 2.0)
    return LinearProgram.build(c, A, rel, b, lo, hi)


def _scipy(lp):
    ub, bub, eq, beq = [], [], [], []
    for r, row, bi in zip(lp.relations, lp.matrix, lp.rhs):
        if r == LE:
            ub.append(row), bub.append(bi)
        elif r == GE:
            ub.append(-row), bub.append(-bi)
        else:
            eq.append(row), beq.append(bi)
    bounds = [
        (None if np.isinf(lo) else lo, None if np.isinf(hi) else hi)
        for lo, hi in zip(lp.lower, lp.upper)
    ]
    return linprog(-lp.objective, A_ub=ub or None, b_ub=bub or None, A_eq=eq or None,
                   b_eq=beq or None, bounds=bounds, method="highs",
                   options={"presolve": False})


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_highs(seed):
    lp = _random_lp(seed)
    sol = solve_lp(lp)
    ref = _scipy(lp)
    assert sol.status.value == {0: "Optimal", 2: "Infeasible", 3: "Unbounded"}[ref.status]
    if sol.optimal:
        assert sol.objective == pytest.approx(-ref.fun, abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_optimal_certificates(seed):
    lp = _random_lp(seed)
    sol = solve_lp(lp)
    if not sol.optimal:
        return
    scale = 1 + abs(sol.objective)
    assert sol.primal_residual <= 1e-9 * (1 + np.abs(lp.rhs).max())
    assert sol.dual_objective >= sol.objective - 1e-7 * scale
    assert sol.dual_objective <= sol.objective + 1e-7 * scale
    assert sol.slackness_residual <= 1e-9 * scale * 10
    # dual signs for a maximization
    for y, r in zip(sol.duals, lp.relations):
        if r == LE:
            assert y >= -1e-9
        elif r == GE:
            assert y <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_deterministic(seed):
    lp = _random_lp(seed)
    a, b = solve_lp(lp), solve_lp(lp)
    assert a.status == b.status
    if a.optimal:
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.duals, b.duals)
        assert a.objective == b.objective


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.5, 2.0, 8.0, 1e3]))
def test_objective_scaling(seed, s):
    lp = _random_lp(seed)
    scaled = LinearProgram.build(s * lp.objective, lp.matrix, lp.relations, lp.rhs,
                                 lp.lower, lp.upper)
    a, b = solve_lp(lp), solve_lp(scaled)
    assert a.status == b.status
    if a.optimal:
        assert b.objective == pytest.approx(s * a.objective, rel=1e-9, abs=1e-12)
        assert np.allclose(a.x, b.x, atol=1e-9)
