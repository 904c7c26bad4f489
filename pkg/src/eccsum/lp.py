"""Dense revised simplex (Bland's rule) for small maximization LPs.

Problems are stated as

    maximize    c @ x
    subject to  A[i] @ x  (<=, =, >=)  b[i]
                lower <= x <= upper

and converted internally to ``min c' z, A' z = b' (b' >= 0), z >= 0``.
Bland's rule (lowest-index entering column, lowest-index leaving basic
variable on ratio ties) makes the solve terminate and be reproducible.
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalFailure
from .tolerances import DEFAULT_TOL

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = {LE, EQ, GE}

REFACTOR_EVERY = 50


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    objective: np.ndarray
    matrix: np.ndarray
    relations: tuple
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def build(cls, objective, matrix, relations, rhs, lower=None, upper=None):
        """Coerce and check dimensions. Bounds default to ``0 <= x < inf``."""
        c = np.asarray(objective, dtype=float).ravel()
        n = c.size
        A = np.asarray(matrix, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2:
            raise InputError(f"constraint matrix must be 2-D, got shape {A.shape}")
        rel = tuple(relations)
        b = np.asarray(rhs, dtype=float).ravel()
        if not (A.shape[0] == len(rel) == b.size):
            raise InputError(
                f"row count mismatch: matrix {A.shape[0]}, relations {len(rel)}, rhs {b.size}"
            )
        if A.shape[1] != n:
            raise InputError(f"matrix has {A.shape[1]} columns but objective has {n}")
        bad = [r for r in rel if r not in _RELATIONS]
        if bad:
            raise InputError(f"unknown relation(s) {bad!r}; use '<=', '=', '>='")
        lo = np.zeros(n) if lower is None else np.asarray(lower, dtype=float).ravel()
        hi = np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float).ravel()
        if lo.size != n or hi.size != n:
            raise InputError(f"bounds must have length {n}")
        if np.any(np.isnan(A)) or np.any(np.isnan(b)) or np.any(np.isnan(c)):
            raise InputError("NaN in LP data")
        if np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise InputError("lower bound +inf or upper bound -inf")
        return cls(c, A, rel, b, lo, hi)

    @property
    def shape(self):
        return self.matrix.shape


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray = None
    duals: np.ndarray = None
    objective: float = math.nan
    dual_objective: float = math.nan
    reduced_costs: np.ndarray = None
    iterations: int = 0
    primal_residual: float = math.nan
    slackness_residual: float = math.nan
    info: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def format_lp(lp):
    """Human-readable dump of an LP, for debugging."""
    lines = ["maximize " + _fmt_row(lp.objective), "subject to"]
    for row, rel, rhs in zip(lp.matrix, lp.relations, lp.rhs):
        lines.append(f"  {_fmt_row(row)} {rel} {rhs:.12g}")
    lines.append("bounds")
    for j, (lo, hi) in enumerate(zip(lp.lower, lp.upper)):
        lines.append(f"  {lo:.12g} <= x{j} <= {hi:.12g}")
    return "\n".join(lines)


def _fmt_row(row):
    terms = [f"{v:+.12g} x{j}" for j, v in enumerate(row) if v != 0.0]
    return " ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# conversion to standard form


class _Standard:
    """Bookkeeping for ``x = offset + T @ z``, rows ``A' z = b'``."""

    def __init__(self, lp):
        n = lp.objective.size
        self.n = n
        self.offset = np.zeros(n)
        cols = []  # (original var, coef)
        bound_rows = []  # (std col, width)
        for j in range(n):
            lo, hi = lp.lower[j], lp.upper[j]
            if np.isfinite(lo) and np.isfinite(hi):
                if hi <= lo:
                    self.offset[j] = lo
                    continue
                self.offset[j] = lo
                cols.append((j, 1.0))
                bound_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(lo):
                self.offset[j] = lo
                cols.append((j, 1.0))
            elif np.isfinite(hi):
                self.offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        self.trivially_infeasible = bool(np.any(lp.upper < lp.lower))
        nz = len(cols)
        T = np.zeros((n, nz))
        for k, (j, coef) in enumerate(cols):
            T[j, k] = coef
        self.T = T

        m0 = lp.matrix.shape[0]
        rows = lp.matrix @ T if nz else np.zeros((m0, 0))
        rhs = lp.rhs - lp.matrix @ self.offset
        rels = list(lp.relations)
        if bound_rows:
            extra = np.zeros((len(bound_rows), nz))
            for r, (k, width) in enumerate(bound_rows):
                extra[r, k] = 1.0
            rows = np.vstack([rows, extra])
            rhs = np.concatenate([rhs, [w for _, w in bound_rows]])
            rels += [LE] * len(bound_rows)
        m = rows.shape[0]
        n_slack = sum(r != EQ for r in rels)
        A = np.zeros((m, nz + n_slack))
        A[:, :nz] = rows
        slack_of_row = np.full(m, -1)
        k = nz
        for i, r in enumerate(rels):
            if r == LE:
                A[i, k] = 1.0
            elif r == GE:
                A[i, k] = -1.0
            else:
                continue
            slack_of_row[i] = k
            k += 1
        sign = np.where(rhs < 0, -1.0, 1.0)
        A *= sign[:, None]
        rhs = rhs * sign
        self.A = A
        self.b = rhs
        self.sign = sign
        self.m_orig = m0
        self.nz = nz
        self.slack_of_row = slack_of_row
        self.c = -(lp.objective @ T) if nz else np.zeros(0)
        self.c = np.concatenate([self.c, np.zeros(n_slack)])

    def recover_x(self, z):
        return self.offset + self.T @ z[: self.nz]


# ---------------------------------------------------------------------------
# simplex core


class _Basis:
    def __init__(self, A, b, basis, tol):
        self.A = A
        self.b = b
        self.basis = list(basis)
        self.tol = tol
        self.since_refactor = 0
        self.refactor()

    def refactor(self):
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B) if B.size else np.zeros((0, 0))
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(
                "singular basis on refactorization",
                {"basis": list(self.basis), "cond": math.inf},
            ) from exc
        self.xB = self.Binv @ self.b
        self.since_refactor = 0

    def pivot(self, r, q, col):
        piv = col[r]
        Binv = self.Binv
        row = Binv[r] / piv
        Binv -= np.outer(col, row)
        Binv[r] = row
        xr = self.xB[r] / piv
        self.xB -= col * xr
        self.xB[r] = xr
        self.basis[r] = q
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()


def _run_simplex(st, cost, allowed, tol, max_iter):
    """Minimize ``cost @ z`` from the current basis. Returns status string."""
    A = st.A
    n_cols = A.shape[1]
    opt_tol = tol.feas_tol
    pivot_tol = tol.pivot_tol
    iters = 0
    while True:
        if iters >= max_iter:
            raise NumericalFailure(
                "simplex iteration limit reached", {"iterations": iters, "basis": list(st.basis)}
            )
        cB = cost[st.basis]
        y = cB @ st.Binv
        d = cost - y @ A
        in_basis = np.zeros(n_cols, dtype=bool)
        in_basis[st.basis] = True
        cand = np.flatnonzero(allowed & ~in_basis & (d < -opt_tol))
        if cand.size == 0:
            return "optimal", iters
        q = int(cand[0])
        col = st.Binv @ A[:, q]
        if np.max(np.abs(col), initial=0.0) <= pivot_tol and st.since_refactor:
            st.refactor()
            col = st.Binv @ A[:, q]
        rows = np.flatnonzero(col > pivot_tol)
        if rows.size == 0:
            return "unbounded", iters
        ratios = np.maximum(st.xB[rows], 0.0) / col[rows]
        best = ratios.min()
        tie = rows[ratios <= best + 1e-12 * (1.0 + best)]
        r = int(min(tie, key=lambda i: st.basis[i]))
        st.pivot(r, q, col)
        iters += 1


def solve_lp(lp, tol=DEFAULT_TOL, *, max_iter=100_000, debug=False):
    """Solve ``lp`` (a :class:`LinearProgram`) to optimality or a verdict."""
    if not isinstance(lp, LinearProgram):
        raise InputError("solve_lp expects a LinearProgram; use LinearProgram.build")
    if debug:
        log.debug("solve_lp input:\n%s", format_lp(lp))
    std = _Standard(lp)
    if std.trivially_infeasible:
        return LpSolution(LpStatus.INFEASIBLE, info={"reason": "lower > upper"})
    A, b = std.A, std.b
    m, n = A.shape
    scale = 1.0 + (np.max(np.abs(b)) if b.size else 0.0)

    # initial basis: slack columns that already carry +1, artificials elsewhere
    basis = []
    art_rows = []
    for i in range(m):
        k = std.slack_of_row[i]
        if k >= 0 and A[i, k] == 1.0:
            basis.append(k)
        else:
            basis.append(None)
            art_rows.append(i)
    n_art = len(art_rows)
    if n_art:
        art = np.zeros((m, n_art))
        for a, i in enumerate(art_rows):
            art[i, a] = 1.0
            basis[i] = n + a
        A1 = np.hstack([A, art])
    else:
        A1 = A
    st = _Basis(A1, b, basis, tol)
    iters = 0
    live_rows = np.arange(m)

    if n_art:
        cost1 = np.concatenate([np.zeros(n), np.ones(n_art)])
        allowed = np.ones(n + n_art, dtype=bool)
        _, it = _run_simplex(st, cost1, allowed, tol, max_iter)
        iters += it
        phase1 = float(cost1[st.basis] @ st.xB)
        if phase1 > tol.feas_tol * scale:
            return LpSolution(
                LpStatus.INFEASIBLE, iterations=iters, info={"phase1_objective": phase1}
            )
        # drive remaining artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(st.basis):
            if st.basis[r] < n:
                r += 1
                continue
            in_basis = set(st.basis)
            row = st.Binv[r] @ st.A[:, :n]
            cand = [j for j in np.flatnonzero(np.abs(row) > tol.pivot_tol * 1e3) if j not in in_basis]
            if cand:
                q = int(cand[0])
                st.pivot(r, q, st.Binv @ st.A[:, q])
                r += 1
            else:
                keep = [i for i in range(len(st.basis)) if i != r]
                st.A = st.A[keep]
                st.b = st.b[keep]
                live_rows = live_rows[keep]
                st.basis = [st.basis[i] for i in keep]
                st.refactor()
        st.A = st.A[:, :n]
        st.refactor()

    cost = std.c
    allowed = np.ones(n, dtype=bool)
    status, it = _run_simplex(st, cost, allowed, tol, max_iter)
    iters += it
    if status == "unbounded":
        return LpSolution(LpStatus.UNBOUNDED, iterations=iters)

    st.refactor()
    if np.min(st.xB, initial=0.0) < -tol.feas_tol * scale:
        raise NumericalFailure(
            "basic solution lost feasibility", {"min_xB": float(st.xB.min()), "iterations": iters}
        )
    z = np.zeros(n)
    z[st.basis] = np.maximum(st.xB, 0.0)
    x = std.recover_x(z)

    y_std = -(cost[st.basis] @ st.Binv)  # duals of the maximization, per live std row
    y_rows = np.zeros(A.shape[0])
    y_rows[live_rows] = y_std
    y_rows *= std.sign
    duals = y_rows[: std.m_orig]
    sol = _certify(lp, x, duals, tol)
    sol.iterations = iters
    sol.info["dropped_rows"] = int(A.shape[0] - live_rows.size)
    if debug:
        log.debug("solve_lp: %s obj=%.12g iters=%d", sol.status.value, sol.objective, iters)
    return sol


def _certify(lp, x, duals, tol):
    A, b, c = lp.matrix, lp.rhs, lp.objective
    ax = A @ x
    viol = np.zeros(len(b))
    for i, rel in enumerate(lp.relations):
        if rel == LE:
            viol[i] = max(ax[i] - b[i], 0.0)
        elif rel == GE:
            viol[i] = max(b[i] - ax[i], 0.0)
        else:
            viol[i] = abs(ax[i] - b[i])
    bound_viol = np.maximum(np.maximum(lp.lower - x, x - lp.upper), 0.0)
    primal_res = float(max(viol.max(initial=0.0), bound_viol.max(initial=0.0)))

    red = c - A.T @ duals
    # each reduced cost is paid at the bound it points to
    at = np.where(red > 0, lp.upper, lp.lower)
    at = np.where(np.isfinite(at), at, x)
    dual_obj = float(b @ duals + red @ at)
    obj = float(c @ x)
    cs = np.concatenate([np.abs(duals * (b - ax)), np.abs(red * (x - at))])
    sol = LpSolution(
        LpStatus.OPTIMAL,
        x=x,
        duals=duals,
        objective=obj,
        dual_objective=dual_obj,
        reduced_costs=red,
        primal_residual=primal_res,
        slackness_residual=float(cs.max(initial=0.0)),
    )
    scale = 1.0 + max(abs(obj), np.max(np.abs(b), initial=0.0))
    gap = abs(obj - dual_obj)
    if primal_res > tol.feas_tol * scale or gap > tol.duality_gap_tol * scale:
        raise NumericalFailure(
            "optimal basis failed certification",
            {"primal_residual": primal_res, "duality_gap": gap, "objective": obj},
        )
    return sol
