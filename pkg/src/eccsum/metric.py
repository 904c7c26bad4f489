"""Finite metric spaces, eccentric pseudometrics and sequence proximities.

Points are addressed by integer index; string ids are kept for I/O.
Sequences of pairs carry optional nonnegative weights ``a_i`` that multiply
the p-th powers, so every proximity below has the shape
``(sum_i a_i * term_i ** p) ** (1/p)``.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, UnsupportedError
from .lp import EQ, LE, LinearProgram, solve_lp
from .tolerances import DEFAULT_TOL

EXACT_WC_LIMIT = 16
DEFAULT_STARTS = 32


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    points: tuple
    d: np.ndarray
    base_point: int = 0
    pseudometric: bool = False

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {d.shape}")
        if d.shape[0] < 1:
            raise InputError("a metric space needs at least one point")
        pts = tuple(str(p) for p in self.points)
        if len(pts) != d.shape[0]:
            raise InputError(f"{len(pts)} point ids for a {d.shape[0]}x{d.shape[0]} matrix")
        if len(set(pts)) != len(pts):
            raise InputError("point ids must be unique")
        if not 0 <= self.base_point < len(pts):
            raise InputError(f"base point index {self.base_point} out of range")
        if not np.all(np.isfinite(d)):
            raise InputError("distance matrix has non-finite entries")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, coords, ids=None, base_point=0):
        """Euclidean distances between the rows of ``coords``."""
        x = np.asarray(coords, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
        ids = ids if ids is not None else [f"x{i}" for i in range(len(x))]
        return cls(tuple(ids), d, base_point)

    @classmethod
    def discrete(cls, n, ids=None):
        ids = ids if ids is not None else [f"X{i + 1}" for i in range(n)]
        return cls(tuple(ids), 1.0 - np.eye(n))

    def __len__(self):
        return len(self.points)

    @property
    def n(self):
        return len(self.points)

    def index(self, pid):
        try:
            return self.points.index(str(pid))
        except ValueError:
            raise InputError(f"unknown point id {pid!r}") from None

    def indices(self, ids):
        return [self.index(p) for p in ids]


@dataclass(frozen=True)
class Molecule:
    """Zero-sum finitely supported coefficients, keyed by point index."""

    coefficients: dict

    def __post_init__(self):
        coeffs = {int(k): float(v) for k, v in self.coefficients.items()}
        total = math.fsum(coeffs.values())
        if abs(total) > 1e-12:
            raise InputError(f"molecule coefficients sum to {total!r}, not 0")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def pair(cls, x, y, scale=1.0):
        if x == y:
            return cls({})
        return cls({x: scale, y: -scale})

    @classmethod
    def from_vector(cls, v):
        return cls({i: float(c) for i, c in enumerate(v) if c != 0.0})

    def vector(self, n):
        v = np.zeros(n)
        for i, c in self.coefficients.items():
            if not 0 <= i < n:
                raise InputError(f"molecule index {i} outside a {n}-point space")
            v[i] += c
        return v

    def support(self):
        return sorted(i for i, c in self.coefficients.items() if c != 0.0)


@dataclass(frozen=True)
class PairSequence:
    pairs: tuple
    weights: tuple = None

    def __post_init__(self):
        pairs = tuple((int(x), int(y)) for x, y in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.weights is not None:
            w = tuple(float(a) for a in self.weights)
            if len(w) != len(pairs):
                raise InputError(f"{len(w)} weights for {len(pairs)} pairs")
            if any(a < 0 or not math.isfinite(a) for a in w):
                raise InputError("pair weights must be finite and >= 0")
            object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.pairs)

    def weight_array(self):
        if self.weights is None:
            return np.ones(len(self.pairs))
        return np.array(self.weights, dtype=float)

    def arrays(self):
        """``(left indices, right indices, weights)`` as numpy arrays."""
        if not self.pairs:
            return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
        xs, ys = zip(*self.pairs)
        return np.array(xs), np.array(ys), self.weight_array()

    def check(self, n):
        for x, y in self.pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise InputError(f"pair ({x}, {y}) outside a {n}-point space")


# ---------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    axiom: str
    witness: tuple
    amount: float


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def __bool__(self):
        return self.valid


def validate_metric(space, tol=DEFAULT_TOL):
    """List every violated axiom with a witnessing pair or triple (by id)."""
    d = space.d
    n = space.n
    eps = tol.metric_tol
    ids = space.points
    report = ValidationReport()
    for i in range(n):
        if abs(d[i, i]) > eps:
            report.violations.append(Violation("zero_diagonal", (ids[i],), float(abs(d[i, i]))))
    for i, j in itertools.combinations(range(n), 2):
        if abs(d[i, j] - d[j, i]) > eps:
            report.violations.append(
                Violation("symmetry", (ids[i], ids[j]), float(abs(d[i, j] - d[j, i])))
            )
    neg = np.argwhere(d < -eps)
    for i, j in neg:
        report.violations.append(Violation("nonnegativity", (ids[i], ids[j]), float(-d[i, j])))
    if not space.pseudometric:
        for i, j in itertools.combinations(range(n), 2):
            if max(d[i, j], d[j, i]) <= eps:
                report.violations.append(
                    Violation("separation", (ids[i], ids[j]), float(max(d[i, j], d[j, i])))
                )
    # d[a, c] > d[a, b] + d[b, c]
    excess = d[:, None, :] - d[:, :, None] - d[None, :, :]
    for a, b, c in np.argwhere(excess > eps):
        if a == c or a == b or b == c:
            continue
        report.violations.append(
            Violation("triangle", (ids[a], ids[b], ids[c]), float(excess[a, b, c]))
        )
    return report


# ---------------------------------------------------------------------------
# eccentric pseudometric and proximities


def _subset(space, s):
    s = [int(i) for i in s]
    if not s:
        raise InputError("subset must be nonempty")
    for i in s:
        if not 0 <= i < space.n:
            raise InputError(f"subset index {i} out of range")
    return sorted(set(s))


def eccentric_pseudometric(space, s):
    """``sup_{y in s} |d(x1, y) - d(x2, y)|`` for every pair of points."""
    s = _subset(space, s)
    cols = space.d[:, s]
    return np.abs(cols[:, None, :] - cols[None, :, :]).max(axis=2)


def _check_p(p):
    if not (p >= 1 and math.isfinite(p)):
        raise InputError(f"p must be a finite real >= 1, got {p!r}")


def _psum(terms, weights, p):
    if terms.size == 0:
        return 0.0
    return float(np.sum(weights * terms**p) ** (1.0 / p))


def d_ac(space, seq, p):
    """Absolute proximity ``(sum a_i d(x_i, y_i)^p)^(1/p)``."""
    _check_p(p)
    seq.check(space.n)
    xs, ys, a = seq.arrays()
    return _psum(space.d[xs, ys], a, p)


def eccentric_profile(space, seq, p, s):
    """Per-``y`` values ``(sum a_i |d(x_i,y) - d(y_i,y)|^p)^(1/p)`` for ``y`` in ``s``."""
    _check_p(p)
    seq.check(space.n)
    s = _subset(space, s)
    xs, ys, a = seq.arrays()
    if xs.size == 0:
        return s, np.zeros(len(s))
    diff = np.abs(space.d[np.ix_(xs, s)] - space.d[np.ix_(ys, s)])
    return s, (a[:, None] * diff**p).sum(axis=0) ** (1.0 / p)


def d_cc(space, seq, p, s=None, return_witness=False):
    """Eccentric proximity: sup over ``y in s`` (default: all points).

    With ``return_witness`` the attaining point index is returned as well;
    ties go to the smallest index.
    """
    if s is None:
        s = range(space.n)
    s, vals = eccentric_profile(space, seq, p, s)
    k = int(np.argmax(vals))
    value = float(vals[k])
    if return_witness:
        return value, s[k]
    return value


def f_y(space, y):
    """``x -> d(x, y) - d(y, base)``: 1-Lipschitz and zero at the base point."""
    return space.d[:, y] - space.d[y, space.base_point]


def pairing(m, f):
    """``<m, f> = sum_x m(x) f(x)``."""
    f = np.asarray(f, dtype=float)
    return math.fsum(c * f[i] for i, c in m.coefficients.items())


# ---------------------------------------------------------------------------
# Arens-Eells norm


def _mcshane(space, pts, vals):
    """Extend a 1-Lipschitz function from ``pts`` to the whole space."""
    d = space.d
    return np.min(vals[None, :] + d[:, pts], axis=1)


def ae_norm(space, m, tol=DEFAULT_TOL, *, restrict=True, return_witness=True):
    """Arens-Eells norm of a molecule, by LP over 1-Lipschitz functions.

    Solves ``max sum m(x) f(x)`` subject to ``f(x) - f(y) <= d(x, y)`` and
    ``f(base) = 0``. With ``restrict`` (default) the LP only involves the
    support and the base point, and the witness is McShane-extended to the
    rest of the space; this needs ``d`` to satisfy the triangle inequality.

    Returns ``(value, f)``, or only the value if ``return_witness`` is False.
    """
    if not isinstance(m, Molecule):
        m = Molecule(m)
    n = space.n
    coeff = m.vector(n)
    base = space.base_point
    if restrict:
        pts = sorted(set(m.support()) | {base})
    else:
        pts = list(range(n))
    k = len(pts)
    if not np.any(coeff[pts]):
        f = np.zeros(n)
        return (0.0, f) if return_witness else 0.0
    rows, rhs = [], []
    dd = space.d
    for a in range(k):
        for b in range(k):
            if a == b:
                continue
            r = np.zeros(k)
            r[a], r[b] = 1.0, -1.0
            rows.append(r)
            rhs.append(dd[pts[a], pts[b]])
    ib = pts.index(base)
    lower = np.full(k, -np.inf)
    upper = np.full(k, np.inf)
    lower[ib] = upper[ib] = 0.0
    lp = LinearProgram.build(coeff[pts], rows, [LE] * len(rows), rhs, lower, upper)
    sol = solve_lp(lp, tol)
    if not sol.optimal:
        raise InputError(f"AE norm LP ended {sol.status.value}; is d a metric?")
    value = max(sol.objective, 0.0)
    if not return_witness:
        return value
    vals = sol.x.copy()
    vals[ib] = 0.0
    if restrict and k < n:
        f = _mcshane(space, pts, vals)
        f -= f[base]
    else:
        f = np.zeros(n)
        f[pts] = vals
    return value, f


def sequence_molecule(seq, lam, p):
    """``sum_i lam_i a_i^(1/p) (chi_{x_i} - chi_{y_i})`` as a molecule."""
    xs, ys, a = seq.arrays()
    scale = np.asarray(lam, dtype=float) * a ** (1.0 / p)
    coeffs = {}
    for x, y, c in zip(xs, ys, scale):
        if x == y or c == 0.0:
            continue
        coeffs[int(x)] = coeffs.get(int(x), 0.0) + c
        coeffs[int(y)] = coeffs.get(int(y), 0.0) - c
    coeffs = {k: v for k, v in coeffs.items() if v != 0.0}
    # cancel roundoff so the zero-sum check is exact
    if coeffs:
        drift = math.fsum(coeffs.values())
        k0 = min(coeffs)
        coeffs[k0] -= drift
    return Molecule(coeffs)


@dataclass
class WcResult:
    lower: float
    upper: float
    method: str
    witness: np.ndarray = None
    signs: tuple = None

    @property
    def value(self):
        """Exact value when known, else None."""
        if self.method == "exact" or self.upper - self.lower <= 1e-12 * (1.0 + self.upper):
            return self.lower
        return None


def _effective(seq, space):
    xs, ys, a = seq.arrays()
    keep = [i for i in range(len(xs)) if xs[i] != ys[i] and a[i] > 0 and space.d[xs[i], ys[i]] > 0]
    return PairSequence([seq.pairs[i] for i in keep], [float(a[i]) for i in keep])


def _functional_value(space, seq, f, p):
    xs, ys, a = seq.arrays()
    return _psum(np.abs(f[xs] - f[ys]), a, p)


def d_wc(space, seq, p, mode="auto", *, tol=DEFAULT_TOL, exact_limit=EXACT_WC_LIMIT,
         starts=DEFAULT_STARTS, seed=0):
    """Weak proximity ``sup_{f in ball} (sum a_i |f(x_i) - f(y_i)|^p)^(1/p)``.

    ``mode="exact"`` (p = 1 only) enumerates sign vectors and takes the
    largest Arens-Eells norm. ``mode="bracket"`` returns a certified
    ``[lower, upper]`` with ``upper = d_ac`` and ``lower`` the best of the
    eccentric proximity and a multi-start alternating ascent. ``"auto"``
    picks exact when allowed.
    """
    _check_p(p)
    seq.check(space.n)
    if mode not in ("auto", "exact", "bracket"):
        raise InputError(f"unknown d_wc mode {mode!r}")
    eff = _effective(seq, space)
    n_eff = len(eff)
    if mode == "exact" and p != 1:
        raise UnsupportedError("exact d_wc needs p = 1; use mode='bracket' for p > 1")
    if mode == "exact" and n_eff > exact_limit:
        raise UnsupportedError(
            f"exact d_wc enumerates 2^{n_eff} sign vectors; limit is {exact_limit}"
        )
    if mode == "auto":
        mode = "exact" if p == 1 and n_eff <= exact_limit else "bracket"
    if n_eff == 0:
        return WcResult(0.0, 0.0, mode, np.zeros(space.n), ())
    if mode == "exact":
        return _wc_exact(space, eff, tol)
    return _wc_bracket(space, eff, p, tol, starts, seed)


def _wc_exact(space, seq, tol):
    n = len(seq)
    best, best_f, best_signs = -1.0, None, None
    seen = {}
    for bits in itertools.product((1.0, -1.0), repeat=n - 1):
        lam = (1.0,) + bits
        m = sequence_molecule(seq, lam, 1.0)
        key = tuple(sorted((k, round(v, 13)) for k, v in m.coefficients.items()))
        if key in seen:
            continue
        val, f = ae_norm(space, m, tol)
        seen[key] = val
        if val > best + 1e-15:
            best, best_f, best_signs = val, f, lam
    upper = d_ac(space, seq, 1.0)
    best = min(best, upper)
    return WcResult(best, best, "exact", best_f, best_signs)


def _holder_direction(g, p):
    """Unit vector in l^{p'} attaining ``sum lam_i g_i = ||g||_p``."""
    if p == 1:
        lam = np.sign(g)
        lam[lam == 0] = 1.0
        return lam
    norm = np.sum(np.abs(g) ** p) ** (1.0 / p)
    if norm == 0:
        return None
    return np.sign(g) * (np.abs(g) / norm) ** (p - 1)


def _wc_bracket(space, seq, p, tol, starts, seed):
    xs, ys, a = seq.arrays()
    w = a ** (1.0 / p)
    upper = d_ac(space, seq, p)
    lower, y_star = d_cc(space, seq, p, return_witness=True)
    best_f = f_y(space, y_star)
    rng = np.random.default_rng(seed)
    n = len(seq)
    q = math.inf if p == 1 else p / (p - 1)
    for k in range(starts):
        if k == 0:
            lam = _holder_direction(w * (best_f[xs] - best_f[ys]), p)
        else:
            lam = rng.normal(size=n)
            lam /= np.linalg.norm(lam, ord=q)
        f = None
        prev = -1.0
        for _ in range(50):
            if lam is None:
                break
            m = sequence_molecule(seq, lam, p)
            _, f = ae_norm(space, m, tol)
            val = _functional_value(space, seq, f, p)
            if val > lower:
                lower, best_f = val, f
            if val <= prev + 1e-13 * (1.0 + val):
                break
            prev = val
            lam = _holder_direction(w * (f[xs] - f[ys]), p)
    lower = min(lower, upper)
    return WcResult(lower, upper, "bracket", best_f)


def empirical_k_norming(space, seq, s, tol=DEFAULT_TOL):
    """Largest ``||m|| / sup_{y in s} |<m, f_y>|`` over sign-vector molecules.

    Only the molecules ``sum_i lam_i a_i (chi_{x_i} - chi_{y_i})`` with
    ``lam`` in {-1, 1}^n are examined, so this is an empirical constant for
    the family generated by ``seq``. Returns ``inf`` when some molecule has
    positive norm but vanishes against every ``f_y``.
    """
    s = _subset(space, s)
    eff = _effective(seq, space)
    n = len(eff)
    if n == 0:
        return 0.0
    fys = np.stack([f_y(space, y) for y in s])
    k = 0.0
    for bits in itertools.product((1.0, -1.0), repeat=n - 1):
        m = sequence_molecule(eff, (1.0,) + bits, 1.0)
        norm = ae_norm(space, m, tol, return_witness=False)
        if norm <= 1e-14:
            continue
        v = m.vector(space.n)
        den = float(np.max(np.abs(fys @ v)))
        if den <= 1e-14:
            return math.inf
        k = max(k, norm / den)
    return k


def lip_constant(d, f):
    """``max |f(x) - f(y)| / d(x, y)``; ``inf`` if a zero distance separates values.

    ``d`` may be a :class:`FiniteMetricSpace` or a square matrix.
    """
    D = d.d if isinstance(d, FiniteMetricSpace) else np.asarray(d, dtype=float)
    f = np.asarray(f, dtype=float)
    if f.shape != (D.shape[0],):
        raise InputError(f"function has {f.size} values for {D.shape[0]} points")
    df = np.abs(f[:, None] - f[None, :])
    iu = np.triu_indices(D.shape[0], 1)
    df, dd = df[iu], D[iu]
    if df.size == 0 or not np.any(df > 0):
        return 0.0
    if np.any((dd <= 0) & (df > 0)):
        return math.inf
    pos = dd > 0
    return float(np.max(df[pos] / dd[pos]))
