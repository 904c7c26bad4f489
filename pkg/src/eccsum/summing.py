"""Minimal eccentric p-summing constants and their Pietsch measures.

For a numerator ``B(x, y)`` (``|f(x) - f(y)|`` for a functional, or
``d_N(Tx, Ty)`` for a map) and a finite set ``k`` of test points, the
smallest ``C`` with

    B(x, y)^p <= C^p * sum_{w in k} mu_w |d(x, w) - d(y, w)|^p   for all x, y

over probability vectors ``mu`` is found through the homogeneous LP

    minimize sum_w nu_w  s.t.  sum_w nu_w A[pair, w] >= B[pair]^p,  nu >= 0,

whose optimum is ``C^p`` with ``mu = nu / C^p``. The LP dual gives pair
weights whose summing ratio attains ``C``, which certifies minimality.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSequence, InputError, NumericalFailure
from .lp import GE, LinearProgram, solve_lp
from .metric import FiniteMetricSpace, PairSequence, _check_p, _subset
from .tolerances import DEFAULT_TOL

TINY = 1e-14


@dataclass(frozen=True)
class ProbabilityMeasure:
    support: dict

    def __post_init__(self):
        sup = {int(k): float(v) for k, v in self.support.items()}
        if any(v < 0 or not math.isfinite(v) for v in sup.values()):
            raise InputError("measure weights must be finite and >= 0")
        total = math.fsum(sup.values())
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"measure weights sum to {total!r}, not 1")
        object.__setattr__(self, "support", sup)

    @classmethod
    def dirac(cls, w):
        return cls({w: 1.0})

    @classmethod
    def uniform(cls, points):
        points = sorted(set(points))
        if not points:
            raise InputError("uniform measure needs a nonempty set")
        return cls({w: 1.0 / len(points) for w in points})

    @classmethod
    def from_weights(cls, points, weights):
        """Normalize nonnegative ``weights`` and drop exact zeros."""
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        total = w.sum()
        if total <= 0:
            raise InputError("weights have zero mass")
        w = w / total
        return cls({int(p): float(v) for p, v in zip(points, w) if v > 0})

    def points(self):
        return sorted(self.support)

    def vector(self, n):
        v = np.zeros(n)
        for i, m in self.support.items():
            if not 0 <= i < n:
                raise InputError(f"measure supported at index {i}, outside {n} points")
            v[i] = m
        return v


@dataclass
class PietschCertificate:
    p: float
    constant: float
    measure: ProbabilityMeasure = None
    slack: list = field(default_factory=list)
    dual_witness: PairSequence = None
    witness_pair: tuple = None
    test_points: tuple = ()
    lp_constant: float = math.nan
    skipped_zero: int = 0
    skipped_tiny: list = field(default_factory=list)

    @property
    def finite(self):
        return math.isfinite(self.constant)


@dataclass(frozen=True)
class MetricMap:
    domain: FiniteMetricSpace
    codomain: FiniteMetricSpace
    mapping: tuple

    def __post_init__(self):
        mp = tuple(int(v) for v in self.mapping)
        if len(mp) != self.domain.n:
            raise InputError(f"map gives {len(mp)} images for {self.domain.n} domain points")
        for v in mp:
            if not 0 <= v < self.codomain.n:
                raise InputError(f"image index {v} outside the codomain")
        object.__setattr__(self, "mapping", mp)

    @classmethod
    def identity(cls, space):
        return cls(space, space, tuple(range(space.n)))

    def image_distances(self):
        idx = np.array(self.mapping)
        return self.codomain.d[np.ix_(idx, idx)]


def _eccentric_powers(space, k, p):
    """``A[x, y, j] = |d(x, k_j) - d(y, k_j)|^p``."""
    cols = space.d[:, k]
    return np.abs(cols[:, None, :] - cols[None, :, :]) ** p


def _pietsch(space, numer, k, p, tol):
    """Shared LP for functionals and maps; ``numer[x, y] = B(x, y) >= 0``."""
    _check_p(p)
    k = _subset(space, k)
    n = space.n
    A_all = _eccentric_powers(space, k, p)
    base = np.abs(space.d[:, k][:, None, :] - space.d[:, k][None, :, :])
    pairs, skipped_tiny, zero = [], [], 0
    for x in range(n):
        for y in range(x + 1, n):
            b = numer[x, y]
            amax = base[x, y].max()
            if b == 0:
                zero += 1
            elif b < TINY and amax < TINY:
                skipped_tiny.append((x, y))
            elif amax < TINY:
                return PietschCertificate(
                    p, math.inf, witness_pair=(x, y), test_points=tuple(k),
                    skipped_zero=zero, skipped_tiny=skipped_tiny,
                )
            else:
                pairs.append((x, y))
    cert = PietschCertificate(p, 0.0, test_points=tuple(k), skipped_zero=zero,
                              skipped_tiny=skipped_tiny)
    if not pairs:
        cert.measure = ProbabilityMeasure.uniform(k)
        cert.dual_witness = PairSequence([])
        cert.lp_constant = 0.0
        cert.slack = _slack(space, numer, cert.measure, 0.0, p, k, pairs)
        return cert

    xs = np.array([a for a, _ in pairs])
    ys = np.array([b for _, b in pairs])
    B = numer[xs, ys] ** p
    A = A_all[xs, ys]
    # rows scaled to max 1 and the right side scaled to max 1 keep every LP
    # entry in [0, 1]; scaling f then leaves the LP unchanged
    row_scale = A.max(axis=1)
    r = B / row_scale
    r_scale = r.max()
    nk = len(k)
    lp = LinearProgram.build(-np.ones(nk), A / row_scale[:, None], [GE] * len(pairs),
                             r / r_scale)
    sol = solve_lp(lp, tol)
    if not sol.optimal:
        raise NumericalFailure(f"Pietsch LP ended {sol.status.value}", {"pairs": len(pairs)})
    mass = -sol.objective
    if mass <= 0:
        raise NumericalFailure("Pietsch LP optimum is not positive", {"mass": mass})
    mu = ProbabilityMeasure.from_weights(k, sol.x)
    mu_vec = np.array([mu.support.get(w, 0.0) for w in k])
    integral = A @ mu_vec
    if np.any(integral <= 0):
        raise NumericalFailure("Pietsch measure leaves a pair undominated", {"mass": mass})
    # the constant realized by the returned measure; equals the LP value up to roundoff
    C = float(np.max((B / integral) ** (1.0 / p)))
    cert.constant = C
    cert.lp_constant = float((mass * r_scale) ** (1.0 / p))
    cert.measure = mu
    y = np.abs(sol.duals)
    weights = y / row_scale
    keep = weights > 0
    weights = weights / weights[keep].max()
    cert.dual_witness = PairSequence(
        [pairs[i] for i in np.flatnonzero(keep)], [float(a) for a in weights[keep]]
    )
    cert.slack = _slack(space, numer, mu, C, p, k, pairs)
    return cert


def _slack(space, numer, mu, C, p, k, pairs):
    """``C^p * integral - B^p`` for every pair that carries a constraint."""
    if not pairs:
        return []
    mu_vec = mu.vector(space.n)[k]
    cols = space.d[:, k]
    out = []
    for x, y in pairs:
        integral = float(np.abs(cols[x] - cols[y]) ** p @ mu_vec)
        out.append(((x, y), C**p * integral - numer[x, y] ** p))
    return out


def _as_values(space, f):
    f = np.asarray(f, dtype=float)
    if f.shape != (space.n,):
        raise InputError(f"functional has {f.size} values for a {space.n}-point space")
    if not np.all(np.isfinite(f)):
        raise InputError("functional values must be finite")
    return f


def pietsch_functional(space, f, k, p, tol=DEFAULT_TOL):
    """Minimal eccentric p-summing constant of ``f`` with a Pietsch measure on ``k``."""
    f = _as_values(space, f)
    numer = np.abs(f[:, None] - f[None, :])
    return _pietsch(space, numer, k, p, tol)


def pietsch_map(t, k, p, tol=DEFAULT_TOL):
    """Same LP for a map ``T: M -> N`` with numerator ``d_N(Tx, Ty)``."""
    return _pietsch(t.domain, t.image_distances(), k, p, tol)


@dataclass
class DominationReport:
    passed: bool
    worst_violation: float
    worst_pair: tuple
    tight_pairs: list = field(default_factory=list)


def verify_domination(space, f, mu, c, p, tol=DEFAULT_TOL):
    """Check ``|f(x) - f(y)| <= c (sum_w mu_w |d(x,w) - d(y,w)|^p)^(1/p)`` for all pairs.

    The violation of a pair is the left side minus the right side; the
    report passes iff the worst one is at most ``tol.feas_tol``.
    """
    _check_p(p)
    f = _as_values(space, f)
    m = mu.vector(space.n)
    supp = np.flatnonzero(m)
    cols = space.d[:, supp]
    integral = (np.abs(cols[:, None, :] - cols[None, :, :]) ** p) @ m[supp]
    rhs = c * integral ** (1.0 / p)
    lhs = np.abs(f[:, None] - f[None, :])
    viol = lhs - rhs
    iu = np.triu_indices(space.n, 1)
    if iu[0].size == 0:
        return DominationReport(True, 0.0, None)
    v = viol[iu]
    j = int(np.argmax(v))
    worst = float(v[j])
    tight = [
        (int(a), int(b)) for a, b, val, l in zip(*iu, v, lhs[iu]) if l > 0 and abs(val) <= tol.feas_tol
    ]
    return DominationReport(worst <= tol.feas_tol, worst, (int(iu[0][j]), int(iu[1][j])), tight)


def domination_constant(space, f, mu, p):
    """Smallest ``c`` for which ``verify_domination`` holds with this ``mu``."""
    _check_p(p)
    f = _as_values(space, f)
    m = mu.vector(space.n)
    supp = np.flatnonzero(m)
    cols = space.d[:, supp]
    integral = (np.abs(cols[:, None, :] - cols[None, :, :]) ** p) @ m[supp]
    lhs = np.abs(f[:, None] - f[None, :])
    iu = np.triu_indices(space.n, 1)
    lhs, integral = lhs[iu], integral[iu]
    if not np.any(lhs > 0):
        return 0.0
    if np.any((integral <= 0) & (lhs > 0)):
        return math.inf
    pos = lhs > 0
    return float(np.max(lhs[pos] / integral[pos] ** (1.0 / p)))


def summing_ratio_oracle(space, f, k, p, seq):
    """``(sum a|df|^p)^(1/p) / sup_{w in k} (sum a|dd_w|^p)^(1/p)`` for one sequence.

    Every value is a lower bound for the minimal summing constant.
    """
    _check_p(p)
    f = _as_values(space, f)
    k = _subset(space, k)
    seq.check(space.n)
    xs, ys, a = seq.arrays()
    num = float(np.sum(a * np.abs(f[xs] - f[ys]) ** p))
    cols = space.d[:, k]
    den = float(np.max((a[:, None] * np.abs(cols[xs] - cols[ys]) ** p).sum(axis=0), initial=0.0))
    if den <= 0:
        raise DegenerateSequence("eccentric denominator is zero for this sequence")
    return (num / den) ** (1.0 / p)


@dataclass
class ApproximatingResult:
    constant: float
    certificates: dict
    witness: tuple = None

    @property
    def finite(self):
        return math.isfinite(self.constant)


def approximating_constant(t, k1, k2, p, tol=DEFAULT_TOL):
    """Eccentrically p-approximating constant of ``t`` for test sets ``k1``, ``k2``.

    The left supremum over ``z in k2`` splits pointwise, so this is the
    largest summing constant of ``x -> d_N(Tx, z)``; each ``z`` keeps its own
    measure. An infinite ``z`` makes the result infinite with witness
    ``(z, pair)``.
    """
    k2 = _subset(t.codomain, k2)
    k1 = _subset(t.domain, k1)
    idx = np.array(t.mapping)
    certs = {}
    worst, witness = 0.0, None
    for z in k2:
        fz = t.codomain.d[idx, z]
        cert = pietsch_functional(t.domain, fz, k1, p, tol)
        certs[z] = cert
        if not cert.finite:
            if witness is None or math.isfinite(worst):
                witness = (z, cert.witness_pair)
            worst = math.inf
        elif cert.constant > worst:
            worst = cert.constant
    return ApproximatingResult(worst, certs, witness if math.isinf(worst) else None)


def mix_measures(result, nu):
    """``mu_M = sum_z nu_z mu_z`` over the per-``z`` Pietsch measures."""
    if not result.finite:
        raise InputError("cannot mix measures of an infinite result")
    total = {}
    for z, wz in nu.support.items():
        if z not in result.certificates:
            raise InputError(f"mixing weight on {z}, which is not a test point")
        for w, m in result.certificates[z].measure.support.items():
            total[w] = total.get(w, 0.0) + wz * m
    return ProbabilityMeasure.from_weights(list(total), list(total.values()))


def verify_mixed_domination(t, nu, mu_m, q, p, tol=DEFAULT_TOL):
    """Check the averaged domination for every pair of domain points:

    ``sum_z nu_z |d_N(Tx, z) - d_N(Ty, z)|^p <= q^p sum_w mu_w |d_M(x, w) - d_M(y, w)|^p``.

    Returns the worst excess (left minus right); nonpositive means it holds.
    """
    idx = np.array(t.mapping)
    nv = nu.vector(t.codomain.n)
    mv = mu_m.vector(t.domain.n)
    ln = t.codomain.d[idx]
    left = (np.abs(ln[:, None, :] - ln[None, :, :]) ** p) @ nv
    dm = t.domain.d
    right = (np.abs(dm[:, None, :] - dm[None, :, :]) ** p) @ mv
    return float(np.max(left - q**p * right))
