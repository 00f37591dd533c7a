"""Lexicographic order, active sets, critical cones and polyhedral cone calculus."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.optimize import nnls

from . import calculus
from .config import DEFAULT_SEED, DEFAULT_TOL, MAX_CONE_DIM, Tolerances
from .model import ProblemSpec


class InfeasiblePointError(ValueError):
    def __init__(self, index: int, value: float):
        super().__init__(f"point violates constraint g{index + 1} (value {value:.3e})")
        self.index = index
        self.value = value


class NotCriticalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# lexicographic order
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LexPair:
    first: float
    second: float


def lex_cmp(a: LexPair, b: LexPair, strict: bool = False, tol: float = DEFAULT_TOL.activity) -> bool:
    """``a <=_lex b`` (or ``a <_lex b`` when ``strict``); first coordinates within ``tol`` tie."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if a.first < b.first - tol:
        return True
    if abs(a.first - b.first) <= tol:
        if strict:
            return a.second < b.second - tol
        return a.second <= b.second + tol
    return False


# ---------------------------------------------------------------------------
# active index sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ActiveSets:
    I_active: frozenset
    I_dir: frozenset
    L_dir: frozenset


def check_feasible(P: ProblemSpec, x, tol: float = DEFAULT_TOL.activity) -> np.ndarray:
    g = P.g(x)
    for i, gi in enumerate(g):
        if gi > tol:
            raise InfeasiblePointError(i, float(gi))
    return g


def active_constraints(P: ProblemSpec, x, tol: float = DEFAULT_TOL.activity) -> frozenset:
    g = check_feasible(P, x, tol)
    return frozenset(i for i, gi in enumerate(g) if gi >= -tol)


def active_sets(P: ProblemSpec, x, u, tol: float = DEFAULT_TOL.activity) -> ActiveSets:
    u = np.asarray(u, dtype=float)
    I_act = active_constraints(P, x, tol)
    Jg = P.jac_g(x)
    Jf = P.jac_f(x)
    I_dir = frozenset(i for i in I_act if abs(float(Jg[i] @ u)) <= tol)
    L_dir = frozenset(l for l in range(P.m) if abs(float(Jf[l] @ u)) <= tol)
    return ActiveSets(I_act, I_dir, L_dir)


# ---------------------------------------------------------------------------
# exact / floating linear algebra helpers
# ---------------------------------------------------------------------------


def _is_decimal(x: float, digits: int = 12) -> bool:
    s = repr(float(x)).lower().lstrip("-")
    mant = s.split("e")[0].replace(".", "").lstrip("0")
    return len(mant) <= digits


class _Field:
    """Arithmetic over either Fraction (exact) or float with a pivot tolerance."""

    def __init__(self, exact: bool, pivot: float):
        self.exact = exact
        self.pivot = pivot

    def conv(self, x):
        return Fraction(repr(float(x))) if self.exact else float(x)

    def is_zero(self, x) -> bool:
        return x == 0 if self.exact else abs(x) <= self.pivot

    def dot(self, a, b):
        return sum((ai * bi for ai, bi in zip(a, b)), Fraction(0) if self.exact else 0.0)

    def normalize(self, v):
        if self.exact:
            m = max(abs(c) for c in v)
            return [c / m for c in v]
        nrm = float(np.linalg.norm(v))
        return [c / nrm for c in v]

    def nullspace(self, rows, n):
        """Basis of ``{w : r . w = 0 for r in rows}`` via reduced row echelon form."""
        M = [list(r) for r in rows]
        pivots = []
        r = 0
        for col in range(n):
            if r >= len(M):
                break
            best = None
            for i in range(r, len(M)):
                if not self.is_zero(M[i][col]) and (best is None or abs(M[i][col]) > abs(M[best][col])):
                    best = i
                    if self.exact:
                        break
            if best is None:
                continue
            M[r], M[best] = M[best], M[r]
            pv = M[r][col]
            M[r] = [c / pv for c in M[r]]
            for i in range(len(M)):
                if i != r and not self.is_zero(M[i][col]):
                    fac = M[i][col]
                    M[i] = [a - fac * b for a, b in zip(M[i], M[r])]
            pivots.append(col)
            r += 1
        free = [c for c in range(n) if c not in pivots]
        zero = Fraction(0) if self.exact else 0.0
        one = Fraction(1) if self.exact else 1.0
        basis = []
        for fc in free:
            v = [zero] * n
            v[fc] = one
            for i, pc in enumerate(pivots):
                v[pc] = -M[i][fc]
            basis.append(v)
        return basis

    def solve_square(self, M):
        """Inverse of a square matrix given as a list of rows."""
        d = len(M)
        zero = Fraction(0) if self.exact else 0.0
        one = Fraction(1) if self.exact else 1.0
        aug = [list(M[i]) + [one if j == i else zero for j in range(d)] for i in range(d)]
        for col in range(d):
            best = max(range(col, d), key=lambda i: abs(aug[i][col]))
            aug[col], aug[best] = aug[best], aug[col]
            pv = aug[col][col]
            aug[col] = [c / pv for c in aug[col]]
            for i in range(d):
                if i != col and aug[i][col] != 0:
                    fac = aug[i][col]
                    aug[i] = [a - fac * b for a, b in zip(aug[i], aug[col])]
        return [row[d:] for row in aug]

    def rank(self, rows, n) -> int:
        return n - len(self.nullspace(rows, n))


# ---------------------------------------------------------------------------
# polyhedral cones
# ---------------------------------------------------------------------------


class PolyhedralCone:
    """``{w : <c, w> <= 0 for c in ineqs, <e, w> = 0 for e in eqs}`` in R^n.

    Extreme rays and a lineality basis are computed on first access by the
    double description method and cached; the object is otherwise immutable.
    """

    def __init__(self, n: int, ineqs=(), eqs=(), tol: Tolerances = DEFAULT_TOL):
        self.n = int(n)
        self.ineqs = np.asarray(ineqs, dtype=float).reshape(-1, self.n) if len(ineqs) else np.zeros((0, self.n))
        self.eqs = np.asarray(eqs, dtype=float).reshape(-1, self.n) if len(eqs) else np.zeros((0, self.n))
        # zero rows carry no information
        self.ineqs = self.ineqs[np.any(self.ineqs != 0.0, axis=1)]
        self.eqs = self.eqs[np.any(self.eqs != 0.0, axis=1)]
        self.tol = tol

    def __repr__(self):
        return f"PolyhedralCone(n={self.n}, ineqs={self.ineqs.tolist()}, eqs={self.eqs.tolist()})"

    def with_constraints(self, ineqs=(), eqs=()) -> "PolyhedralCone":
        ineqs = np.asarray(ineqs, dtype=float).reshape(-1, self.n)
        eqs = np.asarray(eqs, dtype=float).reshape(-1, self.n)
        return PolyhedralCone(self.n, np.vstack([self.ineqs, ineqs]), np.vstack([self.eqs, eqs]), self.tol)

    def contains(self, w, tol: float = 1e-9) -> bool:
        w = np.asarray(w, dtype=float)
        scale = 1.0 + float(np.linalg.norm(w))
        ok_i = np.all(self.ineqs @ w <= tol * scale * (1 + np.linalg.norm(self.ineqs, axis=1)))
        ok_e = np.all(np.abs(self.eqs @ w) <= tol * scale * (1 + np.linalg.norm(self.eqs, axis=1)))
        return bool(ok_i and ok_e)

    @property
    def exact(self) -> bool:
        return all(_is_decimal(v) for v in np.concatenate([self.ineqs.ravel(), self.eqs.ravel()]))

    @cached_property
    def _generators(self):
        return extreme_rays(self)

    @property
    def rays(self) -> list:
        return self._generators[0]

    @property
    def lineality(self) -> list:
        return self._generators[1]

    def is_zero(self) -> bool:
        return not self.rays and not self.lineality


class ConeDimensionError(ValueError):
    pass


def _double_description(F: _Field, A, d):
    """Extreme rays of the pointed cone ``{y in R^d : A y <= 0}`` (A has rank d)."""
    # initial simplicial cone from d independent rows
    chosen = []
    for i, row in enumerate(A):
        if F.rank([A[j] for j in chosen] + [row], d) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == d:
                break
    Minv = F.solve_square([A[i] for i in chosen])
    rays = []
    for k in range(d):
        r = F.normalize([-Minv[i][k] for i in range(d)])
        rays.append((r, frozenset(c for c in chosen if c != chosen[k])))
    processed = list(chosen)
    for h in range(len(A)):
        if h in chosen:
            continue
        vals = [F.dot(A[h], r) for r, _ in rays]
        pos = [k for k, v in enumerate(vals) if not F.is_zero(v) and v > 0]
        neg = [k for k, v in enumerate(vals) if not F.is_zero(v) and v < 0]
        zer = [k for k, v in enumerate(vals) if F.is_zero(v)]
        new = [rays[k] for k in neg] + [(rays[k][0], rays[k][1] | {h}) for k in zer]
        for p in pos:
            for q in neg:
                common = rays[p][1] & rays[q][1]
                if len(common) < d - 2:
                    continue
                adjacent = True
                for k, (_, z) in enumerate(rays):
                    if k != p and k != q and common <= z:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vq = vals[p], vals[q]
                comb = [vp * a - vq * b for a, b in zip(rays[q][0], rays[p][0])]
                new.append((F.normalize(comb), common | {h}))
        rays = new
        processed.append(h)
    return [r for r, _ in rays]


def extreme_rays(C: PolyhedralCone):
    """``(rays, lineality)`` with ``C = cone(rays) + span(lineality)``.

    Rays are unit vectors and pairwise non-parallel; the lineality basis is
    orthonormal.  Decimal-representable data use exact rational arithmetic,
    otherwise floating point with the configured pivot tolerance.
    """
    n = C.n
    if n > MAX_CONE_DIM:
        raise ConeDimensionError(f"extreme ray enumeration is capped at n <= {MAX_CONE_DIM}")
    F = _Field(C.exact, C.tol.pivot)
    if F.exact:
        A = [[F.conv(v) for v in row] for row in C.ineqs]
        E = [[F.conv(v) for v in row] for row in C.eqs]
    else:
        A = [list(row / np.linalg.norm(row)) for row in C.ineqs]
        E = [list(row / np.linalg.norm(row)) for row in C.eqs]
    L = F.nullspace(A + E, n)
    S = F.nullspace(E + L, n)  # null(E) intersected with the orthogonal complement of L
    d = len(S)
    rays = []
    if d > 0:
        AB = [[F.dot(row, [S[k][j] for j in range(n)]) for k in range(d)] for row in A]
        for y in _double_description(F, AB, d):
            w = np.array([float(sum(y[k] * S[k][j] for k in range(d))) for j in range(n)])
            rays.append(w / np.linalg.norm(w))
    rays = _dedupe_parallel(rays)
    lin = []
    if L:
        Q, _ = np.linalg.qr(np.array([[float(v) for v in vec] for vec in L]).T)
        lin = [Q[:, k].copy() for k in range(Q.shape[1])]
    return rays, lin


def _dedupe_parallel(vectors, tol=1e-9):
    out = []
    for v in vectors:
        if not any(np.linalg.norm(v - o) <= tol for o in out):
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# critical cones
# ---------------------------------------------------------------------------


@dataclass
class CriticalCone:
    n: int
    branches: list

    def contains(self, u, tol: float = 1e-9) -> bool:
        return any(b.contains(u, tol) for b in self.branches)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.branches)


def critical_cone(P: ProblemSpec, x, tol: float = DEFAULT_TOL.activity, tols: Tolerances = DEFAULT_TOL) -> CriticalCone:
    """One polyhedral branch per objective forced to first-order equality."""
    I_act = sorted(active_constraints(P, x, tol))
    Jf = P.jac_f(x)
    Jg = P.jac_g(x)
    base = [Jf[k] for k in range(P.m)] + [Jg[i] for i in I_act]
    branches = [PolyhedralCone(P.n, base, [Jf[l]], tols) for l in range(P.m)]
    return CriticalCone(P.n, branches)


def critical_violation(P: ProblemSpec, x, u, tol: float = DEFAULT_TOL.activity) -> str | None:
    """Why ``u`` is not a critical direction, or None if it is."""
    u = np.asarray(u, dtype=float)
    Jf = P.jac_f(x)
    Jg = P.jac_g(x)
    df = Jf @ u
    for l, v in enumerate(df):
        if v > tol:
            return f"<grad f{l + 1}, u> = {v:.6g} > 0"
    if not np.any(np.abs(df) <= tol):
        return "no objective has <grad f_l, u> = 0"
    for i in sorted(active_constraints(P, x, tol)):
        v = float(Jg[i] @ u)
        if v > tol:
            return f"<grad g{i + 1}, u> = {v:.6g} > 0 for active constraint"
    return None


def direction_cone(P: ProblemSpec, x, u, tol: float = DEFAULT_TOL.activity, tols: Tolerances = DEFAULT_TOL) -> PolyhedralCone:
    """``{w : <grad g_i, w> <= 0 for i in I(x; u)} intersected with u-perp``."""
    sets = active_sets(P, x, u, tol)
    Jg = P.jac_g(x)
    return PolyhedralCone(P.n, [Jg[i] for i in sorted(sets.I_dir)], [np.asarray(u, dtype=float)], tols)


class L2Variant(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


def second_order_pairs(P: ProblemSpec, x, u, v, variant: L2Variant, tols: Tolerances = DEFAULT_TOL) -> dict:
    """``G^2_i(u, v)`` (UPPER) or ``G^{2-}_i(u, v)`` (LOWER) for every active constraint."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    Jg = P.jac_g(x)
    out = {}
    for i in sorted(active_constraints(P, x, tols.activity)):
        sv = calculus.sosd_support(P.constraints[i], x, u, tols)
        s = sv.smax if variant is L2Variant.UPPER else sv.smin
        out[i] = LexPair(float(Jg[i] @ u), float(Jg[i] @ v) + s)
    return out


def membership_L2(P: ProblemSpec, x, u, v, variant: L2Variant = L2Variant.UPPER, tol: float = DEFAULT_TOL.activity,
                  tols: Tolerances = DEFAULT_TOL) -> bool:
    if isinstance(variant, str):
        variant = L2Variant(variant.lower())
    zero = LexPair(0.0, 0.0)
    pairs = second_order_pairs(P, x, u, v, variant, tols)
    return all(lex_cmp(pr, zero, strict=False, tol=tol) for pr in pairs.values())


# ---------------------------------------------------------------------------
# direction sampling
# ---------------------------------------------------------------------------


def sample_critical_directions(C: CriticalCone, count: int = 64, seed: int = DEFAULT_SEED) -> list:
    """Deterministic unit directions covering each branch of a critical cone.

    Per branch: the extreme rays, both signs of each lineality vector,
    normalized pairwise midpoints of those generators, and ``count`` seeded
    Gaussian vectors projected onto the branch (nonnegative least squares
    over the generators).  Every output is re-checked for membership.
    """
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    out: list = []

    def push(v, branch):
        nrm = float(np.linalg.norm(v))
        if nrm <= 1e-9:
            return
        v = v / nrm
        if not branch.contains(v):
            return
        if any(np.linalg.norm(v - o) <= 1e-9 for o in out):
            return
        out.append(v)

    for branch in C.branches:
        gens = list(branch.rays) + [s * l for l in branch.lineality for s in (1.0, -1.0)]
        for g in gens:
            push(np.asarray(g, dtype=float), branch)
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                push(gens[i] + gens[j], branch)
        G = np.array(gens).T if gens else None
        for _ in range(count):
            z = rng.standard_normal(C.n)
            if G is None:
                continue
            coef, _ = nnls(G, z)
            push(G @ coef, branch)
    return out
