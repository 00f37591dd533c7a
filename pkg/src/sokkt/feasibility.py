"""Small dense linear programming.

A two-phase tableau simplex with Bland's rule backs three questions asked
by the condition checkers: optimize a linear objective, decide strict
feasibility of a homogeneous-style system by margin maximization inside a
box, and decide (strict or weak) positivity of a linear functional on a
polyhedral cone given its generators.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances


class Status(enum.Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    TOL_INCONCLUSIVE = "TOL_INCONCLUSIVE"


class Sense(enum.Enum):
    MIN = "min"
    MAX = "max"


class SolverConsistencyError(RuntimeError):
    """A returned witness failed re-verification against the input system."""


@dataclass
class LinearSystem:
    """``A_eq w = b_eq``, ``A_ub w <= b_ub``; ``strict`` lists ub rows that must hold strictly.

    ``lower`` gives a per-variable lower bound or ``None`` for a free variable.
    When omitted every variable is free.
    """

    n: int
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    A_ub: np.ndarray = None
    b_ub: np.ndarray = None
    strict: tuple = ()
    lower: list = None

    def __post_init__(self):
        n = self.n
        self.A_eq = np.zeros((0, n)) if self.A_eq is None else np.asarray(self.A_eq, dtype=float).reshape(-1, n)
        self.A_ub = np.zeros((0, n)) if self.A_ub is None else np.asarray(self.A_ub, dtype=float).reshape(-1, n)
        self.b_eq = np.zeros(0) if self.b_eq is None else np.asarray(self.b_eq, dtype=float).reshape(-1)
        self.b_ub = np.zeros(0) if self.b_ub is None else np.asarray(self.b_ub, dtype=float).reshape(-1)
        if self.A_eq.shape[0] != self.b_eq.shape[0] or self.A_ub.shape[0] != self.b_ub.shape[0]:
            raise ValueError("row counts of matrices and right-hand sides differ")
        self.strict = tuple(sorted(set(int(i) for i in self.strict)))
        if any(i < 0 or i >= self.A_ub.shape[0] for i in self.strict):
            raise ValueError("strict row index out of range")
        if self.lower is None:
            self.lower = [None] * n
        if len(self.lower) != n:
            raise ValueError("lower bounds must have one entry per variable")

    def violation(self, w: np.ndarray) -> float:
        """Largest scaled constraint violation at ``w`` (non-strict reading)."""
        worst = 0.0
        scale = 1.0 + float(np.max(np.abs(w), initial=0.0))
        if self.A_eq.shape[0]:
            r = np.abs(self.A_eq @ w - self.b_eq) / (1.0 + np.abs(self.A_eq).sum(axis=1) * scale + np.abs(self.b_eq))
            worst = max(worst, float(r.max()))
        if self.A_ub.shape[0]:
            r = (self.A_ub @ w - self.b_ub) / (1.0 + np.abs(self.A_ub).sum(axis=1) * scale + np.abs(self.b_ub))
            worst = max(worst, float(r.max()))
        for j, lb in enumerate(self.lower):
            if lb is not None:
                worst = max(worst, (lb - w[j]) / (1.0 + abs(lb)))
        return worst


@dataclass
class SolveOutcome:
    status: Status
    witness: np.ndarray | None = None
    value: float | None = None
    margin: float | None = None
    iterations: int = 0
    note: str = ""

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


# ---------------------------------------------------------------------------
# tableau simplex
# ---------------------------------------------------------------------------


class _Tableau:
    """Standard form ``min c x, A x = b, x >= 0, b >= 0`` solved in place."""

    def __init__(self, A, b, c, tol: Tolerances):
        self.A = A
        self.b = b
        self.c = c
        self.tol = tol
        self.iterations = 0
        rows, cols = A.shape
        self.max_iter = 200 + 50 * (rows + cols)

    def _pivot(self, T, basis, r, k):
        T[r] /= T[r, k]
        for i in range(T.shape[0]):
            if i != r and T[i, k] != 0.0:
                T[i] -= T[i, k] * T[r]
        basis[r] = k

    def _run(self, T, basis, ncols):
        """Bland's rule on tableau ``T`` whose last row holds reduced costs."""
        eps = self.tol.pivot
        while True:
            self.iterations += 1
            if self.iterations > self.max_iter:
                return "iter"
            cost = T[-1, :ncols]
            scale = 1.0 + np.abs(cost).max(initial=0.0)
            entering = -1
            for k in range(ncols):
                if cost[k] < -eps * scale:
                    entering = k
                    break
            if entering < 0:
                return "optimal"
            col = T[:-1, entering]
            best = None
            leave = -1
            for i in range(col.shape[0]):
                if col[i] > eps:
                    ratio = T[i, -1] / col[i]
                    if best is None or ratio < best - 1e-12 * (1 + abs(best)) or (
                        abs(ratio - best) <= 1e-12 * (1 + abs(best)) and basis[i] < basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            self._pivot(T, basis, leave, entering)

    def solve(self):
        A, b, c = self.A, self.b, self.c
        rows, cols = A.shape
        # phase 1: artificials on every row
        T = np.zeros((rows + 1, cols + rows + 1))
        T[:rows, :cols] = A
        T[:rows, cols : cols + rows] = np.eye(rows)
        T[:rows, -1] = b
        T[-1, :cols] = -A.sum(axis=0)
        T[-1, -1] = -b.sum()
        basis = list(range(cols, cols + rows))
        state = self._run(T, basis, cols + rows)
        if state == "iter":
            return "iter", None, None
        if -T[-1, -1] > self.tol.residual * (1.0 + np.abs(b).sum()):
            return "infeasible", None, None
        # drive artificials out of the basis, dropping redundant rows
        keep = []
        for r in range(rows):
            if basis[r] >= cols:
                nz = [k for k in range(cols) if abs(T[r, k]) > self.tol.pivot]
                if nz:
                    self._pivot(T, basis, r, nz[0])
                    keep.append(r)
            else:
                keep.append(r)
        T = np.vstack([T[keep][:, list(range(cols)) + [-1]], np.zeros((1, cols + 1))])
        basis = [basis[r] for r in keep]
        # phase 2 reduced costs
        T[-1, :cols] = c
        for r, k in enumerate(basis):
            if T[-1, k] != 0.0:
                T[-1] -= T[-1, k] * T[r]
        state = self._run(T, basis, cols)
        if state != "optimal":
            return state, None, None
        x = np.zeros(cols)
        for r, k in enumerate(basis):
            x[k] = T[r, -1]
        return "optimal", x, float(c @ x)


def _standard_form(sys: LinearSystem, extra_ub=None):
    """Map ``sys`` to nonnegative variables; return matrices and a decoder."""
    n = sys.n
    # w_j = lb_j + y_j  or  w_j = y+_j - y-_j
    cols = []
    shift = np.zeros(n)
    for j, lb in enumerate(sys.lower):
        if lb is None:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            shift[j] = lb
    M = np.zeros((n, len(cols)))
    for k, (j, s) in enumerate(cols):
        M[j, k] = s
    A_ub, b_ub = sys.A_ub, sys.b_ub
    A_eq, b_eq = sys.A_eq, sys.b_eq
    ub_rows = A_ub @ M
    ub_rhs = b_ub - A_ub @ shift
    eq_rows = A_eq @ M
    eq_rhs = b_eq - A_eq @ shift
    n_ub = ub_rows.shape[0]
    ny = len(cols)
    A = np.zeros((n_ub + eq_rows.shape[0], ny + n_ub))
    A[:n_ub, :ny] = ub_rows
    A[:n_ub, ny:] = np.eye(n_ub)
    A[n_ub:, :ny] = eq_rows
    b = np.concatenate([ub_rhs, eq_rhs])
    neg = b < 0
    A[neg] *= -1.0
    b = np.abs(b)

    def decode(z):
        return M @ z[:ny] + shift

    return A, b, M, ny, decode


def solve_lp(objective, sys: LinearSystem, sense: Sense = Sense.MIN, tol: Tolerances = DEFAULT_TOL) -> SolveOutcome:
    """Optimize ``objective . w`` over ``sys`` (which must have no strict rows)."""
    if sys.strict:
        raise ValueError("solve_lp does not accept strict rows; use strict_margin")
    c = np.asarray(objective, dtype=float).reshape(-1)
    if c.shape[0] != sys.n:
        raise ValueError("objective length does not match the number of variables")
    if isinstance(sense, str):
        sense = Sense(sense.lower())
    sgn = 1.0 if sense is Sense.MIN else -1.0
    A, b, M, ny, decode = _standard_form(sys)
    cz = np.zeros(A.shape[1])
    cz[:ny] = sgn * (M.T @ c)
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
        return SolveOutcome(Status.TOL_INCONCLUSIVE, note="non-finite data")
    tab = _Tableau(A, b, cz, tol)
    state, z, _ = tab.solve()
    if state == "infeasible":
        return SolveOutcome(Status.INFEASIBLE, iterations=tab.iterations)
    if state == "unbounded":
        return SolveOutcome(Status.UNBOUNDED, iterations=tab.iterations)
    if state != "optimal":
        return SolveOutcome(Status.TOL_INCONCLUSIVE, iterations=tab.iterations, note="iteration cap")
    w = decode(z)
    viol = sys.violation(w)
    if viol > tol.residual:
        raise SolverConsistencyError(f"simplex witness violates the system by {viol:.3e}")
    return SolveOutcome(Status.FEASIBLE, witness=w, value=float(c @ w), iterations=tab.iterations)


def strict_margin(sys: LinearSystem, radius: float | None = None, tol: Tolerances = DEFAULT_TOL) -> SolveOutcome:
    """Maximize ``eps`` with strict rows shifted by ``eps`` inside ``|w|_inf <= radius``.

    FEASIBLE iff the optimal margin exceeds ``tol.strict``; margins at or
    below ``tol.strict * tol.inconclusive_ratio`` are INFEASIBLE and the
    band in between is TOL_INCONCLUSIVE.
    """
    if not sys.strict:
        raise ValueError("strict_margin needs at least one strict row")
    R = tol.box_radius if radius is None else float(radius)
    if R <= 0:
        raise ValueError("box radius must be positive")
    n = sys.n
    # variables (w, eps); eps free
    A_ub = np.hstack([sys.A_ub, np.zeros((sys.A_ub.shape[0], 1))])
    for i in sys.strict:
        A_ub[i, n] = 1.0
    box = np.hstack([np.vstack([np.eye(n), -np.eye(n)]), np.zeros((2 * n, 1))])
    lifted = LinearSystem(
        n + 1,
        A_eq=np.hstack([sys.A_eq, np.zeros((sys.A_eq.shape[0], 1))]),
        b_eq=sys.b_eq,
        A_ub=np.vstack([A_ub, box]),
        b_ub=np.concatenate([sys.b_ub, np.full(2 * n, R)]),
        lower=list(sys.lower) + [None],
    )
    obj = np.zeros(n + 1)
    obj[n] = 1.0
    out = solve_lp(obj, lifted, Sense.MAX, tol)
    if out.status is Status.UNBOUNDED:
        # strict rows with zero coefficients and room on the right-hand side only
        return SolveOutcome(Status.FEASIBLE, witness=np.zeros(n), margin=float("inf"), iterations=out.iterations)
    if out.status is not Status.FEASIBLE:
        return SolveOutcome(out.status, iterations=out.iterations, note=out.note)
    eps = float(out.witness[n])
    w = out.witness[:n]
    if eps > tol.strict:
        status = Status.FEASIBLE
    elif eps <= tol.strict * tol.inconclusive_ratio:
        status = Status.INFEASIBLE
    else:
        status = Status.TOL_INCONCLUSIVE
    return SolveOutcome(status, witness=w, margin=eps, iterations=out.iterations)


# ---------------------------------------------------------------------------
# positivity on a cone
# ---------------------------------------------------------------------------


class Positivity(enum.Enum):
    POSITIVE = "POSITIVE"
    NOT_POSITIVE = "NOT_POSITIVE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class PositivityResult:
    verdict: Positivity
    witness: np.ndarray | None = None
    values: list = field(default_factory=list)


def cone_positivity(c, cone, strict: bool = True, tol: Tolerances = DEFAULT_TOL) -> PositivityResult:
    """Decide ``<c, w> > 0`` (strict) or ``>= 0`` on every nonzero ``w`` in ``cone``.

    ``cone`` is anything with ``rays`` and ``lineality`` (see
    :class:`sokkt.cones.PolyhedralCone`).
    """
    c = np.asarray(c, dtype=float)
    rays, lineality = cone.rays, cone.lineality
    cn = float(np.linalg.norm(c))
    thr = tol.strict * max(cn, 1.0)
    values = []
    for l in lineality:
        v = float(c @ l)
        if strict:
            return PositivityResult(Positivity.NOT_POSITIVE, l if v <= 0 else -l, [v])
        if abs(v) > thr:
            return PositivityResult(Positivity.NOT_POSITIVE, -l if v > 0 else l, [v])
    for r in rays:
        v = float(c @ r)
        values.append(v)
        if strict:
            if v <= thr * tol.inconclusive_ratio:
                return PositivityResult(Positivity.NOT_POSITIVE, r, values)
            if v <= thr:
                return PositivityResult(Positivity.INCONCLUSIVE, r, values)
        elif v < -thr:
            return PositivityResult(Positivity.NOT_POSITIVE, r, values)
    return PositivityResult(Positivity.POSITIVE, None, values)
