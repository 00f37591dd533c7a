"""Limiting Hessian sets and second-order support values.

For a function in the representable class the gradient is piecewise
polynomial, so every limit of classical Hessians at a point is one of
finitely many matrices, one per sign pattern of the kinks active there.
Writing ``B`` for that finite set, ``B u`` sits inside the limiting
second-order subdifferential at ``u``, which in turn sits inside
``conv(B u)``.  The max and min of ``<., u>`` therefore agree on all three
sets and can be read off ``B`` directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import model
from .config import DEFAULT_TOL, MAX_ACTIVE_KINKS, Tolerances
from .feasibility import LinearSystem, Status, strict_margin
from .model import DimensionError, FunctionSpec


@dataclass(frozen=True)
class HessianSet:
    matrices: tuple
    patterns: tuple  # one tuple of +1/-1 per matrix, ordered like ``active``
    active: tuple
    exact: bool = True  # False when an inconclusive sign pattern was kept

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("a limiting Hessian set is never empty")


@dataclass(frozen=True)
class SupportValues:
    smax: float
    smin: float
    exact: bool = True

    def scaled(self, s: float) -> "SupportValues":
        return SupportValues(self.smax * s, self.smin * s, self.exact)


@dataclass(frozen=True)
class TaylorReport:
    delta: float
    lower: float
    upper: float
    witness_lower: float
    witness_upper: float
    slack: float
    params: tuple

    @property
    def holds(self) -> bool:
        return self.lower - self.slack <= self.delta <= self.upper + self.slack


def realizable(normals: np.ndarray, signs, tol: Tolerances = DEFAULT_TOL) -> Status:
    """Is ``{d : s_j <a_j, d> > 0 for all j}`` nonempty?  Normals are row-normalized first."""
    A = np.asarray(normals, dtype=float)
    A = A / np.linalg.norm(A, axis=1, keepdims=True)
    rows = -np.asarray(signs, dtype=float)[:, None] * A
    sys = LinearSystem(A.shape[1], A_ub=rows, b_ub=np.zeros(len(rows)), strict=range(len(rows)))
    return strict_margin(sys, 1.0, tol).status


def piece_hessians(f: FunctionSpec, x, tol: Tolerances = DEFAULT_TOL) -> HessianSet:
    if tol.activity < 0:
        raise ValueError("activity tolerance must be nonnegative")
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != f.n:
        raise DimensionError(f"point has dimension {x.shape[0]}, function expects {f.n}")
    base = f.poly_hessian(x)
    active = sorted(model.active_kinks(f, x, tol.activity))
    for j, kt in enumerate(f.kinks):
        if j in active:
            continue
        a = np.asarray(kt.normal)
        base = base + kt.coeff * kt.kind.ddtheta(kt.affine(x)) * np.outer(a, a)
    if not active:
        return HessianSet((base,), ((),), ())
    if len(active) > MAX_ACTIVE_KINKS:
        raise ValueError(f"{len(active)} active kinks exceed the enumeration cap {MAX_ACTIVE_KINKS}")
    normals = np.array([f.kinks[j].normal for j in active], dtype=float)
    mats, pats, exact = [], [], True
    for signs in itertools.product((1, -1), repeat=len(active)):
        status = Status.FEASIBLE if len(active) == 1 else realizable(normals, signs, tol)
        if status is Status.INFEASIBLE:
            continue
        if status is Status.TOL_INCONCLUSIVE:
            exact = False
        H = base.copy()
        for s, j in zip(signs, active):
            kt = f.kinks[j]
            a = np.asarray(kt.normal)
            H += kt.coeff * kt.kind.side_curvature(s > 0) * np.outer(a, a)
        mats.append(H)
        pats.append(tuple(signs))
    return HessianSet(tuple(mats), tuple(pats), tuple(active), exact)


def sosd_support(f: FunctionSpec, x, u, tol: Tolerances = DEFAULT_TOL) -> SupportValues:
    """Max and min of ``<xi, u>`` over the limiting second-order subdifferential at ``u``."""
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != f.n:
        raise DimensionError(f"direction has dimension {u.shape[0]}, function expects {f.n}")
    hs = piece_hessians(f, x, tol)
    vals = [float(u @ H @ u) for H in hs.matrices]
    return SupportValues(max(vals), min(vals), hs.exact)


def _segment_params(f: FunctionSpec, a: np.ndarray, d: np.ndarray, segments: int) -> list[float]:
    ts = set(np.linspace(0.0, 1.0, segments).tolist())
    for kt in f.kinks:
        slope = float(np.dot(kt.normal, d))
        if slope != 0.0:
            t = -kt.affine(a) / slope
            if 0.0 <= t <= 1.0:
                ts.add(float(t))
    # the polynomial part of d'H d is quadratic in t; add its vertex
    q = [float(d @ f.poly_hessian(a + t * d) @ d) for t in (0.0, 0.5, 1.0)]
    curv = 2.0 * (q[0] - 2.0 * q[1] + q[2])
    if curv != 0.0:
        lin = -3.0 * q[0] + 4.0 * q[1] - q[2]
        t = -lin / (2.0 * curv)
        if 0.0 < t < 1.0:
            ts.add(float(t))
    return sorted(ts)


def taylor_sandwich(f: FunctionSpec, a, b, segments: int = 9, tol: Tolerances = DEFAULT_TOL) -> TaylorReport:
    """Bracket ``f(b) - f(a) - <grad f(a), b - a>`` by half the support values along ``[a, b]``."""
    if segments < 2:
        raise ValueError("need at least two segment samples")
    a = f._check(a)
    b = f._check(b)
    d = b - a
    delta = model.eval(f, b) - model.eval(f, a) - float(model.grad(f, a) @ d)
    params = _segment_params(f, a, d, segments)
    lo, hi = np.inf, -np.inf
    t_lo = t_hi = 0.0
    for t in params:
        sv = sosd_support(f, a + t * d, d, tol)
        if sv.smin < lo:
            lo, t_lo = sv.smin, t
        if sv.smax > hi:
            hi, t_hi = sv.smax, t
    slack = tol.sandwich_rel * (1.0 + abs(delta))
    return TaylorReport(delta, 0.5 * lo, 0.5 * hi, t_lo, t_hi, slack, tuple(params))
