"""C^{1,1} functions built from polynomials and quadratic kink atoms.

A :class:`FunctionSpec` is ``poly(x) + sum_j c_j * theta_j(<a_j, x> + b_j)``
where ``theta`` is either ``max(0, t)**2`` (PLUSQUAD) or ``t*|t|`` (SIGNQUAD).
Both atoms have globally Lipschitz derivatives, so every member of the class
has a gradient everywhere and a Hessian off the kink hyperplanes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .config import DEFAULT_TOL, MAX_POLY_DEGREE


class DimensionError(ValueError):
    pass


class KinkKind(enum.Enum):
    PLUSQUAD = "plusquad"
    SIGNQUAD = "signquad"

    @property
    def code(self) -> int:
        return _kernels.PLUSQUAD_CODE if self is KinkKind.PLUSQUAD else _kernels.SIGNQUAD_CODE

    def theta(self, t: float) -> float:
        if self is KinkKind.PLUSQUAD:
            return max(0.0, t) ** 2
        return t * abs(t)

    def dtheta(self, t: float) -> float:
        if self is KinkKind.PLUSQUAD:
            return 2.0 * max(0.0, t)
        return 2.0 * abs(t)

    def ddtheta(self, t: float) -> float:
        """Second derivative off the kink (t != 0)."""
        if self is KinkKind.PLUSQUAD:
            return 2.0 if t > 0 else 0.0
        return 2.0 if t > 0 else -2.0

    def side_curvature(self, positive: bool) -> float:
        """One-sided limit of theta'' at the kink."""
        if positive:
            return 2.0
        return 0.0 if self is KinkKind.PLUSQUAD else -2.0


@dataclass(frozen=True)
class KinkTerm:
    coeff: float
    normal: tuple[float, ...]
    offset: float
    kind: KinkKind

    def __post_init__(self):
        if not math.isfinite(self.coeff) or not math.isfinite(self.offset):
            raise ValueError("kink coefficient and offset must be finite")
        if not all(math.isfinite(a) for a in self.normal):
            raise ValueError("kink normal must be finite")
        if not any(a != 0.0 for a in self.normal):
            raise ValueError("kink normal must be a nonzero vector")

    def affine(self, x: np.ndarray) -> float:
        return float(np.dot(self.normal, x) + self.offset)


def _positive_multiple(a: np.ndarray, b: np.ndarray) -> float | None:
    """Return s > 0 with a == s*b (exactly up to 1e-14 relative), else None."""
    k = int(np.argmax(np.abs(b)))
    if b[k] == 0.0:
        return None
    s = a[k] / b[k]
    if s <= 0:
        return None
    if np.allclose(a, s * b, rtol=1e-14, atol=1e-14 * max(1.0, float(np.max(np.abs(a))))):
        return float(s)
    return None


def merge_kinks(kinks) -> tuple[KinkTerm, ...]:
    """Merge kinks of the same kind whose affine arguments are positive multiples.

    ``theta(s*l) = s**2 * theta(l)`` for s > 0, so the merged coefficient is
    ``c_first + sum s_k**2 * c_k``.  Zero-coefficient results are dropped.
    """
    merged: list[list] = []
    for kt in kinks:
        ab = np.array(list(kt.normal) + [kt.offset], dtype=float)
        for slot in merged:
            if slot[0].kind is not kt.kind:
                continue
            s = _positive_multiple(ab, slot[1])
            if s is not None:
                slot[2] += kt.coeff * s * s
                break
        else:
            merged.append([kt, ab, kt.coeff])
    out = []
    for kt, _, c in merged:
        if c != 0.0:
            out.append(KinkTerm(c, kt.normal, kt.offset, kt.kind))
    return tuple(out)


@dataclass(frozen=True)
class FunctionSpec:
    """Polynomial part plus kink terms over ``n`` variables.

    ``poly`` is a tuple of ``(coeff, exponents)`` pairs.  Construction
    combines repeated monomials, drops zero coefficients and merges
    coincident kink hyperplanes.
    """

    n: int
    poly: tuple = ()
    kinks: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        combined: dict[tuple[int, ...], float] = {}
        for coeff, exps in self.poly:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.n:
                raise DimensionError(f"monomial exponent vector {exps} has length != {self.n}")
            if any(e < 0 for e in exps):
                raise ValueError("exponents must be natural numbers")
            if sum(exps) > MAX_POLY_DEGREE:
                raise ValueError(f"monomial degree {sum(exps)} exceeds cap {MAX_POLY_DEGREE}")
            if not math.isfinite(coeff):
                raise ValueError("monomial coefficient must be finite")
            combined[exps] = combined.get(exps, 0.0) + float(coeff)
        poly = tuple((c, e) for e, c in combined.items() if c != 0.0)
        for kt in self.kinks:
            if len(kt.normal) != self.n:
                raise DimensionError(f"kink normal has length {len(kt.normal)} != {self.n}")
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "kinks", merge_kinks(self.kinks))

    # -- packed arrays -----------------------------------------------------

    @cached_property
    def packed(self):
        n = self.n
        mono_coef = np.array([c for c, _ in self.poly], dtype=np.float64)
        mono_exp = np.array([e for _, e in self.poly], dtype=np.int64).reshape(len(self.poly), n)
        kink_coef = np.array([k.coeff for k in self.kinks], dtype=np.float64)
        kink_normal = np.array([k.normal for k in self.kinks], dtype=np.float64).reshape(len(self.kinks), n)
        kink_offset = np.array([k.offset for k in self.kinks], dtype=np.float64)
        kink_kind = np.array([k.kind.code for k in self.kinks], dtype=np.int64)
        return mono_coef, mono_exp, kink_coef, kink_normal, kink_offset, kink_kind

    def scaled(self, factor: float) -> "FunctionSpec":
        return FunctionSpec(
            self.n,
            tuple((c * factor, e) for c, e in self.poly),
            tuple(KinkTerm(k.coeff * factor, k.normal, k.offset, k.kind) for k in self.kinks),
        )

    @property
    def degree(self) -> int:
        return max((sum(e) for _, e in self.poly), default=0)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n:
            raise DimensionError(f"point has dimension {x.shape[0]}, function expects {self.n}")
        return x

    # -- polynomial derivatives -------------------------------------------

    def poly_grad(self, x: np.ndarray) -> np.ndarray:
        g = np.zeros(self.n)
        for c, e in self.poly:
            for k in range(self.n):
                if e[k] == 0:
                    continue
                term = c * e[k]
                for q in range(self.n):
                    p = e[q] - (1 if q == k else 0)
                    if p:
                        term *= x[q] ** p
                g[k] += term
        return g

    def poly_hessian(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        H = np.zeros((n, n))
        for c, e in self.poly:
            for k in range(n):
                for r in range(k, n):
                    ek = list(e)
                    coef = c
                    coef *= ek[k]
                    ek[k] -= 1
                    if coef == 0:
                        continue
                    coef *= ek[r]
                    ek[r] -= 1
                    if coef == 0:
                        continue
                    term = coef
                    for q in range(n):
                        if ek[q]:
                            term *= x[q] ** ek[q]
                    H[k, r] += term
                    if r != k:
                        H[r, k] += term
        return H


def eval(f: FunctionSpec, x) -> float:  # noqa: A001 - mirrors the operation name
    """Value of ``f`` at ``x``."""
    x = f._check(x)
    val = 0.0
    for c, e in f.poly:
        term = c
        for k, p in enumerate(e):
            if p:
                term *= x[k] ** p
        val += term
    for kt in f.kinks:
        val += kt.coeff * kt.kind.theta(kt.affine(x))
    return float(val)


def grad(f: FunctionSpec, x) -> np.ndarray:
    """Exact gradient; defined everywhere for this function class."""
    x = f._check(x)
    g = f.poly_grad(x)
    for kt in f.kinks:
        g = g + kt.coeff * kt.kind.dtheta(kt.affine(x)) * np.asarray(kt.normal)
    return g


def active_kinks(f: FunctionSpec, x, tol: float = DEFAULT_TOL.activity) -> frozenset[int]:
    """Indices of kinks whose affine argument is within ``tol`` of zero."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    x = f._check(x)
    return frozenset(j for j, kt in enumerate(f.kinks) if abs(kt.affine(x)) <= tol)


def eval_batch(f: FunctionSpec, X) -> np.ndarray:
    """Values at every row of ``X`` using the selected kernel backend."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != f.n:
        raise DimensionError(f"expected an (N, {f.n}) array")
    return _kernels.eval_points(X, *f.packed)


@dataclass(frozen=True)
class ProblemSpec:
    """``min f(x)`` over ``X = {x : g(x) <= 0}`` in the componentwise order."""

    n: int
    objectives: tuple
    constraints: tuple = ()
    name: str = "problem"

    def __post_init__(self):
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not self.objectives:
            raise ValueError("a problem needs at least one objective")
        for fn in self.objectives + self.constraints:
            if fn.n != self.n:
                raise DimensionError(f"member function has dimension {fn.n}, problem has {self.n}")

    @property
    def m(self) -> int:
        return len(self.objectives)

    @property
    def p(self) -> int:
        return len(self.constraints)

    def f(self, x) -> np.ndarray:
        return np.array([eval(fn, x) for fn in self.objectives])

    def g(self, x) -> np.ndarray:
        return np.array([eval(fn, x) for fn in self.constraints])

    def jac_f(self, x) -> np.ndarray:
        return np.array([grad(fn, x) for fn in self.objectives]).reshape(self.m, self.n)

    def jac_g(self, x) -> np.ndarray:
        return np.array([grad(fn, x) for fn in self.constraints]).reshape(self.p, self.n)

    def rescaled(self, obj_factors=None, con_factors=None) -> "ProblemSpec":
        obj_factors = obj_factors or [1.0] * self.m
        con_factors = con_factors or [1.0] * self.p
        return ProblemSpec(
            self.n,
            tuple(fn.scaled(a) for fn, a in zip(self.objectives, obj_factors)),
            tuple(fn.scaled(b) for fn, b in zip(self.constraints, con_factors)),
            self.name,
        )


def monomial(coeff: float, exps) -> tuple:
    return (float(coeff), tuple(int(e) for e in exps))


def kink(coeff: float, normal, offset: float = 0.0, kind: KinkKind | str = KinkKind.PLUSQUAD) -> KinkTerm:
    if isinstance(kind, str):
        kind = KinkKind(kind.lower())
    return KinkTerm(float(coeff), tuple(float(a) for a in normal), float(offset), kind)
