"""Built-in problems with hand-derived expected verdicts.

Each expectation carries a provenance note with the derivation sketch.  The
catalog doubles as the regression suite and as the source of tangent-set
probes and random Taylor test functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .conditions import Verdict
from .model import FunctionSpec, KinkKind, ProblemSpec, kink, monomial

V = Verdict


@dataclass(frozen=True)
class Expectation:
    check: str  # first_order | certify | oracle | oracle_weak | ascq | necessary
    verdict: Verdict
    provenance: str
    direction: tuple | None = None


@dataclass(frozen=True)
class CatalogPoint:
    name: str
    x: tuple
    expectations: tuple
    directions: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    problem: ProblemSpec
    points: tuple
    note: str = ""

    def point(self, name: str) -> CatalogPoint:
        for pt in self.points:
            if pt.name == name:
                return pt
        raise KeyError(name)


def _poly(n, *terms, kinks=()):
    return FunctionSpec(n, tuple(monomial(c, e) for c, e in terms), tuple(kinks))


def E(check, verdict, provenance, direction=None):
    return Expectation(check, verdict, provenance, None if direction is None else tuple(float(v) for v in direction))


def _scalar_entries():
    sq = _poly(1, (1.0, [2]))
    neg = _poly(1, (-1.0, [2]))
    lower = _poly(1, (-1.0, [1]))  # -x <= 0
    out = [
        CatalogEntry(
            "sq",
            ProblemSpec(1, (sq,), (lower,), "sq"),
            (
                CatalogPoint("0", (0.0,), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f = 0 so no strict descent row"),
                    E("ascq", V.VACUOUS, "[DERIVED] <grad g, 1> = -1, so I(x;u) is empty", (1.0,)),
                    E("necessary", V.PASS, "[DERIVED] lam = 1, mu = 0, curvature 2 >= 0", (1.0,)),
                    E("certify", V.CERTIFIED, "[DERIVED] C(0) = ray {1}; curvature 2 > 0; u-perp = {0}"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[TRIVIAL] global minimum"),
                    E("oracle_weak", V.LOCALLY_EFFICIENT_AT_SCALE, "[TRIVIAL] global minimum"),
                ), {"1": (1.0,)}),
            ),
            "min x^2 s.t. -x <= 0",
        ),
        CatalogEntry(
            "sq_free",
            ProblemSpec(1, (sq,), (), "sq_free"),
            (
                CatalogPoint("0", (0.0,), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f = 0"),
                    E("necessary", V.PASS, "[DERIVED] lam = 1, curvature 2", (1.0,)),
                    E("necessary", V.PASS, "[DERIVED] lam = 1, curvature 2", (-1.0,)),
                    E("certify", V.CERTIFIED, "[DERIVED] C(0) = R; u = +-1 give curvature 2 > 0, u-perp = {0}"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[TRIVIAL] global minimum"),
                ), {"1": (1.0,), "m1": (-1.0,)}),
            ),
            "min x^2",
        ),
        CatalogEntry(
            "negsq",
            ProblemSpec(1, (neg,), (lower,), "negsq"),
            (
                CatalogPoint("0", (0.0,), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f = 0"),
                    E("ascq", V.VACUOUS, "[DERIVED] I(x;u) is empty for u = 1", (1.0,)),
                    E("necessary", V.FAIL, "[DERIVED] mu forced 0, lam = 1, curvature -2 < 0", (1.0,)),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] curvature -2"),
                    E("oracle", V.DOMINATED, "[DERIVED] f(y) = -y^2 < 0 for feasible y > 0"),
                    E("oracle_weak", V.DOMINATED, "[DERIVED] single objective, same witness"),
                ), {"1": (1.0,)}),
            ),
            "min -x^2 s.t. -x <= 0: first-order KKT holds, second order fails",
        ),
        CatalogEntry(
            "negsq_free",
            ProblemSpec(1, (neg,), (), "negsq_free"),
            (
                CatalogPoint("0", (0.0,), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f = 0"),
                    E("necessary", V.FAIL, "[DERIVED] curvature -2", (1.0,)),
                    E("necessary", V.FAIL, "[DERIVED] curvature -2", (-1.0,)),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] lam * (-2) > 0 impossible"),
                    E("oracle", V.DOMINATED, "[DERIVED] f(y) = -y^2 < 0"),
                ), {"1": (1.0,), "m1": (-1.0,)}),
            ),
            "min -x^2",
        ),
        CatalogEntry(
            "cubic_kink",
            ProblemSpec(1, (_poly(1, (1.0, [2]), kinks=[kink(1.0, [1.0], 0.0, KinkKind.SIGNQUAD)]),), (), "cubic_kink"),
            (
                CatalogPoint("0", (0.0,), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f(0) = 0"),
                    E("necessary", V.PASS, "[DERIVED] Hessians {0, 4}; max support 4 >= 0", (1.0,)),
                    E("necessary", V.PASS, "[DERIVED] Hessians {0, 4}; max support 4 >= 0", (-1.0,)),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] min support 0 is not > 0"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] f = 2x^2 on x > 0 and 0 on x <= 0, so f >= 0"),
                ), {"1": (1.0,), "m1": (-1.0,)}),
            ),
            "min x|x| + x^2: C^{1,1}, not C^2, non-strict minimizer",
        ),
        CatalogEntry(
            "plus_kink",
            ProblemSpec(1, (_poly(1, (1.0, [2]), kinks=[kink(1.0, [1.0], 0.0, KinkKind.PLUSQUAD)]),), (), "plus_kink"),
            (
                CatalogPoint("0", (0.0,), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f(0) = 0"),
                    E("necessary", V.PASS, "[DERIVED] Hessians {2, 4}", (1.0,)),
                    E("certify", V.CERTIFIED, "[DERIVED] min support 2 > 0 for u = +-1"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] f >= x^2"),
                ), {"1": (1.0,)}),
            ),
            "min max(0,x)^2 + x^2",
        ),
        CatalogEntry(
            "signquad_free",
            ProblemSpec(1, (_poly(1, kinks=[kink(1.0, [1.0], 0.0, KinkKind.SIGNQUAD)]),), (), "signquad_free"),
            (
                CatalogPoint("0", (0.0,), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f(0) = 0"),
                    E("necessary", V.PASS, "[DERIVED] Hessians {-2, 2}; max support 2 >= 0", (1.0,)),
                    E("necessary", V.PASS, "[DERIVED] Hessians {-2, 2}; max support 2 >= 0", (-1.0,)),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] min support -2"),
                    E("oracle", V.DOMINATED, "[DERIVED] f(-y) = -y^2 < 0"),
                ), {"1": (1.0,), "m1": (-1.0,)}),
            ),
            "min x|x|: passes the necessary filter yet is not a minimizer",
        ),
    ]
    return out


def _planar_entries():
    x1 = lambda c=1.0: (c, [1, 0])  # noqa: E731
    x2 = lambda c=1.0: (c, [0, 1])  # noqa: E731
    x1sq = lambda c=1.0: (c, [2, 0])  # noqa: E731
    x2sq = lambda c=1.0: (c, [0, 2])  # noqa: E731
    sign_x1 = lambda c=1.0: kink(c, [1.0, 0.0], 0.0, KinkKind.SIGNQUAD)  # noqa: E731
    plus_x1 = lambda c=1.0: kink(c, [1.0, 0.0], 0.0, KinkKind.PLUSQUAD)  # noqa: E731
    parab = _poly(2, x2(), x1sq(-1.0))  # x2 - x1^2 <= 0
    e1 = (1.0, 0.0)
    return [
        CatalogEntry(
            "biobj",
            ProblemSpec(2, (_poly(2, x1()), _poly(2, x2())), (_poly(2, x1(-1.0), x2(-1.0)),), "biobj"),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[DERIVED] u < 0 componentwise contradicts u1 + u2 >= 0"),
                    E("necessary", V.PASS, "[DERIVED] lam = (1/2, 1/2), mu = 1/2; all supports 0", (0.0, 0.0)),
                    E("certify", V.VACUOUS, "[DERIVED] u <= 0 with u1 + u2 >= 0 forces u = 0"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] x1 + x2 >= 0 blocks f(y) <= f(0), f(y) != f(0)"),
                    E("oracle_weak", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] implied by efficiency"),
                ), {"zero": (0.0, 0.0)}),
                CatalogPoint("edge", (0.5, -0.5), (
                    E("first_order", V.PASS, "[DERIVED] same active gradients as at the origin"),
                    E("certify", V.VACUOUS, "[DERIVED] critical cone is {0}"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] every point of x1 + x2 = 0 is efficient"),
                )),
                CatalogPoint("interior", (1.0, 1.0), (
                    E("first_order", V.FAIL, "[TRIVIAL] u = (-1, -1) decreases both objectives"),
                    E("certify", V.FAIL, "[TRIVIAL] first-order failure"),
                    E("oracle", V.DOMINATED, "[TRIVIAL] (1 - r, 1 - r) is feasible and better"),
                    E("oracle_weak", V.DOMINATED, "[TRIVIAL] strictly better in both objectives"),
                )),
            ),
            "min (x1, x2) s.t. -x1 - x2 <= 0",
        ),
        CatalogEntry(
            "parabola",
            ProblemSpec(2, (_poly(2, x2(-1.0)),), (parab,), "parabola"),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[DERIVED] -u2 < 0 and u2 <= 0 contradict"),
                    E("ascq", V.PASS, "[DERIVED] system w2 - 2 < 0; max support of g along (1,0) is -2", e1),
                    E("ascq", V.VACUOUS, "[DERIVED] <grad g, (0,-1)> = -1", (0.0, -1.0)),
                    E("necessary", V.FAIL, "[DERIVED] lam = mu = 1, curvature 0 + (-2) < 0", e1),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] curvature -2"),
                    E("oracle", V.DOMINATED, "[DERIVED] y = (0.25, 0.0625) feasible with f = -0.0625"),
                ), {"e1": e1, "down": (0.0, -1.0)}),
            ),
            "min -x2 s.t. x2 - x1^2 <= 0",
        ),
        CatalogEntry(
            "parabola_cert",
            ProblemSpec(2, (_poly(2, x1sq(2.0), x2(-1.0)),), (parab,), "parabola_cert"),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[DERIVED] as for parabola"),
                    E("ascq", V.PASS, "[DERIVED] w2 - 2 < 0", e1),
                    E("necessary", V.PASS, "[DERIVED] lam = mu = 1, curvature 4 - 2 = 2", e1),
                    E("certify", V.CERTIFIED, "[DERIVED] C(0) = x1-axis; curvature 2 > 0; K = ray (0,-1), <(0,-1),(0,-1)> = 1"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] f >= x1^2 on X, zero only at 0"),
                ), {"e1": e1}),
            ),
            "min 2 x1^2 - x2 s.t. x2 - x1^2 <= 0",
        ),
        CatalogEntry(
            "kinked_pair",
            ProblemSpec(2, (_poly(2, x1sq(), kinks=[sign_x1()]), _poly(2, x2sq(), x1(-1.0))), (), "kinked_pair"),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f1 = 0"),
                    E("necessary", V.PASS, "[DERIVED] lam = (1, 0); support of f1 along (0,1) is 0", (0.0, 1.0)),
                    E("necessary", V.PASS, "[DERIVED] lam = (1, 0); Hessians of f1 give {0, 4}", e1),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] lam2 > 0 contradicts stationarity"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] f1 <= 0 forces y1 <= 0, then f2 >= 0 with equality only at 0"),
                    E("oracle_weak", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] implied by efficiency"),
                ), {"e2": (0.0, 1.0), "e1": e1}),
            ),
            "min (x1|x1| + x1^2, x2^2 - x1)",
        ),
        CatalogEntry(
            "kinked_parabola",
            ProblemSpec(2, (_poly(2, x1sq(2.0), x2(-1.0), kinks=[sign_x1(0.5)]),), (parab,), "kinked_parabola"),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[DERIVED] as for parabola"),
                    E("ascq", V.PASS, "[DERIVED] w2 - 2 < 0", e1),
                    E("necessary", V.PASS, "[DERIVED] max support of f is 5; 5 - 2 >= 0", e1),
                    E("certify", V.CERTIFIED, "[DERIVED] min support of f is 3; 3 - 2 > 0; K = ray (0,-1)"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] f >= x1^2 + x1|x1|/2 >= x1^2/2 on X"),
                ), {"e1": e1}),
            ),
            "min 2 x1^2 + x1|x1|/2 - x2 s.t. x2 - x1^2 <= 0",
        ),
        CatalogEntry(
            "biobj_kinked",
            ProblemSpec(
                2,
                (_poly(2, x1sq(), x2(-1.0)), _poly(2, x1sq(2.0), x2(-1.0), kinks=[sign_x1()])),
                (_poly(2, x2()),),
                "biobj_kinked",
            ),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[DERIVED] -u2 < 0 and u2 <= 0 contradict"),
                    E("ascq", V.PASS, "[DERIVED] g linear: w2 < 0 solvable", e1),
                    E("necessary", V.PASS, "[DERIVED] mu = lam1 + lam2; max curvature 6", e1),
                    E("certify", V.CERTIFIED, "[DERIVED] min supports (2, 2); K = ray (0,-1) with value 1"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] on x2 <= 0 both objectives are >= 0, zero only at 0"),
                    E("oracle_weak", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] implied by efficiency"),
                ), {"e1": e1}),
            ),
            "min (x1^2 - x2, 2 x1^2 + x1|x1| - x2) s.t. x2 <= 0",
        ),
        CatalogEntry(
            "kinked_constraint",
            ProblemSpec(2, (_poly(2, x2()),), (_poly(2, x2(-1.0), kinks=[sign_x1()]),), "kinked_constraint"),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[DERIVED] u2 < 0 and -u2 <= 0 contradict"),
                    E("ascq", V.PASS, "[DERIVED] -w2 + 2 < 0 is solvable (w2 > 2)", e1),
                    E("necessary", V.PASS, "[DERIVED] lam = mu = 1; max support of g is 2", e1),
                    E("necessary", V.PASS, "[DERIVED] lam = mu = 1; max support of g is 2", (-1.0, 0.0)),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] min support of g is -2"),
                    E("oracle", V.DOMINATED, "[DERIVED] y = (-0.25, -0.0625) is feasible with f < 0"),
                ), {"e1": e1, "neg_e1": (-1.0, 0.0)}),
            ),
            "min x2 s.t. x1|x1| - x2 <= 0",
        ),
        CatalogEntry(
            "plus_constraint",
            ProblemSpec(2, (_poly(2, x2()),), (_poly(2, x2(-1.0), kinks=[plus_x1()]),), "plus_constraint"),
            (
                CatalogPoint("origin", (0.0, 0.0), (
                    E("first_order", V.PASS, "[DERIVED] u2 < 0 and -u2 <= 0 contradict"),
                    E("ascq", V.PASS, "[DERIVED] -w2 + 2 < 0 is solvable", e1),
                    E("necessary", V.PASS, "[DERIVED] lam = mu = 1; max support of g is 2", e1),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] min support of g along (1,0) is 0"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[DERIVED] x2 >= max(0,x1)^2 >= 0 on X"),
                ), {"e1": e1}),
            ),
            "min x2 s.t. max(0,x1)^2 - x2 <= 0",
        ),
    ]


def _spatial_entries():
    bowl = FunctionSpec(3, (monomial(1.0, [2, 0, 0]), monomial(1.0, [0, 2, 0]), monomial(1.0, [0, 0, 2])))
    return [
        CatalogEntry(
            "bowl3",
            ProblemSpec(3, (bowl,), (), "bowl3"),
            (
                CatalogPoint("origin", (0.0, 0.0, 0.0), (
                    E("first_order", V.PASS, "[TRIVIAL] grad f = 0"),
                    E("necessary", V.PASS, "[DERIVED] curvature 2", (1.0, 0.0, 0.0)),
                    E("certify", V.NOT_CERTIFIED, "[DERIVED] u-perp is a plane with no active constraint"),
                    E("oracle", V.LOCALLY_EFFICIENT_AT_SCALE, "[TRIVIAL] global minimum"),
                ), {"e1": (1.0, 0.0, 0.0)}),
            ),
            "min |x|^2 in R^3: efficient, but the strong certificate needs constraints",
        ),
    ]


def catalog() -> list:
    return _scalar_entries() + _planar_entries() + _spatial_entries()


def entry(key: str) -> CatalogEntry:
    for e in catalog():
        if e.key == key:
            return e
    raise KeyError(key)


# ---------------------------------------------------------------------------
# probe and function generators
# ---------------------------------------------------------------------------

_PROBE_DIRS = {
    1: [(1.0,), (-1.0,), (0.0,)],
    2: [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (0.0, 0.0)],
}


def tangent_probes() -> list:
    """``(entry, point, u, v)`` probes at points with active constraints."""
    out = []
    for e in catalog():
        P = e.problem
        if not P.p or P.n not in _PROBE_DIRS:
            continue
        grid = [float(v) for v in range(-3, 4)]
        for pt in e.points:
            if not np.any(np.abs(P.g(pt.x)) <= 1e-12):
                continue
            for u in _PROBE_DIRS[P.n]:
                for v in itertools.product(grid, repeat=P.n):
                    out.append((e, pt, u, v))
    return out


def random_function(rng: np.random.Generator, n: int, n_terms: int = 4, n_kinks: int = 2) -> FunctionSpec:
    """Random member of the class with small integer-ish data."""
    poly = []
    for _ in range(n_terms):
        deg = int(rng.integers(0, 5))
        exps = np.zeros(n, dtype=int)
        for _ in range(deg):
            exps[rng.integers(0, n)] += 1
        poly.append(monomial(float(rng.integers(-6, 7)) / 2.0, exps))
    kinks = []
    for _ in range(n_kinks):
        a = rng.integers(-3, 4, n).astype(float)
        if not np.any(a):
            a[0] = 1.0
        kind = KinkKind.PLUSQUAD if rng.random() < 0.5 else KinkKind.SIGNQUAD
        kinks.append(kink(float(rng.integers(-4, 5)) / 2.0 or 1.0, a, float(rng.integers(-2, 3)) / 2.0, kind))
    return FunctionSpec(n, tuple(poly), tuple(kinks))


def run_expectation(P: ProblemSpec, x, exp: Expectation, samples: int = 64, seed: int = 42) -> Verdict:
    """Run the check named by ``exp`` and return the observed verdict."""
    from . import conditions, oracles

    if exp.check == "first_order":
        return conditions.check_first_order(P, x).verdict
    if exp.check == "ascq":
        return conditions.check_ascq(P, x, exp.direction).verdict
    if exp.check == "necessary":
        return conditions.necessary_multipliers(P, x, exp.direction).verdict
    if exp.check == "certify":
        return conditions.certify_sufficient(P, x, samples=samples, seed=seed).verdict
    if exp.check in ("oracle", "oracle_weak"):
        mode = "WEAK" if exp.check == "oracle_weak" else "EFFICIENT"
        return oracles.grid_local_efficiency(P, x, oracles.GridOracleConfig(mode=mode)).verdict
    raise ValueError(f"unknown check {exp.check!r}")
