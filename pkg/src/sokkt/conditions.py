"""Decision procedures for second-order KKT conditions at a candidate point.

* :func:`check_ascq` - strict-system certificate for the Abadie second-order
  constraint qualification along a direction.
* :func:`check_first_order` - no descent direction for all objectives.
* :func:`necessary_multipliers` - weak second-order KKT multipliers for a
  critical direction (a FAIL refutes local weak efficiency under ASCQ).
* :func:`certify_sufficient` - strong second-order KKT multipliers over a
  sample of critical directions (a sampling-based efficiency certificate).
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from . import calculus, cones
from .config import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, Tolerances
from .feasibility import (
    LinearSystem,
    Positivity,
    Sense,
    SolveOutcome,
    Status,
    cone_positivity,
    solve_lp,
    strict_margin,
)
from .model import ProblemSpec


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    VACUOUS = "VACUOUS"
    CERTIFIED = "CERTIFIED"
    NOT_CERTIFIED = "NOT_CERTIFIED"
    LOCALLY_EFFICIENT_AT_SCALE = "LOCALLY_EFFICIENT_AT_SCALE"
    DOMINATED = "DOMINATED"
    MEMBER_AT_SCALE = "MEMBER_AT_SCALE"
    REJECTED = "REJECTED"

    @property
    def exit_code(self) -> int:
        if self is Verdict.INCONCLUSIVE:
            return 2
        if self in (Verdict.FAIL, Verdict.NOT_CERTIFIED, Verdict.DOMINATED, Verdict.REJECTED):
            return 1
        return 0


SAMPLING_CAVEAT = (
    "sampling-based certificate: the strong second-order conditions were verified on the listed "
    "critical directions only, not on every critical direction"
)
ASCQ_FAIL_NOTE = "not certified: the strict system has no solution; this does not refute the constraint qualification"


@dataclass
class MultiplierPair:
    lam: np.ndarray
    mu: np.ndarray
    lam_support: tuple = ()
    mu_support: tuple = ()

    def to_dict(self) -> dict:
        return {
            "lambda": [float(v) for v in self.lam],
            "mu": [float(v) for v in self.mu],
            "lambda_support": list(self.lam_support),
            "mu_support": list(self.mu_support),
        }


@dataclass
class DirectionRecord:
    direction: list
    verdict: Verdict
    reason: str = ""
    multipliers: MultiplierPair | None = None
    values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "direction": [float(v) + 0.0 for v in self.direction],
            "verdict": self.verdict.value,
            "reason": self.reason,
            "multipliers": self.multipliers.to_dict() if self.multipliers else None,
            "values": {k: _jsonable(v) for k, v in sorted(self.values.items())},
        }


@dataclass
class ConditionReport:
    check: str
    verdict: Verdict
    records: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    witness: np.ndarray | None = None
    multipliers: MultiplierPair | None = None
    margin: float | None = None

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict.value,
            "margin": _jsonable(self.margin),
            "witness": _jsonable(self.witness),
            "multipliers": self.multipliers.to_dict() if self.multipliers else None,
            "records": [r.to_dict() for r in self.records],
            "notes": list(self.notes),
            "config": {k: _jsonable(v) for k, v in sorted(self.config.items())},
        }


def _jsonable(v):
    if v is None:
        return None
    if isinstance(v, np.ndarray):
        return [float(x) for x in v]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, enum.Enum):
        return v.value
    return v


def _config(tols: Tolerances, **extra) -> dict:
    cfg = asdict(tols)
    cfg.update(extra)
    return cfg


# ---------------------------------------------------------------------------


def check_ascq(P: ProblemSpec, x, u, tols: Tolerances = DEFAULT_TOL) -> ConditionReport:
    """Solve ``<grad g_i, w> + <zeta*_i, u> < 0`` over ``i in I(x; u)`` by margin maximization."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    sets = cones.active_sets(P, x, u, tols.activity)
    cfg = _config(tols)
    if not sets.I_dir:
        return ConditionReport("ascq", Verdict.VACUOUS, notes=["I(x; u) is empty; the system is trivially solvable"],
                               config=cfg)
    idx = sorted(sets.I_dir)
    Jg = P.jac_g(x)
    supports = {i: calculus.sosd_support(P.constraints[i], x, u, tols) for i in idx}
    A = np.array([Jg[i] for i in idx])
    b = np.array([-supports[i].smax for i in idx])
    out = strict_margin(LinearSystem(P.n, A_ub=A, b_ub=b, strict=range(len(idx))), tols.box_radius, tols)
    rec = DirectionRecord(list(u), Verdict.PASS, values={f"zeta_max[g{i + 1}]": supports[i].smax for i in idx})
    rec.values["box_margin"] = out.margin
    notes = []
    if out.status is not Status.FEASIBLE:
        # solutions may lie outside the box: decide A w < b s, s > 0 instead
        k = len(idx)
        Ah = np.vstack([np.hstack([A, -b[:, None]]), np.hstack([np.zeros((1, P.n)), [[-1.0]]])])
        hom = strict_margin(LinearSystem(P.n + 1, A_ub=Ah, b_ub=np.zeros(k + 1), strict=range(k + 1)), 1.0, tols)
        rec.values["homogenized_margin"] = hom.margin
        if hom.status is Status.FEASIBLE:
            w = hom.witness[: P.n] / hom.witness[P.n]
            notes.append("solution found outside the box by homogenization")
            out = SolveOutcome(Status.FEASIBLE, witness=w, margin=out.margin)
        elif hom.status is Status.TOL_INCONCLUSIVE:
            out = SolveOutcome(Status.TOL_INCONCLUSIVE, margin=out.margin)
        else:
            out = SolveOutcome(Status.INFEASIBLE, margin=out.margin)
    if out.status is Status.FEASIBLE:
        verdict = Verdict.PASS
    elif out.status is Status.INFEASIBLE:
        verdict = Verdict.FAIL
        notes.append(ASCQ_FAIL_NOTE)
    else:
        verdict = Verdict.INCONCLUSIVE
    if not all(s.exact for s in supports.values()):
        notes.append("support values are bounds: an inconclusive kink sign pattern was kept")
    rec.verdict = verdict
    return ConditionReport("ascq", verdict, [rec], notes, cfg, witness=out.witness, margin=out.margin)


def check_first_order(P: ProblemSpec, x, tols: Tolerances = DEFAULT_TOL) -> ConditionReport:
    """PASS iff ``<grad f_l, u> < 0`` for all l with ``<grad g_i, u> <= 0`` on I(x) is unsolvable."""
    x = np.asarray(x, dtype=float)
    I_act = sorted(cones.active_constraints(P, x, tols.activity))
    Jf, Jg = P.jac_f(x), P.jac_g(x)
    rows = [Jf[l] for l in range(P.m)] + [Jg[i] for i in I_act]
    sys = LinearSystem(P.n, A_ub=np.array(rows), b_ub=np.zeros(len(rows)), strict=range(P.m))
    out = strict_margin(sys, tols.box_radius, tols)
    cfg = _config(tols)
    if out.status is Status.FEASIBLE:
        return ConditionReport("first_order", Verdict.FAIL, notes=["descent direction found for every objective"],
                               config=cfg, witness=out.witness, margin=out.margin)
    if out.status is Status.INFEASIBLE:
        return ConditionReport("first_order", Verdict.PASS, config=cfg, margin=out.margin)
    return ConditionReport("first_order", Verdict.INCONCLUSIVE, config=cfg, margin=out.margin, notes=[out.note])


def _multiplier_system(P, x, L_idx, I_idx):
    """Rows over (lambda_L, mu_I): simplex normalization and stationarity."""
    Jf, Jg = P.jac_f(x), P.jac_g(x)
    nl, ni = len(L_idx), len(I_idx)
    stat = np.zeros((P.n, nl + ni))
    for k, l in enumerate(L_idx):
        stat[:, k] = Jf[l]
    for k, i in enumerate(I_idx):
        stat[:, nl + k] = Jg[i]
    norm = np.zeros((1, nl + ni))
    norm[0, :nl] = 1.0
    return np.vstack([norm, stat]), np.concatenate([[1.0], np.zeros(P.n)])


def _expand(P, L_idx, I_idx, z) -> MultiplierPair:
    lam = np.zeros(P.m)
    mu = np.zeros(P.p)
    for k, l in enumerate(L_idx):
        lam[l] = max(z[k], 0.0)
    for k, i in enumerate(I_idx):
        mu[i] = max(z[len(L_idx) + k], 0.0)
    return MultiplierPair(lam, mu, tuple(L_idx), tuple(I_idx))


def stationarity_residual(P: ProblemSpec, x, mp: MultiplierPair) -> float:
    r = P.jac_f(x).T @ mp.lam
    if P.p:
        r = r + P.jac_g(x).T @ mp.mu
    return float(np.linalg.norm(r))


def necessary_multipliers(P: ProblemSpec, x, u_bar, tols: Tolerances = DEFAULT_TOL) -> ConditionReport:
    """Search weak second-order KKT multipliers for the critical direction ``u_bar``.

    The curvature term ``sum lam_l xi*_l(u) + sum mu_i zeta*_i(u)`` is
    maximized over the multiplier polytope; PASS iff the optimum is >= 0.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u_bar, dtype=float)
    why = cones.critical_violation(P, x, u, tols.activity)
    if why is not None:
        raise cones.NotCriticalError(f"direction is not critical: {why}")
    sets = cones.active_sets(P, x, u, tols.activity)
    L_idx, I_idx = sorted(sets.L_dir), sorted(sets.I_dir)
    f_sup = {l: calculus.sosd_support(P.objectives[l], x, u, tols) for l in L_idx}
    g_sup = {i: calculus.sosd_support(P.constraints[i], x, u, tols) for i in I_idx}
    curv = np.array([f_sup[l].smax for l in L_idx] + [g_sup[i].smax for i in I_idx])
    A_eq, b_eq = _multiplier_system(P, x, L_idx, I_idx)
    nv = len(L_idx) + len(I_idx)
    lower = [0.0] * nv
    cfg = _config(tols)
    values = {f"xi_max[f{l + 1}]": f_sup[l].smax for l in L_idx}
    values.update({f"zeta_max[g{i + 1}]": g_sup[i].smax for i in I_idx})
    notes = []
    if not all(s.exact for s in list(f_sup.values()) + list(g_sup.values())):
        notes.append("support values are bounds: an inconclusive kink sign pattern was kept")

    out = solve_lp(curv, LinearSystem(nv, A_eq=A_eq, b_eq=b_eq, lower=lower), Sense.MAX, tols)
    if out.status is Status.UNBOUNDED:
        # curvature can be made arbitrarily large; settle for a multiplier with curvature >= 0
        sys = LinearSystem(nv, A_eq=A_eq, b_eq=b_eq, A_ub=-curv[None, :], b_ub=[0.0], lower=lower)
        out = solve_lp(np.zeros(nv), sys, Sense.MIN, tols)
    rec = DirectionRecord(list(u), Verdict.FAIL, values=values)
    if out.status is Status.INFEASIBLE:
        rec.reason = "no multipliers satisfy stationarity with the support restrictions"
        return ConditionReport("necessary", Verdict.FAIL, [rec], notes, cfg)
    if out.status is not Status.FEASIBLE:
        rec.verdict = Verdict.INCONCLUSIVE
        rec.reason = f"LP status {out.status.value}"
        return ConditionReport("necessary", Verdict.INCONCLUSIVE, [rec], notes, cfg)
    mp = _expand(P, L_idx, I_idx, out.witness)
    curvature = float(curv @ out.witness)
    res = stationarity_residual(P, x, mp)
    values["curvature"] = curvature
    values["stationarity_residual"] = res
    rec.multipliers = mp
    if res > tols.stationarity:
        rec.verdict = Verdict.INCONCLUSIVE
        rec.reason = f"stationarity residual {res:.3e} above tolerance"
        return ConditionReport("necessary", Verdict.INCONCLUSIVE, [rec], notes, cfg, multipliers=mp)
    if curvature < -tols.strict:
        rec.reason = f"best curvature term {curvature:.6g} < 0"
        return ConditionReport("necessary", Verdict.FAIL, [rec], notes, cfg, margin=curvature)
    # the cone condition on C(x, u) intersected with u-perp follows from stationarity; verify it
    K = cones.direction_cone(P, x, u, tols.activity, tols)
    c = P.jac_f(x).T @ mp.lam
    pos = cone_positivity(c, K, strict=False, tol=tols)
    values["cone_values"] = pos.values
    if pos.verdict is not Positivity.POSITIVE:
        rec.verdict = Verdict.INCONCLUSIVE
        rec.reason = "internal inconsistency: multipliers found but the cone condition fails"
        notes.append(rec.reason)
        return ConditionReport("necessary", Verdict.INCONCLUSIVE, [rec], notes, cfg, multipliers=mp,
                               witness=pos.witness)
    rec.verdict = Verdict.PASS
    return ConditionReport("necessary", Verdict.PASS, [rec], notes, cfg, multipliers=mp, margin=curvature)


def _sufficient_direction(P: ProblemSpec, x, u, tols: Tolerances) -> DirectionRecord:
    """One LP: maximize delta with lam_l >= delta, curvature >= delta, <c(lam), r> >= delta on rays."""
    sets = cones.active_sets(P, x, u, tols.activity)
    I_idx = sorted(sets.I_dir)
    L_idx = list(range(P.m))
    rec = DirectionRecord(list(u), Verdict.FAIL)
    K = cones.direction_cone(P, x, u, tols.activity, tols)
    if K.lineality:
        rec.reason = "C(x, u) intersected with u-perp contains a line; strict positivity is impossible"
        return rec
    f_sup = [calculus.sosd_support(P.objectives[l], x, u, tols) for l in L_idx]
    g_sup = {i: calculus.sosd_support(P.constraints[i], x, u, tols) for i in I_idx}
    curv = np.array([s.smin for s in f_sup] + [g_sup[i].smin for i in I_idx])
    rec.values = {f"xi_min[f{l + 1}]": f_sup[l].smin for l in L_idx}
    rec.values.update({f"zeta_min[g{i + 1}]": g_sup[i].smin for i in I_idx})
    A_eq, b_eq = _multiplier_system(P, x, L_idx, I_idx)
    nv = P.m + len(I_idx)
    Jf = P.jac_f(x)
    rows = []
    for l in range(P.m):  # delta - lam_l <= 0
        r = np.zeros(nv + 1)
        r[l] = -1.0
        r[nv] = 1.0
        rows.append(r)
    r = np.zeros(nv + 1)  # delta - curvature <= 0
    r[:nv] = -curv
    r[nv] = 1.0
    rows.append(r)
    for ray in K.rays:
        r = np.zeros(nv + 1)
        r[: P.m] = -(Jf @ ray)
        r[nv] = 1.0
        rows.append(r)
    sys = LinearSystem(
        nv + 1,
        A_eq=np.hstack([A_eq, np.zeros((A_eq.shape[0], 1))]),
        b_eq=b_eq,
        A_ub=np.array(rows),
        b_ub=np.zeros(len(rows)),
        lower=[0.0] * nv + [None],
    )
    obj = np.zeros(nv + 1)
    obj[nv] = 1.0
    out = solve_lp(obj, sys, Sense.MAX, tols)
    if out.status is Status.INFEASIBLE:
        rec.reason = "no multipliers with all lambda_l > 0 satisfy stationarity"
        return rec
    if out.status is not Status.FEASIBLE:
        rec.verdict = Verdict.INCONCLUSIVE
        rec.reason = f"LP status {out.status.value}"
        return rec
    delta = float(out.witness[nv])
    mp = _expand(P, L_idx, I_idx, out.witness[:nv])
    rec.multipliers = mp
    rec.values["delta"] = delta
    rec.values["curvature"] = float(curv @ out.witness[:nv])
    rec.values["stationarity_residual"] = stationarity_residual(P, x, mp)
    rec.values["cone_values"] = [float(mp.lam @ (Jf @ ray)) for ray in K.rays]
    if delta > tols.strict and rec.values["stationarity_residual"] <= tols.stationarity:
        rec.verdict = Verdict.PASS
    elif delta > tols.strict * tols.inconclusive_ratio:
        rec.verdict = Verdict.INCONCLUSIVE
        rec.reason = f"margin {delta:.3e} inside the inconclusive band"
    else:
        rec.reason = f"best strict margin {delta:.6g} <= 0"
    return rec


def certify_sufficient(P: ProblemSpec, x, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                       tols: Tolerances = DEFAULT_TOL) -> ConditionReport:
    """Strong second-order KKT certificate over sampled nonzero critical directions."""
    x = np.asarray(x, dtype=float)
    cfg = _config(tols, samples=samples, seed=seed)
    fo = check_first_order(P, x, tols)
    if fo.verdict is Verdict.FAIL:
        return ConditionReport("certify", Verdict.FAIL, config=cfg, witness=fo.witness,
                               notes=["first-order condition fails: a common descent direction exists, "
                                      "so the point is not locally weakly efficient"])
    if fo.verdict is Verdict.INCONCLUSIVE:
        return ConditionReport("certify", Verdict.INCONCLUSIVE, config=cfg, notes=["first-order check inconclusive"])
    C = cones.critical_cone(P, x, tols.activity, tols)
    if C.is_zero():
        return ConditionReport("certify", Verdict.VACUOUS, config=cfg,
                               notes=["no nonzero critical direction: the point is certified outright"])
    dirs = cones.sample_critical_directions(C, samples, seed)
    records = [_sufficient_direction(P, x, u, tols) for u in dirs]
    notes = [SAMPLING_CAVEAT]
    if P.n == 1:
        notes.append("in one dimension the sampled directions exhaust the critical cone up to scaling")
    verdict = Verdict.CERTIFIED
    for rec in records:
        if rec.verdict is Verdict.FAIL:
            verdict = Verdict.NOT_CERTIFIED
            notes.append(f"first failing direction: {[float(v) for v in rec.direction]} ({rec.reason})")
            break
        if rec.verdict is Verdict.INCONCLUSIVE:
            verdict = Verdict.INCONCLUSIVE
    return ConditionReport("certify", verdict, records, notes, cfg)
