"""Brute-force ground truth at desk scale.

Nothing here proves anything beyond the sampled grid or probe schedule;
verdicts carry the ``_AT_SCALE`` suffix for that reason.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels, model
from .conditions import Verdict
from .config import DEFAULT_SEED, GRID_SIZE_GUARD
from .cones import check_feasible
from .model import FunctionSpec, ProblemSpec

AT_SCALE_CAVEAT = "at-scale oracle: the verdict covers the sampled grid only"


class GridTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class GridOracleConfig:
    radius: float = 0.25
    resolution: int = 41
    mode: str = "EFFICIENT"  # or "WEAK"
    feas_tol: float = 1e-9
    dom_tol: float = 1e-10
    chunk: int = 1 << 16

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.resolution < 3 or self.resolution % 2 == 0:
            raise ValueError("resolution must be an odd integer >= 3")
        if self.mode not in ("EFFICIENT", "WEAK"):
            raise ValueError("mode must be EFFICIENT or WEAK")


@dataclass
class OracleResult:
    verdict: Verdict
    witness: np.ndarray | None = None
    checked: int = 0
    config: dict = field(default_factory=dict)
    notes: list = field(default_factory=lambda: [AT_SCALE_CAVEAT])

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "checked": self.checked,
            "config": self.config,
            "notes": list(self.notes),
        }


def grid_local_efficiency(P: ProblemSpec, x, cfg: GridOracleConfig = GridOracleConfig()) -> OracleResult:
    """Scan the infinity-ball grid around ``x`` for a feasible dominating point.

    EFFICIENT mode: ``f(y) <= f(x)`` with one gap larger than ``dom_tol``.
    WEAK mode: every gap larger than ``dom_tol``.  The first witness in
    lexicographic grid order is returned.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    check_feasible(P, x, cfg.feas_tol)
    n = P.n
    total = cfg.resolution**n
    if total > GRID_SIZE_GUARD:
        raise GridTooLargeError(f"grid has {total} points, guard is {GRID_SIZE_GUARD}")
    axis = np.linspace(-cfg.radius, cfg.radius, cfg.resolution)
    f0 = P.f(x)
    shape = (cfg.resolution,) * n
    for start in range(0, total, cfg.chunk):
        idx = np.arange(start, min(start + cfg.chunk, total))
        Y = x[None, :] + axis[np.stack(np.unravel_index(idx, shape), axis=1)]
        F = np.column_stack([model.eval_batch(fn, Y) for fn in P.objectives])
        G = np.column_stack([model.eval_batch(fn, Y) for fn in P.constraints]) if P.p else np.zeros((len(Y), 0))
        hit = _kernels.first_dominating(F, G, f0, cfg.feas_tol, cfg.dom_tol, cfg.mode == "WEAK")
        if hit >= 0:
            return OracleResult(Verdict.DOMINATED, Y[hit], start + hit + 1, asdict(cfg))
    return OracleResult(Verdict.LOCALLY_EFFICIENT_AT_SCALE, None, total, asdict(cfg))


@dataclass(frozen=True)
class TangentProbeSchedule:
    t_values: tuple = tuple(2.0**-k for k in range(3, 21))
    radius_scale: float = 1.0  # search radius c * sqrt(t)
    probes_per_ring: int = 24
    rings: tuple = (0.125, 0.25, 0.5, 1.0)
    feas_tol: float = 1e-9  # relative to t**2
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        ts = self.t_values
        if any(t <= 0 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
            raise ValueError("t_values must be positive and strictly decreasing")
        if ts[-1] >= 1e-5:
            raise ValueError("t_values must decrease below 1e-5")

    def search_radius(self, t: float) -> float:
        return self.radius_scale * np.sqrt(t)


def _probe_offsets(n: int, sched: TangentProbeSchedule) -> np.ndarray:
    """Unit offsets: coordinate axes both ways plus seeded random unit vectors."""
    rng = np.random.default_rng(sched.seed)
    dirs = [np.zeros(n)]
    for k in range(n):
        for s in (1.0, -1.0):
            e = np.zeros(n)
            e[k] = s
            dirs.append(e)
    extra = max(sched.probes_per_ring - 2 * n, 0)
    if extra:
        R = rng.standard_normal((extra, n))
        dirs.extend(R / np.linalg.norm(R, axis=1, keepdims=True))
    return np.array(dirs)


def tangent2_membership(P: ProblemSpec, x, u, v, sched: TangentProbeSchedule = TangentProbeSchedule()) -> Verdict:
    """MEMBER_AT_SCALE iff every ``t`` admits a feasible ``x + t u + t^2/2 v'`` with ``v'`` near ``v``."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    check_feasible(P, x, sched.feas_tol)
    if not P.p:
        return Verdict.MEMBER_AT_SCALE
    offsets = _probe_offsets(P.n, sched)
    scales = np.concatenate([[0.0], np.asarray(sched.rings)])
    for t in sched.t_values:
        rad = sched.search_radius(t)
        V = (v[None, None, :] + rad * scales[:, None, None] * offsets[None, :, :]).reshape(-1, P.n)
        Y = x[None, :] + t * u[None, :] + 0.5 * t * t * V
        G = np.column_stack([model.eval_batch(fn, Y) for fn in P.constraints])
        if not np.any(np.all(G <= sched.feas_tol * t * t, axis=1)):
            return Verdict.REJECTED
    return Verdict.MEMBER_AT_SCALE


def fd_validate(f: FunctionSpec, trials: int = 200, seed: int = DEFAULT_SEED, h: float = 1e-6,
                box: float = 1.0) -> float:
    """Max relative error between central differences and the exact gradient at off-kink points."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    guard = 0
    while done < trials and guard < 100 * trials:
        guard += 1
        x = rng.uniform(-box, box, f.n)
        if any(abs(k.affine(x)) <= 1e3 * h * np.linalg.norm(k.normal) for k in f.kinks):
            continue
        g = model.grad(f, x)
        fd = np.empty(f.n)
        for k in range(f.n):
            e = np.zeros(f.n)
            e[k] = h
            fd[k] = (model.eval(f, x + e) - model.eval(f, x - e)) / (2 * h)
        err = float(np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
        worst = max(worst, err)
        done += 1
    return worst
