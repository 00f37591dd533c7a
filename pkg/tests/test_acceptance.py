"""Acceptance gate: nine criteria at their stated tolerances.

Each test records one ``criterion k: PASS|FAIL`` line, printed in the pytest
terminal summary (or directly when the file is run as a script).
"""

import subprocess
import sys
import time

import numpy as np
import sympy as sp

from sokkt import calculus
from sokkt.catalog import catalog, entry, random_function, tangent_probes
from sokkt.conditions import (
    Verdict,
    certify_sufficient,
    check_ascq,
    check_first_order,
    necessary_multipliers,
    stationarity_residual,
)
from sokkt.cones import L2Variant, membership_L2
from sokkt.model import FunctionSpec, kink
from sokkt.oracles import GridOracleConfig, grid_local_efficiency, tangent2_membership

import conftest
from helpers import symbols, to_sympy

V = Verdict
FACTORS = (0.5, 3.0, 10.0)


def _record(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    conftest.ACCEPTANCE_LINES[k] = line
    print(line)
    assert ok, line


def test_1_taylor_sandwich():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    bad = 0
    count = 1000
    for _ in range(count):
        n = int(rng.integers(1, 4))
        f = random_function(rng, n, n_terms=int(rng.integers(1, 6)), n_kinks=int(rng.integers(0, 4)))
        a, b = rng.uniform(-1.5, 1.5, (2, n))
        rep = calculus.taylor_sandwich(f, a, b)
        scale = 1e-8 * (1.0 + abs(rep.delta))
        bad += not (rep.lower - scale <= rep.delta <= rep.upper + scale)
    elapsed = time.perf_counter() - start
    _record(1, bad == 0 and elapsed <= 30.0, f"{count} triples, {bad} violations, {elapsed:.1f} s")


def test_2_tangent_inclusion():
    start = time.perf_counter()
    probes = tangent_probes()
    members = bad = 0
    for e, pt, u, v in probes:
        if tangent2_membership(e.problem, pt.x, u, v) is V.MEMBER_AT_SCALE:
            members += 1
            bad += not membership_L2(e.problem, pt.x, u, v, L2Variant.LOWER)
    elapsed = time.perf_counter() - start
    ok = len(probes) >= 200 and bad == 0 and elapsed <= 60.0
    _record(2, ok, f"{len(probes)} probes, {members} members, {bad} counterexamples, {elapsed:.1f} s")


def test_3_necessary_filter():
    neg = necessary_multipliers(entry("negsq").problem, [0.0], [1.0])
    oracle = grid_local_efficiency(entry("negsq").problem, [0.0])
    P = entry("sq").problem
    pos = necessary_multipliers(P, [0.0], [1.0])
    mp = pos.multipliers
    ok = (
        neg.verdict is V.FAIL
        and neg.multipliers is None
        and oracle.verdict is V.DOMINATED
        and pos.verdict is V.PASS
        and abs(mp.lam[0] - 1.0) <= 1e-8
        and abs(mp.mu[0]) <= 1e-8
        and stationarity_residual(P, [0.0], mp) <= 1e-8
    )
    _record(3, ok, f"negsq {neg.verdict.value}/{oracle.verdict.value}, sq {pos.verdict.value} "
                   f"lam={mp.lam.tolist()} mu={mp.mu.tolist()}")


def test_4_certifier_soundness():
    checked = bad = 0
    for e in catalog():
        for pt in e.points:
            verdict = certify_sufficient(e.problem, pt.x).verdict
            if verdict in (V.CERTIFIED, V.VACUOUS):
                checked += 1
                res = grid_local_efficiency(e.problem, pt.x, GridOracleConfig(radius=0.25, resolution=41))
                bad += res.verdict is not V.LOCALLY_EFFICIENT_AT_SCALE
    _record(4, checked > 0 and bad == 0, f"{checked} certified or vacuous points, {bad} violations")


def test_5_ascq_parabola():
    rep = check_ascq(entry("parabola").problem, [0.0, 0.0], [1.0, 0.0])
    ok = rep.verdict is V.PASS and rep.margin >= 1.0 and rep.config["box_radius"] == 1.0
    _record(5, ok, f"verdict {rep.verdict.value}, margin {rep.margin}")


class _SympyHessians:
    """Hessian of the smooth branch active at a point, lambdified per sign pattern."""

    def __init__(self, f):
        self.f = f
        self.xs = symbols(f.n)
        self.cache = {}

    def __call__(self, x):
        pattern = tuple(1 if k.affine(x) > 0 else -1 for k in self.f.kinks)
        if pattern not in self.cache:
            expr = to_sympy(self.f, self.xs, pattern)
            self.cache[pattern] = sp.lambdify(self.xs, sp.hessian(expr, self.xs), "numpy")
        return np.array(self.cache[pattern](*x), dtype=float)


def test_6_support_values():
    rng = np.random.default_rng(6)
    worst = 0.0
    count = 0
    while count < 1000:
        n = int(rng.integers(1, 4))
        f = random_function(rng, n)
        hess = _SympyHessians(f)
        for _ in range(10):
            x = rng.uniform(-1, 1, n)
            if any(abs(k.affine(x)) < 1e-6 for k in f.kinks):
                continue
            u = rng.normal(size=n)
            ref = float(u @ hess(x) @ u)
            sv = calculus.sosd_support(f, x, u)
            worst = max(worst, abs(sv.smax - ref), abs(sv.smin - ref), abs(sv.smax - sv.smin))
            count += 1
    sign = FunctionSpec(1, (), (kink(1.0, [1.0], 0.0, "signquad"),))
    plus = FunctionSpec(1, (), (kink(1.0, [1.0], 0.0, "plusquad"),))
    s1 = calculus.sosd_support(sign, [0.0], [1.0])
    s2 = calculus.sosd_support(plus, [0.0], [-1.0])
    kinks_ok = (s1.smax, s1.smin) == (2.0, -2.0) and (s2.smax, s2.smin) == (2.0, 0.0)
    _record(6, worst <= 1e-10 and kinks_ok,
            f"{count} smooth points, max error {worst:.2e}; kink pairs {(s1.smax, s1.smin)}, {(s2.smax, s2.smin)}")


def _mapped_multipliers_ok(Q, x, mp, a, b):
    """Multipliers of the original problem, mapped to the rescaled one, still satisfy stationarity."""
    lam = mp.lam / np.asarray(a)
    mu = mp.mu / np.asarray(b, dtype=float).reshape(-1)
    s = lam.sum()
    r = Q.jac_f(x).T @ (lam / s)
    if Q.p:
        r = r + Q.jac_g(x).T @ (mu / s)
    return np.linalg.norm(r) <= 1e-8


def _scalings(P):
    """(objective factors, constraint factors): uniform per group, plus one mixed per-function choice."""
    out = [([a] * P.m, [b] * P.p) for a in FACTORS for b in FACTORS]
    out.append(([FACTORS[k % 3] for k in range(P.m)], [FACTORS[(k + 1) % 3] for k in range(P.p)]))
    return out


def test_7_verdict_invariance():
    mismatches = 0
    lam_worst = 0.0
    runs = 0
    for e in catalog():
        P = e.problem
        for a, b in _scalings(P):
            Q = P.rescaled(a, b)
            for pt in e.points:
                runs += 1
                mismatches += check_first_order(P, pt.x).verdict is not check_first_order(Q, pt.x).verdict
                mismatches += certify_sufficient(P, pt.x).verdict is not certify_sufficient(Q, pt.x).verdict
                mismatches += (grid_local_efficiency(P, pt.x).verdict
                               is not grid_local_efficiency(Q, pt.x).verdict)
                for exp in pt.expectations:
                    u = exp.direction
                    if exp.check == "ascq":
                        mismatches += check_ascq(P, pt.x, u).verdict is not check_ascq(Q, pt.x, u).verdict
                    if exp.check != "necessary":
                        continue
                    rp, rq = necessary_multipliers(P, pt.x, u), necessary_multipliers(Q, pt.x, u)
                    mismatches += rp.verdict is not rq.verdict
                    if rp.multipliers is None or rq.multipliers is None:
                        continue
                    if len(set(a)) == 1:
                        # uniform objective factor: normalized lambda is unchanged
                        lam_worst = max(lam_worst, float(np.max(np.abs(rp.multipliers.lam - rq.multipliers.lam))))
                    elif not _mapped_multipliers_ok(Q, pt.x, rp.multipliers, a, b):
                        mismatches += 1
    ok = mismatches == 0 and lam_worst <= 1e-8
    _record(7, ok, f"{runs} rescaled runs, {mismatches} mismatches, max normalized lambda gap {lam_worst:.1e}")


def test_8_support_homogeneity():
    rng = np.random.default_rng(8)
    worst = 0.0
    for k in range(1000):
        n = int(rng.integers(1, 4))
        f = random_function(rng, n)
        x = rng.uniform(-1, 1, n)
        if k % 2:  # put half of the samples on a kink
            kt = f.kinks[0]
            a = np.asarray(kt.normal)
            x = x - (kt.affine(x) / (a @ a)) * a
        u = rng.normal(size=n)
        base = calculus.sosd_support(f, x, u)
        for alpha in (0.0, 0.5, 2.0):
            sv = calculus.sosd_support(f, x, alpha * u)
            worst = max(worst, abs(sv.smax - alpha**2 * base.smax), abs(sv.smin - alpha**2 * base.smin))
    _record(8, worst <= 1e-12, f"1000 samples, max deviation {worst:.1e}")


def test_9_determinism(tmp_path):
    paths = [tmp_path / f"run{k}.json" for k in range(2)]
    codes = []
    for p in paths:
        proc = subprocess.run([sys.executable, "-m", "sokkt.cli", "catalog-regression", "--json", str(p)],
                              capture_output=True, text=True)
        codes.append(proc.returncode)
    same = paths[0].read_bytes() == paths[1].read_bytes()
    _record(9, same and codes == [0, 0], f"exit codes {codes}, byte-identical: {same}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
