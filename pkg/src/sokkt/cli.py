"""Command-line front end.

Exit codes: 0 for PASS, CERTIFIED, VACUOUS or LOCALLY_EFFICIENT_AT_SCALE;
1 for FAIL, NOT_CERTIFIED or DOMINATED; 2 for INCONCLUSIVE; 3 for usage and
parse errors.  ``--json PATH`` writes the machine report (``schema: 1``,
sorted keys, no timestamps) so identical invocations give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import calculus, catalog, conditions, oracles
from ._kernels import backend_name
from .conditions import Verdict
from .config import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL
from .cones import InfeasiblePointError, NotCriticalError
from .model import DimensionError
from .problem_file import ProblemFile, ProblemFileError, format_problem, load_problem, parse_problem

SCHEMA = 1
USAGE_ERROR = 3

COMMANDS = (
    "analyze",
    "check-ascq",
    "check-first-order",
    "check-necessary",
    "certify",
    "oracle",
    "taylor-test",
    "catalog-regression",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sokkt", description="Second-order KKT analysis of C^{1,1} vector optimization problems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--problem", metavar="FILE")
        s.add_argument("--point", metavar="NAME|VECTOR")
        s.add_argument("--direction", metavar="NAME|VECTOR")
        s.add_argument("--samples", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--radius", type=float)
        s.add_argument("--resolution", type=int)
        s.add_argument("--json", metavar="PATH")
        if name == "oracle":
            s.add_argument("--weak", action="store_true", help="test weak efficiency instead of efficiency")
        if name == "taylor-test":
            s.add_argument("--to", metavar="NAME|VECTOR", help="segment end point (default: point + direction)")
        if name == "catalog-regression":
            s.add_argument("--export", metavar="DIR", help="also write every entry as a problem file")
    return p


# ---------------------------------------------------------------------------
# argument resolution


def _vector(spec: str | None, table: dict, n: int, what: str):
    if spec is None:
        raise UsageError(f"--{what} is required for this command")
    if spec in table:
        return np.array(table[spec], dtype=float)
    try:
        vals = [float(v) for v in spec.replace("(", "").replace(")", "").split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"unknown {what} {spec!r}") from None
    if len(vals) != n:
        raise UsageError(f"{what} {spec!r} has {len(vals)} entries, expected {n}")
    return np.array(vals)


def _settings(args, pf: ProblemFile | None) -> dict:
    cfg = dict(pf.config) if pf else {}
    for key in ("samples", "seed", "radius", "resolution"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg.setdefault("samples", DEFAULT_SAMPLES)
    cfg.setdefault("seed", DEFAULT_SEED)
    return cfg


def _tolerances(cfg: dict):
    return DEFAULT_TOL.with_(**{k: float(cfg[k]) for k in ("activity", "strict", "box_radius") if k in cfg})


def _grid(cfg: dict, weak: bool = False) -> oracles.GridOracleConfig:
    kw = {k: cfg[k] for k in ("radius", "resolution", "feas_tol", "dom_tol") if k in cfg}
    return oracles.GridOracleConfig(mode="WEAK" if weak else "EFFICIENT", **kw)


# ---------------------------------------------------------------------------
# commands


def _need_problem(args) -> ProblemFile:
    if not args.problem:
        raise UsageError("--problem is required for this command")
    return load_problem(args.problem)


def _run_check(args):
    pf = _need_problem(args)
    P = pf.problem
    cfg = _settings(args, pf)
    tols = _tolerances(cfg)
    x = _vector(args.point, pf.points, P.n, "point")
    report = {"problem": format_problem(P), "point": [float(v) for v in x], "settings": cfg}
    cmd = args.command
    if cmd == "check-first-order":
        rep = conditions.check_first_order(P, x, tols)
    elif cmd == "check-ascq":
        rep = conditions.check_ascq(P, x, _vector(args.direction, pf.directions, P.n, "direction"), tols)
    elif cmd == "check-necessary":
        rep = conditions.necessary_multipliers(P, x, _vector(args.direction, pf.directions, P.n, "direction"), tols)
    elif cmd == "certify":
        rep = conditions.certify_sufficient(P, x, cfg["samples"], cfg["seed"], tols)
    else:
        rep = oracles.grid_local_efficiency(P, x, _grid(cfg, args.weak))
    report["checks"] = [rep.to_dict()]
    return rep.verdict, report


def _run_analyze(args):
    pf = _need_problem(args)
    P = pf.problem
    cfg = _settings(args, pf)
    tols = _tolerances(cfg)
    x = _vector(args.point, pf.points, P.n, "point")
    reps = [conditions.check_first_order(P, x, tols)]
    if args.direction is not None:
        u = _vector(args.direction, pf.directions, P.n, "direction")
        reps.append(conditions.check_ascq(P, x, u, tols))
        reps.append(conditions.necessary_multipliers(P, x, u, tols))
    cert = conditions.certify_sufficient(P, x, cfg["samples"], cfg["seed"], tols)
    reps.append(cert)
    reps.append(oracles.grid_local_efficiency(P, x, _grid(cfg)))
    report = {
        "problem": format_problem(P),
        "point": [float(v) for v in x],
        "settings": cfg,
        "checks": [r.to_dict() for r in reps],
        "headline": "certify",
    }
    return cert.verdict, report


def _run_taylor(args):
    if not args.problem:
        cfg = _settings(args, None)
        count = args.samples or 1000
        rng = np.random.default_rng(cfg["seed"])
        worst, failures = 0.0, 0
        for _ in range(count):
            n = int(rng.integers(1, 4))
            f = catalog.random_function(rng, n)
            a, b = rng.uniform(-1.5, 1.5, (2, n))
            rep = calculus.taylor_sandwich(f, a, b)
            failures += not rep.holds
            worst = max(worst, rep.lower - rep.delta - rep.slack, rep.delta - rep.upper - rep.slack)
        verdict = Verdict.PASS if failures == 0 else Verdict.FAIL
        report = {"settings": dict(cfg, samples=count), "failures": failures, "worst_excess": float(worst)}
        return verdict, report
    pf = _need_problem(args)
    P = pf.problem
    a = _vector(args.point, pf.points, P.n, "point")
    if args.to is not None:
        b = _vector(args.to, pf.points, P.n, "to")
    else:
        b = a + _vector(args.direction, pf.directions, P.n, "direction")
    rows = []
    ok = True
    for label, fn in _functions(P):
        rep = calculus.taylor_sandwich(fn, a, b)
        ok &= rep.holds
        rows.append({"function": label, "delta": rep.delta, "lower": rep.lower, "upper": rep.upper,
                     "slack": rep.slack, "holds": rep.holds})
    report = {"problem": format_problem(P), "a": a.tolist(), "b": b.tolist(), "functions": rows}
    return (Verdict.PASS if ok else Verdict.FAIL), report


def _functions(P):
    for k, f in enumerate(P.objectives):
        yield f"f{k + 1}", f
    for k, g in enumerate(P.constraints):
        yield f"g{k + 1}", g


def _catalog_rows(export: Path | None):
    rows = []
    for e in catalog.catalog():
        pts = {p.name: p.x for p in e.points}
        dirs = {}
        for p in e.points:
            dirs.update(p.directions)
        text = format_problem(e.problem, pts, dirs)
        if export is not None:
            export.mkdir(parents=True, exist_ok=True)
            (export / f"{e.key}.prob").write_text(text, encoding="utf-8")
        pf = parse_problem(text)
        for pt in e.points:
            for exp in pt.expectations:
                got = catalog.run_expectation(pf.problem, pf.points[pt.name], exp)
                rows.append({
                    "entry": e.key,
                    "point": pt.name,
                    "check": exp.check,
                    "direction": list(exp.direction) if exp.direction is not None else None,
                    "expected": exp.verdict.value,
                    "observed": got.value,
                    "match": got is exp.verdict,
                    "provenance": exp.provenance,
                })
    return rows


def _run_catalog(args):
    rows = _catalog_rows(Path(args.export) if args.export else None)
    bad = sum(not r["match"] for r in rows)
    report = {"rows": rows, "mismatches": bad, "settings": _settings(args, None)}
    return (Verdict.PASS if bad == 0 else Verdict.FAIL), report


# ---------------------------------------------------------------------------
# output


def _human(command: str, verdict: Verdict, report: dict) -> str:
    lines = [f"{command}: {verdict.value}"]
    for chk in report.get("checks", []):
        name = chk.get("check", "oracle")
        lines.append(f"  [{name}] {chk['verdict']}")
        if chk.get("margin") is not None:
            lines.append(f"    margin: {chk['margin']}")
        if chk.get("multipliers"):
            m = chk["multipliers"]
            lines.append(f"    lambda: {m['lambda']}  mu: {m['mu']}")
        if chk.get("witness") is not None:
            lines.append(f"    witness: {chk['witness']}")
        for rec in chk.get("records", [])[:8]:
            vals = ", ".join(f"{k}={v}" for k, v in rec["values"].items() if not isinstance(v, (list, dict)))
            lines.append(f"    u={rec['direction']} {rec['verdict']} {rec['reason']} {vals}".rstrip())
        for note in chk.get("notes", []):
            lines.append(f"    note: {note}")
    if "rows" in report:
        for r in report["rows"]:
            flag = "ok " if r["match"] else "MISMATCH"
            lines.append(f"  {flag} {r['entry']}/{r['point']} {r['check']} expected {r['expected']} got {r['observed']}")
        lines.append(f"  mismatches: {report['mismatches']}")
    if "functions" in report:
        for r in report["functions"]:
            lines.append(f"  {r['function']}: {r['lower']:.6g} <= {r['delta']:.6g} <= {r['upper']:.6g} "
                         f"{'ok' if r['holds'] else 'VIOLATED'}")
    if "failures" in report:
        lines.append(f"  random functions: {report['settings']['samples']}, failures: {report['failures']}")
    return "\n".join(lines)


def machine_report(command: str, verdict: Verdict, report: dict) -> str:
    doc = {
        "schema": SCHEMA,
        "command": command,
        "verdict": verdict.value,
        "exit_code": verdict.exit_code,
        "backend": backend_name(),
        "tolerances": DEFAULT_TOL.as_dict(),
        **report,
    }
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


_HANDLERS = {
    "analyze": _run_analyze,
    "taylor-test": _run_taylor,
    "catalog-regression": _run_catalog,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = _HANDLERS.get(args.command, _run_check)
    try:
        verdict, report = handler(args)
    except (UsageError, ProblemFileError, DimensionError, InfeasiblePointError, NotCriticalError, OSError) as err:
        print(f"sokkt: error: {err}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as err:  # invalid oracle or schedule parameters
        print(f"sokkt: error: {err}", file=sys.stderr)
        return USAGE_ERROR
    print(_human(args.command, verdict, report))
    if args.json:
        Path(args.json).write_text(machine_report(args.command, verdict, report), encoding="utf-8")
    return verdict.exit_code


if __name__ == "__main__":
    sys.exit(main())
