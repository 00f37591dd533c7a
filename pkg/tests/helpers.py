"""Independent reference implementations used as test oracles."""

import numpy as np
import sympy as sp

from sokkt.model import FunctionSpec, KinkKind


def symbols(n):
    return sp.symbols(f"x1:{n + 1}", real=True)


def to_sympy(f: FunctionSpec, xs, sign_pattern=None):
    """Sympy expression of ``f``; kinks are replaced by the smooth branch chosen by ``sign_pattern``.

    With ``sign_pattern=None`` the branch is picked from the sign of the affine
    argument at evaluation time, so callers pass an explicit pattern.
    """
    expr = sp.Integer(0)
    for c, e in f.poly:
        term = sp.nsimplify(c)
        for x, p in zip(xs, e):
            term *= x**p
        expr += term
    for j, kt in enumerate(f.kinks):
        t = sum(sp.nsimplify(a) * x for a, x in zip(kt.normal, xs)) + sp.nsimplify(kt.offset)
        positive = sign_pattern[j] > 0
        if kt.kind is KinkKind.PLUSQUAD:
            branch = t**2 if positive else sp.Integer(0)
        else:
            branch = t**2 if positive else -(t**2)
        expr += sp.nsimplify(kt.coeff) * branch
    return expr


def pattern_at(f: FunctionSpec, x):
    return [1 if kt.affine(np.asarray(x)) > 0 else -1 for kt in f.kinks]


def sympy_grad_hess(f: FunctionSpec, x):
    xs = symbols(f.n)
    expr = to_sympy(f, xs, pattern_at(f, x))
    subs = dict(zip(xs, [sp.Float(v, 30) for v in x]))
    g = np.array([float(sp.diff(expr, v).subs(subs)) for v in xs])
    H = np.array([[float(sp.diff(expr, a, b).subs(subs)) for b in xs] for a in xs])
    return g, H
