"""Batch evaluation kernels for the brute-force oracles.

Two implementations share each signature: a numba ``@njit`` loop and a plain
numpy vectorized path.  The numba path is used when numba imports cleanly and
the environment variable ``SOKKT_DISABLE_NUMBA`` is not set to a truthy value.
Both are always importable under their explicit names so tests and the
benchmark can compare them.

Packed function layout (see ``FunctionSpec.packed``)::

    mono_coef   (T,)    float64
    mono_exp    (T, n)  int64
    kink_coef   (K,)    float64
    kink_normal (K, n)  float64
    kink_offset (K,)    float64
    kink_kind   (K,)    int64     0 = plusquad, 1 = signquad
"""

from __future__ import annotations

import os

import numpy as np

PLUSQUAD_CODE = 0
SIGNQUAD_CODE = 1


def _env_disabled() -> bool:
    return os.environ.get("SOKKT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


# ---------------------------------------------------------------------------
# numpy path
# ---------------------------------------------------------------------------


def eval_points_numpy(X, mono_coef, mono_exp, kink_coef, kink_normal, kink_offset, kink_kind):
    X = np.asarray(X, dtype=np.float64)
    out = np.zeros(X.shape[0])
    if mono_coef.size:
        # (N, T) products of powers
        powers = np.prod(X[:, None, :] ** mono_exp[None, :, :], axis=2)
        out += powers @ mono_coef
    if kink_coef.size:
        ell = X @ kink_normal.T + kink_offset[None, :]
        theta = np.where(kink_kind[None, :] == PLUSQUAD_CODE, np.maximum(ell, 0.0) ** 2, ell * np.abs(ell))
        out += theta @ kink_coef
    return out


def first_dominating_numpy(F, G, f0, feas_tol, dom_tol, weak):
    feasible = np.all(G <= feas_tol, axis=1) if G.shape[1] else np.ones(F.shape[0], dtype=bool)
    if weak:
        dom = np.all(F < f0[None, :] - dom_tol, axis=1)
    else:
        dom = np.all(F <= f0[None, :], axis=1) & np.any(F < f0[None, :] - dom_tol, axis=1)
    hits = np.flatnonzero(feasible & dom)
    return int(hits[0]) if hits.size else -1


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

try:
    import numba

    @numba.njit(cache=True)
    def eval_points_numba(X, mono_coef, mono_exp, kink_coef, kink_normal, kink_offset, kink_kind):
        N, n = X.shape
        T = mono_coef.shape[0]
        K = kink_coef.shape[0]
        out = np.zeros(N)
        for r in range(N):
            acc = 0.0
            for t in range(T):
                term = mono_coef[t]
                for k in range(n):
                    e = mono_exp[t, k]
                    if e:
                        term *= X[r, k] ** e
                acc += term
            for j in range(K):
                ell = kink_offset[j]
                for k in range(n):
                    ell += kink_normal[j, k] * X[r, k]
                if kink_kind[j] == 0:
                    th = ell * ell if ell > 0.0 else 0.0
                else:
                    th = ell * abs(ell)
                acc += kink_coef[j] * th
            out[r] = acc
        return out

    @numba.njit(cache=True)
    def first_dominating_numba(F, G, f0, feas_tol, dom_tol, weak):
        N, m = F.shape
        p = G.shape[1]
        for r in range(N):
            ok = True
            for i in range(p):
                if G[r, i] > feas_tol:
                    ok = False
                    break
            if not ok:
                continue
            if weak:
                for l in range(m):
                    if not F[r, l] < f0[l] - dom_tol:
                        ok = False
                        break
                if ok:
                    return r
            else:
                strict = False
                for l in range(m):
                    if F[r, l] > f0[l]:
                        ok = False
                        break
                    if F[r, l] < f0[l] - dom_tol:
                        strict = True
                if ok and strict:
                    return r
        return -1

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    eval_points_numba = None
    first_dominating_numba = None
    HAVE_NUMBA = False


USE_NUMBA = HAVE_NUMBA and not _env_disabled()

if USE_NUMBA:
    eval_points = eval_points_numba
    first_dominating = first_dominating_numba
else:
    eval_points = eval_points_numpy
    first_dominating = first_dominating_numpy


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
