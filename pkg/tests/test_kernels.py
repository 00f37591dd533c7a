import os
import subprocess
import sys

import numpy as np
import pytest

from sokkt import _kernels
from sokkt.catalog import random_function

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def _packed(seed, n):
    f = random_function(np.random.default_rng(seed), n, n_terms=6, n_kinks=3)
    return f.packed


@needs_numba
@pytest.mark.parametrize("n", [1, 2, 3])
def test_eval_points_backends_agree(n):
    X = np.random.default_rng(n).uniform(-2, 2, (500, n))
    args = _packed(n, n)
    np.testing.assert_allclose(
        _kernels.eval_points_numba(X, *args), _kernels.eval_points_numpy(X, *args), rtol=1e-13, atol=1e-13
    )


@needs_numba
@pytest.mark.parametrize("weak", [False, True])
def test_first_dominating_backends_agree(weak):
    rng = np.random.default_rng(9)
    for _ in range(50):
        F = rng.normal(size=(200, 2))
        G = rng.normal(size=(200, 1)) - 1.0
        f0 = rng.normal(size=2) - 1.5
        a = _kernels.first_dominating_numba(F, G, f0, 1e-9, 1e-10, weak)
        b = _kernels.first_dominating_numpy(F, G, f0, 1e-9, 1e-10, weak)
        assert a == b


def test_first_dominating_semantics():
    F = np.array([[0.0, 0.0], [-1.0, 0.0], [-1.0, -1.0]])
    G = np.zeros((3, 0))
    f0 = np.zeros(2)
    assert _kernels.first_dominating_numpy(F, G, f0, 1e-9, 1e-10, False) == 1
    assert _kernels.first_dominating_numpy(F, G, f0, 1e-9, 1e-10, True) == 2
    G = np.array([[1.0], [1.0], [0.0]])
    assert _kernels.first_dominating_numpy(F, G, f0, 1e-9, 1e-10, False) == 2


def test_environment_flag_selects_numpy():
    env = dict(os.environ, SOKKT_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from sokkt import _kernels; print(_kernels.backend_name())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
