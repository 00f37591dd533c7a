import numpy as np
import pytest
from scipy.optimize import nnls

from sokkt import cones
from sokkt.catalog import entry, tangent_probes
from sokkt.cones import (
    ConeDimensionError,
    InfeasiblePointError,
    L2Variant,
    LexPair,
    PolyhedralCone,
    active_sets,
    critical_cone,
    critical_violation,
    extreme_rays,
    lex_cmp,
    membership_L2,
    sample_critical_directions,
)
from sokkt.model import FunctionSpec, ProblemSpec, monomial

s2 = np.sqrt(0.5)


def _p(n, *terms):
    return FunctionSpec(n, tuple(monomial(c, e) for c, e in terms))


def test_lex_examples():
    assert lex_cmp(LexPair(-1, 5), LexPair(0, 0))
    assert not lex_cmp(LexPair(0, 1), LexPair(0, 0))
    assert not lex_cmp(LexPair(0, 0), LexPair(0, 0), strict=True)
    assert lex_cmp(LexPair(0, 0), LexPair(0, 0))
    assert lex_cmp(LexPair(0, -1), LexPair(0, 0), strict=True)
    assert lex_cmp(LexPair(1e-12, 0.0), LexPair(0.0, 0.0))  # tie within tolerance
    with pytest.raises(ValueError):
        lex_cmp(LexPair(0, 0), LexPair(0, 0), tol=-1.0)


def test_active_sets_examples():
    P = ProblemSpec(2, (_p(2, (1.0, [1, 0])),), (_p(2, (-1.0, [0, 1])), _p(2, (1.0, [2, 0]), (1.0, [0, 2]), (-1.0, [0, 0]))))
    s = active_sets(P, [1.0, 0.0], [0.0, 1.0])
    assert s.I_active == {0, 1}
    assert s.I_dir == {1}
    free = ProblemSpec(2, (_p(2, (1.0, [1, 0])), _p(2, (1.0, [0, 1]))))
    s = active_sets(free, [0.0, 0.0], [0.0, -1.0])
    assert s.I_active == s.I_dir == frozenset()
    assert s.L_dir == {0}


def test_infeasible_point_rejected():
    P = ProblemSpec(1, (_p(1, (1.0, [2])),), (_p(1, (-1.0, [1])),))
    with pytest.raises(InfeasiblePointError):
        active_sets(P, [-1.0], [1.0])


def _rayset(rays):
    return sorted(tuple(np.round(r, 12)) for r in rays)


def test_extreme_ray_examples():
    rays, lin = extreme_rays(PolyhedralCone(2, [[-1, 0], [0, -1]]))
    assert _rayset(rays) == _rayset([[1, 0], [0, 1]]) and lin == []
    rays, lin = extreme_rays(PolyhedralCone(2, [[1, 1], [1, -1]]))
    assert _rayset(rays) == _rayset([[-s2, s2], [-s2, -s2]]) and lin == []
    rays, lin = extreme_rays(PolyhedralCone(2, [[1, 0]]))
    assert _rayset(rays) == _rayset([[-1, 0]])
    assert len(lin) == 1 and abs(lin[0][1]) == pytest.approx(1.0)


def test_extreme_rays_full_space_and_zero():
    rays, lin = extreme_rays(PolyhedralCone(3))
    assert rays == [] and len(lin) == 3
    zero = PolyhedralCone(2, [[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert zero.is_zero()


def test_dimension_cap():
    with pytest.raises(ConeDimensionError):
        extreme_rays(PolyhedralCone(9, [np.ones(9)]))


def _random_cone(rng, n, m, decimal):
    A = rng.integers(-3, 4, (m, n)).astype(float)
    if not decimal:
        A = A + rng.normal(scale=1e-3, size=A.shape) * np.pi
    E = rng.integers(-2, 3, (int(rng.integers(0, 2)), n)).astype(float)
    return PolyhedralCone(n, A, E)


@pytest.mark.parametrize("decimal", [True, False])
def test_generators_describe_the_cone(decimal):
    """Rays satisfy every row, and random members are conic combinations of the generators."""
    rng = np.random.default_rng(17 if decimal else 18)
    for _ in range(40):
        n = int(rng.integers(2, 5))
        C = _random_cone(rng, n, int(rng.integers(1, 6)), decimal)
        assert C.exact is decimal
        rays, lin = C.rays, C.lineality
        for r in rays:
            assert np.linalg.norm(r) == pytest.approx(1.0)
            assert np.all(C.ineqs @ r <= 1e-9)
            assert np.all(np.abs(C.eqs @ r) <= 1e-9)
        for l in lin:
            assert np.all(np.abs(C.ineqs @ l) <= 1e-9)
        G = np.array(list(rays) + list(lin) + [-v for v in lin]).reshape(-1, n)
        proj = np.eye(n) - np.linalg.pinv(C.eqs) @ C.eqs if C.eqs.shape[0] else np.eye(n)
        for w in rng.normal(size=(300, n)) @ proj:
            if not C.contains(w, 1e-12):
                continue
            if len(G) == 0:
                assert np.linalg.norm(w) < 1e-9
                continue
            _, res = nnls(G.T, w)
            assert res <= 1e-7 * (1 + np.linalg.norm(w))


def test_exact_and_float_paths_agree():
    rng = np.random.default_rng(23)
    for _ in range(30):
        n = int(rng.integers(2, 5))
        C = _random_cone(rng, n, int(rng.integers(1, 6)), True)
        nudged = PolyhedralCone(n, C.ineqs * np.pi, C.eqs * np.pi)  # same cone, float path
        assert not nudged.exact
        assert _rayset(C.rays) == _rayset(nudged.rays)
        assert len(C.lineality) == len(nudged.lineality)


def test_adding_constraints_never_enlarges():
    rng = np.random.default_rng(29)
    for _ in range(20):
        n = 3
        C = _random_cone(rng, n, 2, True)
        D = C.with_constraints(ineqs=rng.integers(-3, 4, (1, n)).astype(float))
        for w in rng.normal(size=(50, n)):
            if D.contains(w):
                assert C.contains(w)


def test_critical_cone_examples():
    P = entry("biobj").problem
    assert critical_cone(P, [0.0, 0.0]).is_zero()
    C = critical_cone(entry("sq_free").problem, [0.0])
    assert C.contains([1.0]) and C.contains([-1.0])
    P = ProblemSpec(2, (_p(2, (1.0, [1, 0]), (1.0, [0, 2])), _p(2, (-1.0, [1, 0]), (1.0, [0, 2]))))
    C = critical_cone(P, [0.0, 0.0])
    assert C.contains([0.0, 1.0]) and C.contains([0.0, -1.0])
    assert not C.contains([1.0, 0.0]) and not C.contains([-1.0, 0.0])


def test_critical_violation_reasons():
    P = entry("biobj").problem
    assert critical_violation(P, [0.0, 0.0], [1.0, 0.0]) is not None
    assert critical_violation(P, [0.0, 0.0], [0.0, 0.0]) is None
    assert critical_violation(entry("sq").problem, [0.0], [1.0]) is None


def test_membership_L2_examples():
    P = entry("parabola").problem
    for variant in L2Variant:
        assert membership_L2(P, [0.0, 0.0], [1.0, 0.0], [0.0, 0.0], variant)
        assert not membership_L2(P, [0.0, 0.0], [1.0, 0.0], [0.0, 3.0], variant)
    assert membership_L2(P, [0.0, 0.0], [0.0, -1.0], [5.0, 100.0])
    assert membership_L2(P, [0.0, 0.0], [1.0, 0.0], [0.0, 0.0], "lower")


def test_upper_membership_implies_lower_over_catalog():
    for e, pt, u, v in tangent_probes():
        if membership_L2(e.problem, pt.x, u, v, L2Variant.UPPER):
            assert membership_L2(e.problem, pt.x, u, v, L2Variant.LOWER)


def test_sampling_examples():
    assert sample_critical_directions(critical_cone(entry("biobj").problem, [0.0, 0.0])) == []
    dirs = sample_critical_directions(critical_cone(entry("sq_free").problem, [0.0]))
    vals = sorted(float(d[0]) for d in dirs)
    assert vals == [-1.0, 1.0]
    P = ProblemSpec(2, (_p(2, (1.0, [1, 0]), (1.0, [0, 2])), _p(2, (-1.0, [1, 0]), (1.0, [0, 2]))))
    dirs = sample_critical_directions(critical_cone(P, [0.0, 0.0]), 16, 3)
    assert dirs
    for d in dirs:
        assert d[0] == pytest.approx(0.0, abs=1e-12)
        assert np.linalg.norm(d) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        sample_critical_directions(critical_cone(P, [0.0, 0.0]), 0)


def test_sampling_is_deterministic():
    C = critical_cone(entry("bowl3").problem, [0.0, 0.0, 0.0])
    a = sample_critical_directions(C, 20, 5)
    b = sample_critical_directions(C, 20, 5)
    assert all(np.array_equal(x, y) for x, y in zip(a, b)) and len(a) == len(b)
    for d in a:
        assert C.contains(d)


def test_direction_cone_is_u_perp_intersection():
    P = entry("parabola_cert").problem
    K = cones.direction_cone(P, [0.0, 0.0], [1.0, 0.0])
    assert _rayset(K.rays) == _rayset([[0.0, -1.0]])
