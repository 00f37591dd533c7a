import numpy as np
import pytest

from sokkt.catalog import catalog, entry
from sokkt.conditions import Verdict
from sokkt.model import FunctionSpec, ProblemSpec, kink, monomial
from sokkt.oracles import (
    AT_SCALE_CAVEAT,
    GridOracleConfig,
    GridTooLargeError,
    TangentProbeSchedule,
    fd_validate,
    grid_local_efficiency,
    tangent2_membership,
)

V = Verdict
HALF_LINE = ProblemSpec(1, (FunctionSpec(1, (monomial(1.0, [1]),)),), (FunctionSpec(1, (monomial(-1.0, [1]),)),))


def test_grid_examples():
    res = grid_local_efficiency(entry("negsq_free").problem, [0.0], GridOracleConfig(radius=0.5))
    assert res.verdict is V.DOMINATED
    assert res.witness[0] != 0.0
    assert grid_local_efficiency(entry("sq").problem, [0.0]).verdict is V.LOCALLY_EFFICIENT_AT_SCALE
    res = grid_local_efficiency(entry("biobj").problem, [0.0, 0.0])
    assert res.verdict is V.LOCALLY_EFFICIENT_AT_SCALE
    assert res.checked == 41**2
    assert AT_SCALE_CAVEAT in res.notes


def test_grid_witness_is_feasible_and_dominating():
    P = entry("parabola").problem
    res = grid_local_efficiency(P, [0.0, 0.0])
    y = res.witness
    assert np.all(P.g(y) <= 1e-9)
    assert np.all(P.f(y) <= P.f([0.0, 0.0])) and np.any(P.f(y) < P.f([0.0, 0.0]))


def test_grid_config_validation():
    with pytest.raises(ValueError):
        GridOracleConfig(radius=0.0)
    with pytest.raises(ValueError):
        GridOracleConfig(resolution=40)
    with pytest.raises(ValueError):
        GridOracleConfig(mode="STRONG")
    with pytest.raises(GridTooLargeError):
        grid_local_efficiency(entry("bowl3").problem, [0.0] * 3, GridOracleConfig(resolution=251))


def test_shrinking_radius_never_flips_to_dominated():
    # radius r/2 with resolution 21 is a subgrid of radius r with resolution 41
    for e in catalog():
        if e.problem.n > 2:
            continue
        for pt in e.points:
            big = grid_local_efficiency(e.problem, pt.x, GridOracleConfig(0.25, 41)).verdict
            small = grid_local_efficiency(e.problem, pt.x, GridOracleConfig(0.125, 21)).verdict
            if big is V.LOCALLY_EFFICIENT_AT_SCALE:
                assert small is V.LOCALLY_EFFICIENT_AT_SCALE


def test_weak_domination_implies_domination():
    for e in catalog():
        for pt in e.points:
            weak = grid_local_efficiency(e.problem, pt.x, GridOracleConfig(mode="WEAK")).verdict
            if weak is V.DOMINATED:
                assert grid_local_efficiency(e.problem, pt.x).verdict is V.DOMINATED


def test_tangent_examples():
    assert tangent2_membership(HALF_LINE, [0.0], [1.0], [-7.0]) is V.MEMBER_AT_SCALE
    assert tangent2_membership(HALF_LINE, [0.0], [0.0], [1.0]) is V.MEMBER_AT_SCALE
    assert tangent2_membership(HALF_LINE, [0.0], [0.0], [-1.0]) is V.REJECTED
    assert tangent2_membership(entry("sq_free").problem, [0.0], [1.0], [-5.0]) is V.MEMBER_AT_SCALE


def test_tangent_parabola():
    P = entry("parabola").problem
    assert tangent2_membership(P, [0.0, 0.0], [1.0, 0.0], [0.0, 2.0]) is V.MEMBER_AT_SCALE
    assert tangent2_membership(P, [0.0, 0.0], [1.0, 0.0], [0.0, 3.0]) is V.REJECTED


def test_schedule_validation():
    with pytest.raises(ValueError):
        TangentProbeSchedule(t_values=(0.1, 0.2))
    with pytest.raises(ValueError):
        TangentProbeSchedule(t_values=(0.1, 0.01))
    assert TangentProbeSchedule().search_radius(0.25) == pytest.approx(0.5)


def test_fd_validate_examples():
    assert fd_validate(FunctionSpec(1, (monomial(1.0, [2]),))) <= 1e-6
    assert fd_validate(FunctionSpec(1, (), (kink(1.0, [1.0], 0.0, "signquad"),))) <= 1e-5
    with pytest.raises(ValueError):
        fd_validate(FunctionSpec(1, (monomial(1.0, [2]),)), trials=0)


def test_fd_validate_random_functions():
    from sokkt.catalog import random_function

    rng = np.random.default_rng(12)
    for _ in range(20):
        f = random_function(rng, int(rng.integers(1, 4)))
        assert fd_validate(f, trials=20, seed=int(rng.integers(1000))) <= 1e-5
