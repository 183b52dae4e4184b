import math

import numpy as np
import pytest

from qtc.exitchart import (
    AprioriChannel,
    Candidate,
    ExitCurve,
    ThresholdError,
    generate_apriori,
    inner_curve,
    inner_exit_point,
    j_function,
    j_inverse,
    measure_mi,
    optimize_search,
    outer_curve,
    outer_exit_point,
    rank_candidates,
    threshold_search,
    tunnel_analysis,
)


def test_j_basics():
    assert j_function(0.0) == 0.0
    grid = np.linspace(0, 10, 41)
    vals = [j_function(float(s)) for s in grid]
    assert np.all(np.diff(vals) > 0)
    assert j_inverse(j_function(2.5)) == pytest.approx(2.5, abs=1e-4)
    with pytest.raises(ValueError):
        j_inverse(1.0)
    with pytest.raises(ValueError):
        j_function(-1.0)


def test_apriori_limits():
    rng = np.random.default_rng(0)
    sym = rng.integers(0, 4, 100)
    assert np.allclose(generate_apriori(sym, 0.0, rng), 0.25)
    d = generate_apriori(sym, 1.0, rng)
    assert np.array_equal(np.argmax(d, 1), sym) and np.allclose(d.max(1), 1.0)
    with pytest.raises(ValueError):
        generate_apriori(sym, 1.2, rng)
    with pytest.raises(ValueError):
        AprioriChannel(-1)


@pytest.mark.parametrize("target", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("method", ["entropy", "true"])
def test_estimator_round_trip(target, method):
    rng = np.random.default_rng(1)
    sym = rng.integers(0, 4, 100_000)
    assert measure_mi(sym, generate_apriori(sym, target, rng), method) == pytest.approx(target, abs=0.02)


def test_measure_mi_limits():
    sym = np.array([0, 1, 2, 3])
    assert measure_mi(sym, np.full((4, 4), 0.25)) == 0.0
    assert measure_mi(sym, np.eye(4)[sym]) == 1.0
    with pytest.raises(ValueError):
        measure_mi(sym, np.ones((4, 4)))
    with pytest.raises(ValueError):
        measure_mi(sym, np.full((3, 4), 0.25))


def test_product_tables_average_bit_mi():
    # independent bit tables: normalized 4-ary MI is the mean of the two bit MIs
    q1, q2 = 0.9, 0.7
    hb = lambda q: -q * math.log2(q) - (1 - q) * math.log2(1 - q)
    table = np.outer([q1, 1 - q1], [q2, 1 - q2])  # (z, x)
    row = [table[0, 0], table[0, 1], table[1, 1], table[1, 0]]
    mi = measure_mi(np.array([0]), np.array([row]))
    assert mi == pytest.approx(((1 - hb(q1)) + (1 - hb(q2))) / 2, abs=1e-12)


def test_inner_point_p0_is_one(opt_inner):
    ie, fails = inner_exit_point(opt_inner, 0.0, 0.3, 2, 300, np.random.default_rng(0))
    assert ie == pytest.approx(1.0) and fails == 0


def test_outer_point_ia1(opt_outer):
    ie, _ = outer_exit_point(opt_outer, 1.0, 2, 300, np.random.default_rng(0))
    assert ie == pytest.approx(1.0)


def test_curves_reproducible_and_bounded(opt_inner):
    a = inner_curve(opt_inner, 0.3, 5, 2, 300, np.random.default_rng(4))
    b = inner_curve(opt_inner, 0.3, 5, 2, 300, np.random.default_rng(4))
    assert a.points == b.points
    assert a.i_a[0] == 0 and a.i_a[-1] == 1
    assert np.all((a.i_e >= 0) & (a.i_e <= 1))


def test_inner_curve_monotone_in_ia(opt_inner):
    c = inner_curve(opt_inner, 0.3, 11, 4, 1500, np.random.default_rng(6))
    assert np.all(np.diff(c.i_e) > -0.01)


def test_inner_curve_falls_with_p(opt_inner):
    rng = lambda: np.random.default_rng(12)
    lo = inner_curve(opt_inner, 0.25, 6, 3, 1500, rng())
    hi = inner_curve(opt_inner, 0.35, 6, 3, 1500, rng())
    assert np.all(lo.i_e >= hi.i_e - 0.01)


def test_outer_curve_ignores_p(opt_outer):
    a = outer_curve(opt_outer, 4, 2, 300, np.random.default_rng(2))
    b = outer_curve(opt_outer, 4, 2, 300, np.random.default_rng(2))
    assert a.points == b.points and a.p is None


def test_unassisted_inner_termination_drops_with_p(opt_outer):
    vals = [inner_exit_point(opt_outer, p, 1.0, 2, 1500, np.random.default_rng(1))[0] for p in (0.1, 0.2, 0.3)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 0.99


def _curve(vals, role="inner"):
    x = np.linspace(0, 1, len(vals))
    return ExitCurve(role, list(zip(x.tolist(), list(vals))))


def test_tunnel_open_area_half():
    x = np.linspace(0, 1, 101)
    res = tunnel_analysis(_curve(np.ones(101)), _curve(x, "outer"))
    assert res.open and res.crossover_ia is None
    assert res.area == pytest.approx(0.5, abs=1e-9)


def test_tunnel_identical_closed():
    x = np.linspace(0, 1, 11)
    res = tunnel_analysis(_curve(x), _curve(x, "outer"))
    assert not res.open and res.area == pytest.approx(0.0)
    assert res.crossover_ia == pytest.approx(0.1)


def test_exit_curve_rejects_unordered():
    with pytest.raises(ValueError):
        ExitCurve("inner", [(0.0, 0.1), (0.0, 0.2)])


def test_threshold_precondition(opt_inner, opt_outer):
    with pytest.raises(ThresholdError):
        threshold_search(opt_inner, opt_outer, 0.45, 0.5, grid_size=5, frames=1, length=300, rng=np.random.default_rng(0))


def test_ranking():
    cands = [Candidate([1], [2], False, 0.01), Candidate([3], [4], True, 0.2), Candidate([5], [6], True, 0.1)]
    ranked = rank_candidates(cands)
    assert [c.inner_decimals for c in ranked] == [[5], [3], [1]]


def test_optimize_deterministic():
    kw = dict(grid_size=3, frames=1, length=150)
    a = optimize_search(3, 1, 3, 0.2, 1, rng=np.random.default_rng(5), **kw)
    b = optimize_search(3, 1, 3, 0.2, 1, rng=np.random.default_rng(5), **kw)
    assert [c.to_json() for c in a] == [c.to_json() for c in b]
    assert len(a) == 1 and len(a[0].inner_decimals) == 12
    with pytest.raises(ValueError):
        optimize_search(3, 1, 3, 0.2, 0)


def test_optimize_ranks_by_area():
    cands = optimize_search(2, 1, 1, 0.1, 4, grid_size=3, frames=1, length=150, rng=np.random.default_rng(1))
    opens = [c for c in cands if c.open]
    assert cands[: len(opens)] == opens
    assert all(a.area <= b.area for a, b in zip(opens, opens[1:]))
