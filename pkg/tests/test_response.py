import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvegame import response
from curvegame.core import GameParams, utility_against_mean
from curvegame.errors import DomainError, ValidationError
from curvegame.response import Region, best_response, jump_point

unit = st.floats(min_value=0.02, max_value=0.98, allow_nan=False)


@st.composite
def player(draw, max_n=8):
    n = draw(st.integers(2, max_n))
    p = GameParams(tuple(draw(unit) for _ in range(n)), draw(unit))
    return p, draw(st.integers(0, n - 1))


def test_twin_jump_and_low_reply(twin):
    j = jump_point(twin, 0)
    assert j == pytest.approx(0.7182, abs=5e-4)
    br = best_response(twin, 0, j)
    assert br.is_tie
    assert br.low == pytest.approx(0.5795, abs=1e-3) and br.high == 0.75
    assert best_response(twin, 0, j - 1e-6).replies == (pytest.approx(br.low, abs=1e-5),)
    assert best_response(twin, 0, j + 1e-6).replies == (0.75,)


def test_three_person_jump():
    p = GameParams((0.6, 0.6, 0.85), 0.8)
    j = jump_point(p, 2)
    assert j == pytest.approx(0.789, abs=5e-4)
    assert abs(response.phi(p, 2, j)) <= 1e-10
    assert response.jump_point_bisection(p, 2) == pytest.approx(j, abs=1e-12)


@settings(max_examples=300)
@given(player())
def test_jump_properties(case):
    p, i = case
    n, m, a = p.n, p.m, p.alpha[i]
    j = jump_point(p, i)
    lo, hi = response.jump_bracket(n, m, a)
    assert lo - 1e-12 <= j <= hi + 1e-12
    assert j > response.no_show_threshold(n, m, a)
    assert response.jump_point_bisection(p, i) == pytest.approx(j, abs=1e-11)
    # phi decreasing through its root
    assert response.phi(p, i, lo) >= 0 >= response.phi(p, i, hi)


def test_regions_follow_thresholds():
    p = GameParams((0.3, 0.8), 0.4)
    n, m = 2, 0.4
    assert response.break_threshold(n, m) == pytest.approx(0.8)
    assert response.make_threshold(n, m) == pytest.approx(-0.2)
    assert response.classify_opposing_mean(p, 1, 0.9) is Region.CURVE_BROKEN
    assert response.classify_opposing_mean(p, 0, 0.0) is Region.NO_SHOW
    assert response.classify_opposing_mean(p, 1, 0.5) is Region.MAKE_OR_BREAK
    big = GameParams((0.5,) * 4, 0.9)
    assert response.classify_opposing_mean(big, 0, 0.6) is Region.CURVE_MADE
    with pytest.raises(ValidationError):
        response.classify_opposing_mean(p, 0, 1.5)


@given(player(), st.floats(0, 1))
def test_region_intervals_agree_with_tags(case, xbar):
    p, i = case
    tag = response.classify_opposing_mean(p, i, xbar)
    span = response.region_intervals(p, i)[tag]
    assert span is not None and span[0] - 1e-12 <= xbar <= span[1] + 1e-12


def test_curve_cutoff_domain(twin):
    assert response.curve_cutoff(twin, 0, 0.6) == pytest.approx(0.8)
    with pytest.raises(DomainError):
        response.curve_cutoff(GameParams((0.5, 0.5), 0.3), 0, 0.9)


def test_broken_curve_gives_ability():
    p = GameParams((0.75, 0.4), 0.3)
    br = best_response(p, 0, 1.0)
    assert br.region is Region.CURVE_BROKEN and br.replies == (0.75,)


@settings(max_examples=200, deadline=None)
@given(player(max_n=5), st.floats(0, 1))
def test_reply_beats_fine_grid(case, xbar):
    p, i = case
    grid = np.linspace(0, 1, 4001)
    best = max(utility_against_mean(p, i, x, xbar) for x in grid)
    br = best_response(p, i, xbar)
    for r in br.replies:
        assert 0.0 <= r <= 1.0
        assert utility_against_mean(p, i, r, xbar) >= best - 1e-12


@settings(max_examples=300)
@given(player(), st.floats(0, 1), st.floats(0, 1))
def test_extremal_selections_isotone(case, a, b):
    p, i = case
    a, b = sorted((a, b))
    for greatest in (True, False):
        assert response.extremal_response(p, i, a, greatest) <= response.extremal_response(p, i, b, greatest) + 1e-12


@settings(max_examples=300)
@given(player(), st.floats(0, 1), unit, unit)
def test_replies_rise_with_hardness(case, xbar, da, dm):
    # higher ability or lower target never lowers the extremal reply
    p, i = case
    alpha = list(p.alpha)
    alpha[i] = alpha[i] + da * (0.99 - alpha[i])
    harder = GameParams(tuple(alpha), p.m * (1 - dm * 0.9))
    for greatest in (True, False):
        assert response.extremal_response(harder, i, xbar, greatest) >= response.extremal_response(p, i, xbar, greatest) - 1e-12


def test_asymptotic_reply():
    assert response.asymptotic_best_response(0.7, 0.8, 0.9) == 0.7
    assert response.asymptotic_best_response(0.7, 0.8, 0.6) == pytest.approx(0.64)
    assert response.asymptotic_best_response(0.2, 0.8, 0.0) == 0.0
    assert response.positive_effort_threshold(0.8) == pytest.approx(0.8 / 1.8)


def test_dominated_bounds(twin):
    lo, hi = response.dominated_bounds(twin, 0)
    assert hi == 0.75 and lo == pytest.approx(0.75 - 0.25 * 1.4)
    for xbar in np.linspace(0, 1, 101):
        br = best_response(twin, 0, xbar)
        assert lo - 1e-12 <= br.low and br.high <= hi + 1e-12
