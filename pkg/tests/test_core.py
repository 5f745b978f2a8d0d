import math

import pytest
from hypothesis import given, settings, strategies as st

from curvegame.core import (
    GameParams, Hardness, Profile, allocation, cobb_douglas, curved_grade, grade, harder_than,
    is_harder_or_equal, join, log_utility, log_utility_gain, meet, utility, utility_against_mean,
    validate_params,
)
from curvegame.errors import AbilityOutOfRange, DomainError, EmptyClass, TargetOutOfRange, ValidationError

unit = st.floats(min_value=0.01, max_value=0.99, allow_nan=False)
effort = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def game_and_profile(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    alpha = tuple(draw(unit) for _ in range(n))
    p = GameParams(alpha, draw(unit))
    x = tuple(draw(effort) for _ in range(n))
    return p, Profile(x), draw(st.integers(0, n - 1))


def test_validation_names_field():
    with pytest.raises(EmptyClass):
        validate_params([], 0.5)
    with pytest.raises(AbilityOutOfRange) as exc:
        validate_params([0.5, 1.0], 0.5)
    assert exc.value.field == "alpha[1]"
    with pytest.raises(TargetOutOfRange):
        validate_params([0.5], 0.0)
    with pytest.raises(AbilityOutOfRange):
        GameParams((float("nan"),), 0.5)


def test_profile_bounds_and_means():
    with pytest.raises(ValidationError):
        Profile((0.5, 1.01))
    prof = Profile((0.2, 0.4, 0.9))
    assert prof.mean == pytest.approx(0.5)
    assert prof.opposing_mean(2) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        Profile((0.3,)).opposing_mean(0)


def test_grade_both_forms(twin):
    prof = Profile((0.5333333333333333, 0.5333333333333333))
    assert grade(twin, prof, 0, check=True) == pytest.approx(0.7)
    # curve broken: grade is the raw score
    assert grade(twin, Profile((0.75, 0.75)), 1, check=True) == 0.75
    assert curved_grade(0.7, 1, 0.2, 0.0) == 0.7


@given(game_and_profile())
def test_grade_identity(case):
    p, prof, i = case
    g = grade(p, prof, i, check=True)
    assert g >= prof[i]
    assert g == pytest.approx(prof[i] + max(p.m - prof.mean, 0.0), abs=1e-12)


def test_utility_values(twin):
    assert utility(twin, (0.75, 0.75), 0) == pytest.approx(0.5699, abs=1e-4)
    assert utility(twin, (1.0, 0.2), 0) == 0.0
    assert log_utility(twin, (1.0, 0.2), 0) == -math.inf
    assert cobb_douglas(0.5, 0.5, 0.3) == pytest.approx(0.5)
    a = allocation(twin, (0.2, 0.4), 0)
    assert a.leisure == pytest.approx(0.8) and a.grade == pytest.approx(0.6)
    assert utility_against_mean(twin, 0, 0.2, 0.4) == pytest.approx(utility(twin, (0.2, 0.4), 0))


@settings(max_examples=300)
@given(game_and_profile(), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_increasing_differences(case, t, s):
    p, prof, i = case
    x = list(prof.efforts)
    x[i] = min(x[i], 0.95)
    dx = 1e-3 + t * (1 - x[i] - 1e-3)
    j = (i + 1) % p.n
    y = list(x)
    y[j] = x[j] + s * (1 - x[j])
    lo = log_utility_gain(p, Profile(tuple(x)), i, dx)
    hi = log_utility_gain(p, Profile(tuple(y)), i, dx)
    assert hi >= lo - 1e-12


@settings(max_examples=300)
@given(game_and_profile(), st.floats(0.0, 1.0))
def test_negative_spillovers(case, s):
    p, prof, i = case
    j = (i + 1) % p.n
    y = list(prof.efforts)
    y[j] = y[j] + s * (1 - y[j])
    assert utility(p, Profile(tuple(y)), i) <= utility(p, prof, i) + 1e-12


def test_gain_rejects_bad_increment(twin):
    with pytest.raises(DomainError):
        log_utility_gain(twin, (0.5, 0.5), 0, 0.0)
    with pytest.raises(DomainError):
        log_utility_gain(twin, (0.9, 0.5), 0, 0.2)


def test_hardness_order_and_lattice():
    a = GameParams((0.6, 0.7), 0.5)
    b = GameParams((0.5, 0.7), 0.6)
    c = GameParams((0.7, 0.6), 0.5)
    assert harder_than(a, b) is Hardness.HARDER
    assert harder_than(b, a) is Hardness.EASIER
    assert harder_than(a, a) is Hardness.EQUAL
    assert harder_than(a, c) is Hardness.INCOMPARABLE
    assert is_harder_or_equal(a, b) and not is_harder_or_equal(b, a)
    top, bottom = join(a, c), meet(a, c)
    assert top == GameParams((0.7, 0.7), 0.5)
    assert is_harder_or_equal(top, a) and is_harder_or_equal(a, bottom)
    with pytest.raises(ValidationError):
        harder_than(a, GameParams((0.5,), 0.5))
