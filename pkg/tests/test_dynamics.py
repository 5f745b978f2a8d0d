import numpy as np
import pytest

from conftest import random_params
from curvegame import dynamics
from curvegame.core import GameParams
from curvegame.equilibrium import enumerate_equilibria, is_fixed_point
from curvegame.errors import DomainError, NonConvergence


def test_twin_limits(twin):
    hi = dynamics.iterate_extremal(twin, dynamics.GREATEST)
    lo = dynamics.iterate_extremal(twin, dynamics.LEAST)
    assert hi.converged and hi.limit.efforts == (0.75, 0.75)
    assert lo.limit.efforts == pytest.approx((8 / 15, 8 / 15), abs=1e-9)
    assert hi.steps[0].efforts == (1.0, 1.0) and lo.steps[0].efforts == (0.0, 0.0)


def test_trajectories_are_monotone(twin):
    lo = dynamics.iterate_extremal(twin, dynamics.LEAST)
    for a, b in zip(lo.steps, lo.steps[1:]):
        assert a.leq(b)


def test_cap_raises_with_last_steps(twin):
    with pytest.raises(NonConvergence) as exc:
        dynamics.iterate_extremal(twin, dynamics.LEAST, max_iter=3)
    assert len(exc.value.last_steps) == 2


def test_guards(twin):
    with pytest.raises(DomainError):
        dynamics.iterate_extremal(GameParams((0.5,), 0.5))
    with pytest.raises(ValueError):
        dynamics.iterate_extremal(twin, "middle")
    with pytest.raises(DomainError):
        dynamics.iterate_extremal(twin, seed=(0.5, 0.5, 0.5))


def test_custom_seed_lands_on_equilibrium(twin):
    traj = dynamics.iterate_extremal(twin, dynamics.GREATEST, seed=(0.6, 0.6))
    assert is_fixed_point(twin, traj.limit.efforts, 1e-8)


def test_extremal_limits_random():
    rng = np.random.default_rng(3)
    for _ in range(150):
        p = random_params(rng, int(rng.integers(2, 9)))
        recs = enumerate_equilibria(p)
        for which in (dynamics.GREATEST, dynamics.LEAST):
            traj = dynamics.iterate_extremal(p, which)
            dynamics.check_limit(p, traj, recs)
        low, high = dynamics.rationalizable_bounds(p)
        for r in recs:
            assert low.leq(r.profile, 1e-8) and r.profile.leq(high, 1e-8)


def test_round_robin_smoke(twin):
    traj = dynamics.iterate_extremal(twin, dynamics.LEAST, round_robin=True)
    assert is_fixed_point(twin, traj.limit.efforts, 1e-8)
