"""Iterated extremal best responses.

Starting from the all-ones profile and always taking the largest reply gives
a nonincreasing sequence that converges to the greatest equilibrium; from the
zero profile with the smallest reply it increases to the least one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import GameParams, Profile, as_profile
from .equilibrium import EquilibriumRecord, enumerate_equilibria, is_fixed_point
from .errors import DomainError, InternalConsistencyError, NonConvergence, OrderViolation
from .response import extremal_response

GREATEST = "greatest"
LEAST = "least"
ORDER_TOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    steps: tuple[Profile, ...]
    converged: bool
    limit: Profile
    iterations: int
    which: str = GREATEST


def _update(params, xs, greatest, round_robin):
    n = params.n
    xs = list(xs)
    if round_robin:
        for i in range(n):
            opp = (math.fsum(xs) - xs[i]) / (n - 1)
            xs[i] = extremal_response(params, i, min(max(opp, 0.0), 1.0), greatest)
        return xs
    total = math.fsum(xs)
    return [
        extremal_response(params, i, min(max((total - xs[i]) / (n - 1), 0.0), 1.0), greatest)
        for i in range(n)
    ]


def iterate_extremal(
    params: GameParams,
    which: str = GREATEST,
    seed=None,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    round_robin: bool = False,
) -> Trajectory:
    """Iterate the greatest (or least) best reply until successive profiles
    differ by at most ``tol`` in max-norm.

    Raises :class:`NonConvergence` at the iteration cap and
    :class:`OrderViolation` if a default-seeded run is not monotone.
    """
    if params.n < 2:
        raise DomainError("best-response dynamics need at least two students")
    if which not in (GREATEST, LEAST):
        raise ValueError(f"which must be {GREATEST!r} or {LEAST!r}, got {which!r}")
    greatest = which == GREATEST
    default_seed = seed is None
    if default_seed:
        seed = [1.0 if greatest else 0.0] * params.n
    current = list(as_profile(seed).efforts)
    if len(current) != params.n:
        raise DomainError(f"seed has {len(current)} entries, expected {params.n}")
    steps = [Profile(tuple(current))]
    for it in range(1, max_iter + 1):
        nxt = _update(params, current, greatest, round_robin)
        if default_seed:
            if greatest and any(b > a + ORDER_TOL for a, b in zip(current, nxt)):
                raise OrderViolation(f"greatest-reply trajectory increased at step {it}")
            if not greatest and any(b < a - ORDER_TOL for a, b in zip(current, nxt)):
                raise OrderViolation(f"least-reply trajectory decreased at step {it}")
        steps.append(Profile(tuple(nxt)))
        gap = max(abs(a - b) for a, b in zip(current, nxt))
        current = nxt
        if gap <= tol:
            return Trajectory(tuple(steps), True, steps[-1], it, which)
    raise NonConvergence(
        f"no convergence within {max_iter} iterations (last gap {gap:.3e})",
        last_steps=steps[-2:],
    )


def check_limit(params: GameParams, trajectory: Trajectory, records: Optional[list[EquilibriumRecord]] = None, tol: float = 1e-6) -> EquilibriumRecord:
    """Match a default-seeded limit with the greatest/least enumerated equilibrium."""
    if records is None:
        records = enumerate_equilibria(params)
    target = records[0] if trajectory.which == GREATEST else records[-1]
    gap = max(abs(a - b) for a, b in zip(trajectory.limit.efforts, target.efforts))
    if gap > tol or not is_fixed_point(params, trajectory.limit.efforts, 1e-8):
        raise InternalConsistencyError(
            f"{trajectory.which} limit {trajectory.limit.efforts} misses {target.kind} by {gap:.3e}"
        )
    return target


def rationalizable_bounds(params: GameParams, tol: float = 1e-10, max_iter: int = 100_000) -> tuple[Profile, Profile]:
    """Least and greatest rationalizable profiles, which bracket every equilibrium."""
    low = iterate_extremal(params, LEAST, tol=tol, max_iter=max_iter).limit
    high = iterate_extremal(params, GREATEST, tol=tol, max_iter=max_iter).limit
    return low, high
