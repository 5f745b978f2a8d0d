"""Best-response correspondence of a single student.

A student's payoff depends on the others only through their mean effort
``xbar`` (the opposing mean).  The unit interval of opposing means splits into
a region where the others already break the curve, a region where they have
already made it, and a make-or-break region in between.  Inside the latter the
reply jumps from the low critical point to ``alpha_i`` at the jump point
``J_i``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from scipy import optimize

from .core import GameParams
from .errors import DomainError, InternalConsistencyError, ValidationError

JUMP_TOL = 1e-9
PHI_TOL = 1e-10


class Region(enum.Enum):
    CURVE_BROKEN = "curve_broken"
    MAKE_OR_BREAK = "make_or_break"
    CURVE_MADE = "curve_made"
    NO_SHOW = "no_show"


@dataclass(frozen=True)
class BestResponse:
    replies: tuple[float, ...]
    region: Region
    jump: Optional[float] = None

    @property
    def low(self) -> float:
        return self.replies[0]

    @property
    def high(self) -> float:
        return self.replies[-1]

    @property
    def is_tie(self) -> bool:
        return len(self.replies) == 2

    def contains(self, x: float, tol: float = JUMP_TOL) -> bool:
        return any(abs(x - r) <= tol for r in self.replies)


def _require_multi(params: GameParams, i: int):
    if params.n < 2:
        raise DomainError("best responses need at least two students")
    if not (0 <= i < params.n):
        raise IndexError(f"player index {i} out of range for n={params.n}")


def _check_mean(xbar):
    if not (0.0 <= xbar <= 1.0):
        raise ValidationError(f"opposing mean {xbar!r} is outside [0, 1]", field="xbar_minus_i")


# Region endpoints.  These are formulas in (n, m, alpha_i) and are never clamped.

def break_threshold(n: int, m: float) -> float:
    """Opposing means strictly above this break the curve on their own."""
    return n * m / (n - 1)


def make_threshold(n: int, m: float) -> float:
    """Opposing means strictly below this make the curve on their own."""
    return (n * m - 1) / (n - 1)


def no_show_threshold(n: int, m: float, a: float) -> float:
    return n * m / (n - 1) - a / (1 - a)


def low_critical_point(n: int, m: float, a: float, xbar: float) -> float:
    """Interior optimum when the curve is active: ``a - (1-a)(nm/(n-1) - xbar)``."""
    return a - (1 - a) * (n * m / (n - 1) - xbar)


def jump_bracket(n: int, m: float, a: float) -> tuple[float, float]:
    return (n * m - a) / (n - 1), n * m / (n - 1) - a / (n - a)


def classify_opposing_mean(params: GameParams, i: int, xbar_minus_i: float) -> Region:
    """Tag the opposing mean with the branch of the reply it falls in.

    ``NO_SHOW`` takes precedence over the make-or-break tag: for very small
    abilities (alpha_i < 1/n) the zero-reply interval reaches past the
    curve-made boundary and zero is then the reply there as well.
    """
    _require_multi(params, i)
    _check_mean(xbar_minus_i)
    n, m, a = params.n, params.m, params.alpha[i]
    if xbar_minus_i > break_threshold(n, m):
        return Region.CURVE_BROKEN
    if xbar_minus_i <= no_show_threshold(n, m, a):
        return Region.NO_SHOW
    if xbar_minus_i < make_threshold(n, m):
        return Region.CURVE_MADE
    return Region.MAKE_OR_BREAK


def region_intervals(params: GameParams, i: int) -> dict:
    """Reachable part of each region inside [0, 1] as ``(lo, hi)``, or ``None``
    when the region is empty.  Open/closed ends follow :func:`classify_opposing_mean`."""
    _require_multi(params, i)
    n, m, a = params.n, params.m, params.alpha[i]
    brk, mk, ns = break_threshold(n, m), make_threshold(n, m), no_show_threshold(n, m, a)

    def clip(lo, hi):
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        return (lo, hi) if lo <= hi else None

    out = {
        Region.NO_SHOW: clip(0.0, ns) if ns >= 0.0 else None,
        Region.CURVE_MADE: clip(max(ns, 0.0), mk) if mk > max(ns, 0.0) else None,
        Region.MAKE_OR_BREAK: clip(max(mk, ns), brk) if brk > ns else None,
        Region.CURVE_BROKEN: clip(brk, 1.0) if brk < 1.0 else None,
    }
    return out


def curve_cutoff(params: GameParams, i: int, xbar_minus_i: float) -> float:
    """Own effort that puts the class mean exactly on ``m``."""
    _require_multi(params, i)
    n, m = params.n, params.m
    if not (make_threshold(n, m) <= xbar_minus_i <= break_threshold(n, m)):
        raise DomainError(f"opposing mean {xbar_minus_i!r} is outside the make-or-break region")
    return n * m - (n - 1) * xbar_minus_i


def phi(params: GameParams, i: int, z: float) -> float:
    """Utility ratio (low critical point vs. ``alpha_i``) minus one, at opposing mean ``z``.

    Strictly decreasing; its zero is the jump point.
    """
    _require_multi(params, i)
    n, m, a = params.n, params.m, params.alpha[i]
    g = m + (n - 1) / n * (1 - z)
    l = 1 + n * m / (n - 1) - z
    if g <= 0.0 or l <= 0.0:
        raise DomainError(f"phi undefined at z={z!r}: non-positive base")
    return g**a * l ** (1 - a) - 1


def jump_point(params: GameParams, i: int) -> float:
    """Opposing mean at which student ``i`` is indifferent between the low
    critical point and ``alpha_i``.

    Both bases of ``phi`` are proportional (ratio (n-1)/n), so the root has the
    closed form ``1 + nm/(n-1) - (n/(n-1))**alpha_i``.
    """
    _require_multi(params, i)
    n, m, a = params.n, params.m, params.alpha[i]
    j = 1 + n * m / (n - 1) - (n / (n - 1)) ** a
    residual = phi(params, i, j)
    lo, hi = jump_bracket(n, m, a)
    if abs(residual) > PHI_TOL or not (lo - 1e-12 <= j <= hi + 1e-12):
        raise InternalConsistencyError(
            f"jump point {j!r} fails its checks: phi={residual!r}, bracket=({lo!r}, {hi!r})"
        )
    return j


def jump_point_bisection(params: GameParams, i: int, maxiter: int = 200) -> float:
    """Root of ``phi`` on its bracketing interval by plain bisection (reference path)."""
    _require_multi(params, i)
    lo, hi = jump_bracket(params.n, params.m, params.alpha[i])
    f = lambda z: phi(params, i, z)
    if f(hi) == 0.0:
        return hi
    if f(lo) == 0.0:
        return lo
    return optimize.bisect(f, lo, hi, xtol=1e-15, rtol=4 * 2.220446049250313e-16, maxiter=maxiter)


def best_response(params: GameParams, i: int, xbar_minus_i: float) -> BestResponse:
    """Exact set of optimal efforts against opponents averaging ``xbar_minus_i``."""
    region = classify_opposing_mean(params, i, xbar_minus_i)
    n, m, a = params.n, params.m, params.alpha[i]
    j = jump_point(params, i)
    if abs(xbar_minus_i - j) <= JUMP_TOL:
        low = low_critical_point(n, m, a, xbar_minus_i)
        return BestResponse((low, a), region, jump=j)
    if xbar_minus_i > j:
        return BestResponse((a,), region)
    if region is Region.NO_SHOW:
        return BestResponse((0.0,), region)
    return BestResponse((low_critical_point(n, m, a, xbar_minus_i),), region)


def extremal_response(params: GameParams, i: int, xbar_minus_i: float, greatest: bool) -> float:
    br = best_response(params, i, xbar_minus_i)
    return br.high if greatest else br.low


def asymptotic_best_response(alpha_i: float, m: float, xbar_minus_i: float) -> float:
    """Limit of the reply as the class grows without bound; a continuous isotone function."""
    if xbar_minus_i >= m:
        return alpha_i
    return max(alpha_i - (1 - alpha_i) * (m - xbar_minus_i), 0.0)


def positive_effort_threshold(m: float) -> float:
    """Smallest ability that guarantees a positive reply in a very large class."""
    return m / (m + 1)


def dominated_bounds(params: GameParams, i: int) -> tuple[float, float]:
    """Efforts outside ``[low, high]`` are strictly dominated.  ``low`` is the
    reply to an all-zero opposition (clamped at zero), ``high`` is ``alpha_i``."""
    _require_multi(params, i)
    n, m, a = params.n, params.m, params.alpha[i]
    return max(0.0, a - (1 - a) * n * m / (n - 1)), a
