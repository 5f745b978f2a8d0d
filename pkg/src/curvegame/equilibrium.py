"""Closed-form equilibria, their existence conditions, and enumeration.

Pure equilibria come in ``n + 2`` families: the no-curve profile where every
student plays ``alpha_i``, and for each ``k = 0..n`` a curved profile in which
the ``k`` weakest students exert zero effort.  Enumeration evaluates each
family's existence condition and independently checks the candidate profile
against the exact best-response correspondence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import Allocation, GameParams, Profile, allocation, utility
from .errors import DomainError, InternalConsistencyError
from .response import JUMP_TOL, best_response, jump_point

VERIFY_TOL = 1e-9
MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class AbilityIndex:
    """``n`` minus the harmonic mean of ``(n - alpha_i)``."""

    value: float
    n: int


@dataclass(frozen=True, order=True)
class Kind:
    """Equilibrium family: ``no_curve`` or ``k_dont_care`` with ``k`` no-shows."""

    family: str
    k: Optional[int] = None

    def __str__(self):
        return self.family if self.k is None else f"{self.family}:{self.k}"

    @property
    def is_no_curve(self) -> bool:
        return self.family == "no_curve"

    @classmethod
    def parse(cls, label: str) -> "Kind":
        if label == "no_curve":
            return NO_CURVE
        family, _, k = label.partition(":")
        if family != "k_dont_care" or not k.isdigit():
            raise ValueError(f"unknown equilibrium kind {label!r}")
        return cls("k_dont_care", int(k))


NO_CURVE = Kind("no_curve")


def k_dont_care(k: int) -> Kind:
    return Kind("k_dont_care", k)


@dataclass(frozen=True)
class Candidate:
    """Closed-form profile of one family.  Efforts are raw formula values and may
    leave [0, 1] when the family does not exist for the parameters."""

    kind: Kind
    efforts: tuple[float, ...]
    mean: float


@dataclass(frozen=True)
class ExistenceReport:
    kind: Kind
    exists: bool
    margin: float
    quantities: dict = field(default_factory=dict)

    @property
    def marginal(self) -> bool:
        return abs(self.margin) <= MARGINAL_TOL


@dataclass(frozen=True)
class EquilibriumRecord:
    kind: Kind
    profile: Profile
    mean: float
    grades: tuple[Allocation, ...]
    utilities: tuple[float, ...]
    verified: bool
    marginal: bool = False

    @property
    def efforts(self) -> tuple[float, ...]:
        return self.profile.efforts


# -- closed forms -----------------------------------------------------------

def ability_index(params: GameParams) -> AbilityIndex:
    n = params.n
    s2 = math.fsum(1.0 / (n - a) for a in params.alpha)
    return AbilityIndex(n * (1.0 - 1.0 / s2), n)


def order_statistics(params: GameParams) -> list[int]:
    """Player indices sorted by (ability, index): position ``j`` holds the
    player with the ``(j+1)``-th smallest ability."""
    return sorted(range(params.n), key=lambda i: (params.alpha[i], i))


def _require_multi(params):
    if params.n < 2:
        raise DomainError("this operation needs at least two students")


def _active_effort(n, m, a, mean):
    return ((n - 1) * a - n * (1 - a) * (m - mean)) / (n - a)


def curved_interior_candidate(params: GameParams) -> Candidate:
    """Curved equilibrium with every student active."""
    _require_multi(params)
    n, m = params.n, params.m
    hat = ability_index(params).value
    mean = 1.0 - n * m / (n - 1) * (1.0 / hat - 1.0)
    efforts = tuple(_active_effort(n, m, a, mean) for a in params.alpha)
    return Candidate(k_dont_care(0), efforts, mean)


def k_dont_care_mean(params: GameParams, k: int) -> float:
    _require_multi(params)
    n, m = params.n, params.m
    if not (0 <= k <= n):
        raise DomainError(f"k = {k} outside 0..{n}")
    order = order_statistics(params)
    s2 = math.fsum(1.0 / (n - params.alpha[i]) for i in order[k:])
    num = (n - 1) * (m + 1) * s2 - (n - k) * (m + 1 - 1.0 / n)
    den = (n - 1) * (s2 - 1) + k
    return num / den


def k_dont_care_candidate(params: GameParams, k: int) -> Candidate:
    """Curved profile where the ``k`` weakest students (ties broken by index) exert zero effort."""
    n, m = params.n, params.m
    mean = k_dont_care_mean(params, k)
    order = order_statistics(params)
    efforts = [0.0] * n
    for i in order[k:]:
        efforts[i] = _active_effort(n, m, params.alpha[i], mean)
    return Candidate(k_dont_care(k), tuple(efforts), mean)


def no_curve_candidate(params: GameParams) -> Candidate:
    return Candidate(NO_CURVE, params.alpha, params.mean_ability)


def dont_care_index(n: int, m: float, mean: float) -> float:
    """Strictly decreasing map of a don't-care mean onto the ability scale."""
    return 1.0 - 1.0 / (1.0 + n / (n - 1) * (m - mean))


# -- existence --------------------------------------------------------------

def exists_no_curve(params: GameParams) -> ExistenceReport:
    _require_multi(params)
    n = params.n
    threshold = max((n - 1) * jump_point(params, i) + params.alpha[i] for i in range(n)) / n
    slack = params.mean_ability - threshold
    return ExistenceReport(NO_CURVE, slack >= 0.0, slack, {"mean_ability": params.mean_ability, "threshold": threshold})


def _interior_report(params: GameParams) -> ExistenceReport:
    n, m = params.n, params.m
    cand = curved_interior_candidate(params)
    lower = max(
        (n - a) * (n * m / (n - 1) - jump_point(params, i)) - a for i, a in enumerate(params.alpha)
    )
    a1 = min(params.alpha)
    middle = n * (m - cand.mean)
    upper = (n - 1) * a1 / (1 - a1)
    exists = lower <= middle < upper
    margin = min(middle - lower, upper - middle)
    return ExistenceReport(
        k_dont_care(0), exists, margin,
        {"lower": lower, "free_points": middle, "upper": upper, "mean": cand.mean},
    )


def exists_k_dont_care(params: GameParams, k: int) -> ExistenceReport:
    """Existence of the curved equilibrium with exactly ``k`` no-shows.

    For ``k = 0`` the bounds are on the aggregate free points ``n(m - mean)``:
    the lower bound keeps every student below their jump, the upper bound keeps
    the weakest student active.  For ``k >= 1`` the don't-care index of the
    k-mean must lie in ``[alpha_(k), alpha_(k+1))``, and every active student's
    opposing mean must not exceed their jump point.
    """
    _require_multi(params)
    n, m = params.n, params.m
    if not (0 <= k <= n):
        raise DomainError(f"k = {k} outside 0..{n}")
    if k == 0:
        return _interior_report(params)
    order = order_statistics(params)
    sorted_alpha = [params.alpha[i] for i in order]
    cand = k_dont_care_candidate(params, k)
    delta = dont_care_index(n, m, cand.mean)
    low = sorted_alpha[k - 1]
    high = sorted_alpha[k] if k < n else math.inf
    margins = [delta - low, high - delta]
    exists = low <= delta < high
    quantities = {"mean": cand.mean, "index": delta, "alpha_k": low, "alpha_k1": high}
    total = math.fsum(cand.efforts)
    jump_slack = math.inf
    for i in order[k:]:
        opp = (total - cand.efforts[i]) / (n - 1)
        jump_slack = min(jump_slack, jump_point(params, i) - opp)
    if k < n:
        margins.append(jump_slack)
        exists = exists and jump_slack >= 0.0
        quantities["jump_slack"] = jump_slack
    return ExistenceReport(k_dont_care(k), exists, min(margins), quantities)


# -- verification and enumeration ------------------------------------------

def is_fixed_point(params: GameParams, efforts: Sequence[float], tol: float = VERIFY_TOL) -> bool:
    """Every coordinate is a best reply to the others (within ``tol``)."""
    n = params.n
    if any(x < -tol or x > 1 + tol for x in efforts):
        return False
    xs = [min(max(x, 0.0), 1.0) for x in efforts]
    total = math.fsum(xs)
    for i in range(n):
        opp = min(max((total - xs[i]) / (n - 1), 0.0), 1.0)
        if not best_response(params, i, opp).contains(xs[i], tol):
            return False
    return True


def make_record(params: GameParams, kind: Kind, efforts, marginal=False) -> EquilibriumRecord:
    xs = tuple(min(max(x, 0.0), 1.0) for x in efforts)
    profile = Profile(xs)
    return EquilibriumRecord(
        kind=kind,
        profile=profile,
        mean=profile.mean,
        grades=tuple(allocation(params, profile, i) for i in range(params.n)),
        utilities=tuple(utility(params, profile, i) for i in range(params.n)),
        verified=is_fixed_point(params, xs),
        marginal=marginal,
    )


def candidates(params: GameParams) -> list[tuple[Candidate, ExistenceReport]]:
    out = [(no_curve_candidate(params), exists_no_curve(params))]
    for k in range(params.n + 1):
        out.append((k_dont_care_candidate(params, k), exists_k_dont_care(params, k)))
    return out


def enumerate_equilibria(params: GameParams) -> list[EquilibriumRecord]:
    """All pure equilibria, highest effort first.

    Raises :class:`InternalConsistencyError` when a closed-form existence
    condition and the direct best-response check disagree away from a knife edge.
    """
    _require_multi(params)
    records = []
    for cand, report in candidates(params):
        verified = is_fixed_point(params, cand.efforts)
        if report.marginal:
            if verified:
                records.append(make_record(params, cand.kind, cand.efforts, marginal=True))
            continue
        if verified != report.exists:
            raise InternalConsistencyError(
                f"{cand.kind}: existence condition says {report.exists} "
                f"(margin {report.margin:.3e}) but best-response check says {verified}"
            )
        if verified:
            records.append(make_record(params, cand.kind, cand.efforts))
    records.sort(key=lambda r: r.mean, reverse=True)
    for hi, lo in zip(records, records[1:]):
        if not lo.profile.leq(hi.profile, VERIFY_TOL):
            raise InternalConsistencyError(f"equilibria {hi.kind} and {lo.kind} are not ordered")
    return records


# -- welfare comparisons ----------------------------------------------------

@dataclass(frozen=True)
class ParetoReport:
    """Comparison of two equilibria.  ``order`` is -1 when ``a`` has lower
    effort than ``b``, +1 when higher, 0 when equal."""

    order: int
    utility_change: tuple[float, ...]
    pareto_strict: bool
    grade_change: Optional[tuple[float, ...]] = None
    leisure_change: Optional[tuple[float, ...]] = None
    northeast: Optional[bool] = None

    @property
    def dominant(self) -> Optional[str]:
        return {-1: "a", 1: "b", 0: None}[self.order]


def pareto_compare(params: GameParams, a: EquilibriumRecord, b: EquilibriumRecord) -> ParetoReport:
    """Compare two verified equilibria.  Changes are reported as
    (lower-effort record) minus (higher-effort record)."""
    tol = VERIFY_TOL
    a_le_b = a.profile.leq(b.profile, tol)
    b_le_a = b.profile.leq(a.profile, tol)
    if not (a_le_b or b_le_a):
        raise InternalConsistencyError(f"{a.kind} and {b.kind} are not comparable by effort")
    if a_le_b and b_le_a:
        zeros = tuple(0.0 for _ in range(params.n))
        return ParetoReport(0, zeros, False)
    order = -1 if a_le_b else 1
    low, high = (a, b) if order == -1 else (b, a)
    du = tuple(x - y for x, y in zip(low.utilities, high.utilities))
    strict = all(d > 0.0 for d in du)
    report = ParetoReport(order, du, strict)
    if not low.kind.is_no_curve and not high.kind.is_no_curve:
        dg = tuple(x.grade - y.grade for x, y in zip(low.grades, high.grades))
        dl = tuple(x.leisure - y.leisure for x, y in zip(low.grades, high.grades))
        northeast = all(g > 0.0 for g in dg) and all(l >= 0.0 for l in dl)
        report = ParetoReport(order, du, strict, dg, dl, northeast)
    return report


# -- large classes and the single-student course ---------------------------

@dataclass(frozen=True)
class InflationReport:
    alpha_hat: float
    m: float
    factor: float
    curved: bool
    abilities: tuple[float, ...] = ()
    efforts: tuple[float, ...] = ()
    grades: tuple[float, ...] = ()
    leisure_ratio: float = 1.0
    note: str = ""

    def infer_ability(self, grade: float) -> float:
        """Recover a student's ability from their curved grade."""
        return self.alpha_hat * grade / self.m if self.curved else grade


def asymptotic_report(alpha_hat_inf: float, m: float, abilities: Sequence[float] = ()) -> InflationReport:
    """Limiting efforts and grades of the curved interior equilibrium as n grows."""
    if not (0 < alpha_hat_inf < 1 and 0 < m < 1):
        raise DomainError("ability index and target mean must lie in (0, 1)")
    abilities = tuple(float(a) for a in abilities)
    if alpha_hat_inf > m:
        return InflationReport(
            alpha_hat_inf, m, 1.0, False, abilities, abilities, abilities, 1.0,
            note="ability index exceeds target mean: no curve in the limit",
        )
    factor = m / alpha_hat_inf
    efforts = tuple(a - (1 - a) * (factor - 1) for a in abilities)
    grades = tuple(a * factor for a in abilities)
    return InflationReport(alpha_hat_inf, m, factor, True, abilities, efforts, grades, factor)


def single_student_cutoff(alpha_1: float) -> float:
    return alpha_1 * (1 - alpha_1) ** ((1 - alpha_1) / alpha_1)


def solve_single_student(alpha_1: float, m: float, tol: float = 1e-12) -> tuple[float, ...]:
    """Bang-bang reply of a lone student: ``alpha_1`` below the cutoff, zero above."""
    if not (0 < alpha_1 < 1 and 0 < m < 1):
        raise DomainError("alpha_1 and m must lie in (0, 1)")
    cut = single_student_cutoff(alpha_1)
    if abs(m - cut) <= tol:
        return (0.0, alpha_1)
    return (alpha_1,) if m < cut else (0.0,)
