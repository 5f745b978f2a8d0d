"""Model parameters, action profiles, grades and Cobb-Douglas payoffs.

Every student ``i`` picks an effort ``x_i`` in [0, 1].  When the raw class
mean falls short of the target ``m`` the instructor adds ``m - mean`` to every
score, so the curved grade is ``x_i + max(m - mean, 0)``.  Utility is
``grade**alpha_i * (1 - x_i)**(1 - alpha_i)``.  Curved grades are never
truncated at 100%.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AbilityOutOfRange,
    DomainError,
    EmptyClass,
    InternalConsistencyError,
    TargetOutOfRange,
    ValidationError,
)

IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class GameParams:
    """Abilities ``alpha`` (one per student) and the instructor's target mean ``m``."""

    alpha: tuple[float, ...]
    m: float

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "m", float(self.m))
        if not alpha:
            raise EmptyClass()
        for i, a in enumerate(alpha):
            if not (0.0 < a < 1.0) or math.isnan(a):
                raise AbilityOutOfRange(i, a)
        if not (0.0 < self.m < 1.0):
            raise TargetOutOfRange(self.m)

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def mean_ability(self) -> float:
        return math.fsum(self.alpha) / self.n

    def with_alpha(self, alpha) -> "GameParams":
        return GameParams(tuple(alpha), self.m)

    def with_m(self, m) -> "GameParams":
        return GameParams(self.alpha, m)


@dataclass(frozen=True)
class Profile:
    """An effort vector in [0, 1]^n."""

    efforts: tuple[float, ...]

    def __post_init__(self):
        efforts = tuple(float(x) for x in self.efforts)
        object.__setattr__(self, "efforts", efforts)
        for i, x in enumerate(efforts):
            if not (0.0 <= x <= 1.0):
                raise ValidationError(f"effort[{i}] = {x!r} is outside [0, 1]", field=f"x[{i}]")

    def __len__(self):
        return len(self.efforts)

    def __getitem__(self, i):
        return self.efforts[i]

    def __iter__(self):
        return iter(self.efforts)

    @property
    def n(self) -> int:
        return len(self.efforts)

    @property
    def mean(self) -> float:
        return math.fsum(self.efforts) / self.n

    def opposing_mean(self, i: int) -> float:
        """Mean effort of everybody except student ``i`` (needs n >= 2)."""
        if self.n < 2:
            raise DomainError("opposing mean is undefined for a single student")
        _check_index(i, self.n)
        others = math.fsum(self.efforts) - self.efforts[i]
        return max(others, 0.0) / (self.n - 1)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.efforts, dtype=float)

    def leq(self, other: "Profile", tol: float = 0.0) -> bool:
        """Coordinatewise ``self <= other``."""
        return all(a <= b + tol for a, b in zip(self.efforts, other.efforts))


@dataclass(frozen=True)
class Allocation:
    """A student's bundle in grade-leisure space."""

    grade: float
    leisure: float


def validate_params(alpha: Sequence[float], m: float) -> GameParams:
    """Build a :class:`GameParams`, raising a :class:`ValidationError` subclass
    that names the offending field."""
    try:
        alpha = tuple(float(a) for a in alpha)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"abilities must be numbers: {exc}", field="alpha") from None
    try:
        m = float(m)
    except (TypeError, ValueError):
        raise ValidationError(f"target mean must be a number, got {m!r}", field="m") from None
    return GameParams(alpha, m)


def as_profile(x) -> Profile:
    return x if isinstance(x, Profile) else Profile(tuple(x))


def _check_index(i, n):
    if not (0 <= i < n):
        raise IndexError(f"player index {i} out of range for n={n}")


def _prepare(params: GameParams, x, i):
    x = as_profile(x)
    if x.n != params.n:
        raise ValidationError(f"profile has {x.n} entries, expected {params.n}", field="x")
    _check_index(i, params.n)
    return x


def curved_grade(m: float, n: int, x_i: float, xbar_minus_i: float) -> float:
    """Grade of a student playing ``x_i`` against opponents averaging ``xbar_minus_i``."""
    if n == 1:
        return max(m, x_i)
    return max(m + (n - 1) / n * (x_i - xbar_minus_i), x_i)


def grade(params: GameParams, x, i: int, check: bool = False) -> float:
    """Curved grade ``x_i + max(m - mean, 0)``.

    With ``check=True`` the equivalent opposing-mean form is also evaluated and
    the two are required to agree to 1e-12.
    """
    x = _prepare(params, x, i)
    g = x[i] + max(params.m - x.mean, 0.0)
    if check and params.n >= 2:
        alt = curved_grade(params.m, params.n, x[i], x.opposing_mean(i))
        if abs(alt - g) > IDENTITY_TOL:
            raise InternalConsistencyError(f"grade forms disagree: {g!r} vs {alt!r}")
    return g


def allocation(params: GameParams, x, i: int) -> Allocation:
    x = _prepare(params, x, i)
    return Allocation(grade(params, x, i), 1.0 - x[i])


def cobb_douglas(g: float, leisure: float, a: float) -> float:
    if leisure <= 0.0:
        return 0.0
    if g <= 0.0:
        return 0.0
    return g**a * leisure ** (1.0 - a)


def utility(params: GameParams, x, i: int) -> float:
    """Payoff ``G_i**alpha_i * (1 - x_i)**(1 - alpha_i)``; zero at full effort."""
    x = _prepare(params, x, i)
    return cobb_douglas(grade(params, x, i), 1.0 - x[i], params.alpha[i])


def utility_against_mean(params: GameParams, i: int, x_i: float, xbar_minus_i: float) -> float:
    """Payoff of student ``i`` as a function of own effort and the opposing mean."""
    _check_index(i, params.n)
    g = curved_grade(params.m, params.n, x_i, xbar_minus_i)
    return cobb_douglas(g, 1.0 - x_i, params.alpha[i])


def log_utility(params: GameParams, x, i: int) -> float:
    u = utility(params, x, i)
    return math.log(u) if u > 0.0 else -math.inf


def log_utility_gain(params: GameParams, x, i: int, dx: float) -> float:
    """``log U_i(x_i + dx, x_-i) - log U_i(x_i, x_-i)``.

    Returns ``-inf`` when the larger effort leaves no leisure.
    """
    x = _prepare(params, x, i)
    if not dx > 0.0:
        raise DomainError(f"effort increment must be positive, got {dx!r}")
    if x[i] + dx > 1.0 + IDENTITY_TOL:
        raise DomainError(f"x_i + dx = {x[i] + dx!r} exceeds the action set")
    up = list(x.efforts)
    up[i] = min(x[i] + dx, 1.0)
    hi = log_utility(params, Profile(tuple(up)), i)
    if hi == -math.inf:
        return -math.inf
    lo = log_utility(params, x, i)
    return hi - lo


class Hardness(enum.Enum):
    HARDER = "harder"
    EASIER = "easier"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def _same_n(a: GameParams, b: GameParams):
    if a.n != b.n:
        raise ValidationError(f"class sizes differ: {a.n} vs {b.n}", field="n")


def harder_than(a: GameParams, b: GameParams) -> Hardness:
    """Compare two models: ``a`` is harder when every ability is at least as
    large and the target mean is no larger."""
    _same_n(a, b)
    ge = all(x >= y for x, y in zip(a.alpha, b.alpha)) and a.m <= b.m
    le = all(x <= y for x, y in zip(a.alpha, b.alpha)) and a.m >= b.m
    if ge and le:
        return Hardness.EQUAL
    if ge:
        return Hardness.HARDER
    if le:
        return Hardness.EASIER
    return Hardness.INCOMPARABLE


def is_harder_or_equal(a: GameParams, b: GameParams) -> bool:
    return harder_than(a, b) in (Hardness.HARDER, Hardness.EQUAL)


def join(a: GameParams, b: GameParams) -> GameParams:
    """Least upper bound: larger abilities, smaller target."""
    _same_n(a, b)
    return GameParams(tuple(max(x, y) for x, y in zip(a.alpha, b.alpha)), min(a.m, b.m))


def meet(a: GameParams, b: GameParams) -> GameParams:
    _same_n(a, b)
    return GameParams(tuple(min(x, y) for x, y in zip(a.alpha, b.alpha)), max(a.m, b.m))
