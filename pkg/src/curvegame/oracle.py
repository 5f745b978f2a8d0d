"""Brute-force reference computations on effort grids.

Nothing here touches the analytic reply or equilibrium code; the payoff is
re-evaluated directly from its definition so the two routes stay independent.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import GameParams
from .errors import DomainError

REPLY_RADIUS = 2


def effort_grid(step: float) -> np.ndarray:
    count = int(round(1.0 / step))
    if count < 1 or abs(count * step - 1.0) > 1e-9:
        raise DomainError(f"step {step!r} must divide 1")
    return np.linspace(0.0, 1.0, count + 1)


def payoff_table(m: float, n: int, a: float, efforts: np.ndarray, xbars: np.ndarray) -> np.ndarray:
    """``U[e, s]``: payoff of own effort ``efforts[e]`` against opposing mean ``xbars[s]``."""
    x = efforts[:, None]
    xb = xbars[None, :]
    g = np.maximum(m + (n - 1) / n * (x - xb), x)
    leisure = 1.0 - x
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where((g > 0) & (leisure > 0), g**a * np.abs(leisure) ** (1 - a), 0.0)
    return u


def _opposing_mean(n, opposing):
    if np.ndim(opposing) == 0:
        return float(opposing)
    opposing = np.asarray(opposing, dtype=float)
    if opposing.size != n - 1:
        raise DomainError(f"expected {n - 1} opposing efforts, got {opposing.size}")
    return float(opposing.mean())


def grid_payoffs(params: GameParams, i: int, opposing, step: float):
    if params.n < 2:
        raise DomainError("grid replies need at least two students")
    if not (0 < step <= 0.01):
        raise DomainError(f"step {step!r} outside (0, 0.01]")
    xs = effort_grid(step)
    xbar = _opposing_mean(params.n, opposing)
    u = payoff_table(params.m, params.n, params.alpha[i], xs, np.array([xbar]))[:, 0]
    return xs, u


def grid_argmax(params: GameParams, i: int, opposing, step: float) -> float:
    """Single best grid effort (lowest one on exact ties)."""
    xs, u = grid_payoffs(params, i, opposing, step)
    return float(xs[int(np.argmax(u))])


def grid_best_response(params: GameParams, i: int, opposing, step: float, tie_tol: float | None = None) -> tuple[float, ...]:
    """Grid local maxima whose payoff is within ``tie_tol`` of the best.

    ``opposing`` is either the opposing mean or the vector of the other
    efforts.  The default tolerance ``step**2`` absorbs the discretisation
    error at a smooth peak, so two separated near-equal peaks (a jump) both
    show up while ordinary neighbours of a single peak do not.
    """
    xs, u = grid_payoffs(params, i, opposing, step)
    if tie_tol is None:
        tie_tol = step * step
    best = u.max()
    left = np.concatenate(([-np.inf], u[:-1]))
    right = np.concatenate((u[1:], [-np.inf]))
    peaks = (u >= left) & (u >= right) & (u >= best - tie_tol)
    idx = np.flatnonzero(peaks)
    # plateaus of equal values collapse to their first point
    keep = [j for k, j in enumerate(idx) if k == 0 or j != idx[k - 1] + 1]
    return tuple(float(xs[j]) for j in keep)


@dataclass(frozen=True)
class GridCluster:
    """Connected set of grid epsilon-equilibria."""

    representative: tuple[float, ...]
    reply_distance: int
    members: np.ndarray

    def distance_to(self, profile) -> float:
        p = np.asarray(profile, dtype=float)
        return float(np.abs(self.members - p).max(axis=1).min())


def _reply_distance_n2(params, xs):
    n, m = 2, params.m
    idx = np.arange(xs.size)
    best0 = payoff_table(m, n, params.alpha[0], xs, xs).argmax(axis=0)  # reply index to x1
    best1 = payoff_table(m, n, params.alpha[1], xs, xs).argmax(axis=0)  # reply index to x0
    d0 = np.abs(idx[:, None] - best0[None, :])
    d1 = np.abs(idx[None, :] - best1[:, None])
    return np.maximum(d0, d1)


def _reply_distance_n3(params, xs):
    n, m = 3, params.m
    count = xs.size
    half = np.linspace(0.0, 1.0, 2 * count - 1)  # opposing means on a half-step grid
    pair = np.add.outer(np.arange(count), np.arange(count))
    own = np.arange(count)
    dist = np.zeros((count, count, count), dtype=np.int64)
    for i in range(3):
        best = payoff_table(m, n, params.alpha[i], xs, half).argmax(axis=0)
        di = np.abs(own[:, None, None] - best[pair][None, :, :])  # [own, j, k]
        if i == 1:
            di = di.transpose(1, 0, 2)
        elif i == 2:
            di = di.transpose(1, 2, 0)
        np.maximum(dist, di, out=dist)
    return dist


def grid_reply_distance(params: GameParams, step: float) -> np.ndarray:
    """For every grid profile, the largest distance (in grid steps) between a
    player's effort and that player's best grid reply to the others."""
    xs = effort_grid(step)
    if params.n == 2:
        return _reply_distance_n2(params, xs)
    if params.n == 3:
        return _reply_distance_n3(params, xs)
    raise DomainError(f"grid Nash search supports n in {{2, 3}}, got n={params.n}")


def grid_nash_search(params: GameParams, step: float, radius: int = REPLY_RADIUS) -> list[GridCluster]:
    """Cluster the grid profiles at which every player is within ``radius``
    grid steps of a best grid reply to the others.

    The slack is measured in actions rather than payoffs: payoffs can be
    nearly flat around a non-equilibrium point, while the distance to the
    grid reply is not.  Hits closer than two steps (max-norm) are merged.
    """
    if params.n not in (2, 3):
        raise DomainError(f"grid Nash search supports n in {{2, 3}}, got n={params.n}")
    min_step = 1e-3 if params.n == 2 else 5e-3
    if step < min_step - 1e-15:
        raise DomainError(f"step must be at least {min_step} for n={params.n}")
    xs = effort_grid(step)
    dist = grid_reply_distance(params, step)
    hits = dist <= radius
    box = np.ones((3,) * params.n, dtype=bool)
    labels, count = ndimage.label(ndimage.binary_dilation(hits, structure=box), structure=box)
    labels = np.where(hits, labels, 0)
    clusters = []
    for lab in range(1, count + 1):
        idx = np.argwhere(labels == lab)
        if idx.size == 0:
            continue
        vals = dist[tuple(idx.T)]
        best = idx[int(np.argmin(vals))]
        clusters.append(GridCluster(tuple(float(xs[j]) for j in best), int(vals.min()), xs[idx]))
    clusters.sort(key=lambda c: c.representative, reverse=True)
    return clusters


def match_clusters(clusters, profiles, tol: float) -> bool:
    """One-to-one matching: each cluster has members within ``tol`` of exactly
    one profile, and each profile is near exactly one cluster."""
    if len(clusters) != len(profiles):
        return False
    near = np.array([[c.distance_to(p) <= tol for p in profiles] for c in clusters], dtype=bool)
    if near.size == 0:
        return True
    return bool(np.all(near.sum(axis=0) == 1) and np.all(near.sum(axis=1) == 1))


# -- Pareto frontier ------------------------------------------------------------

def _pareto_mask(points: np.ndarray) -> np.ndarray:
    """True for rows not weakly dominated (>= everywhere, > somewhere) by another row."""
    uniq, inverse = np.unique(points, axis=0, return_inverse=True)
    order = np.lexsort(tuple(uniq[:, c] for c in reversed(range(uniq.shape[1]))))[::-1]
    keep = np.zeros(len(uniq), dtype=bool)
    if uniq.shape[1] == 2:
        best = -np.inf
        for j in order:
            if uniq[j, 1] > best:
                keep[j] = True
                best = uniq[j, 1]
    elif uniq.shape[1] == 3:
        # staircase of (u2, u3): u2 ascending, u3 strictly descending
        s2: list[float] = []
        s3: list[float] = []
        for j in order:
            b, c = uniq[j, 1], uniq[j, 2]
            pos = bisect_left(s2, b)
            if pos < len(s2) and s3[pos] >= c:
                continue
            keep[j] = True
            lo = pos
            while lo > 0 and s3[lo - 1] <= c:
                lo -= 1
            del s2[lo:pos]
            del s3[lo:pos]
            s2.insert(lo, b)
            s3.insert(lo, c)
    else:
        raise DomainError("Pareto filtering supports two or three players")
    return keep[inverse.ravel()]


def pareto_frontier(params: GameParams, step: float, zero_tol: float | None = None):
    """Utility-undominated grid profiles as ``(utilities, efforts)`` pairs.

    Every efficient profile is required to contain a (near) zero effort.
    """
    n = params.n
    if n not in (2, 3):
        raise DomainError(f"Pareto enumeration supports n in {{2, 3}}, got n={n}")
    xs = effort_grid(step)
    mesh = np.stack(np.meshgrid(*([xs] * n), indexing="ij"), axis=-1).reshape(-1, n)
    total = mesh.sum(axis=1)
    mean = total / n
    utils = np.empty_like(mesh)
    for i in range(n):
        g = mesh[:, i] + np.maximum(params.m - mean, 0.0)
        leisure = 1.0 - mesh[:, i]
        with np.errstate(divide="ignore", invalid="ignore"):
            utils[:, i] = np.where((g > 0) & (leisure > 0), g ** params.alpha[i] * np.abs(leisure) ** (1 - params.alpha[i]), 0.0)
    mask = _pareto_mask(utils)
    front_u, front_x = utils[mask], mesh[mask]
    tol = step if zero_tol is None else zero_tol
    if not np.all(front_x.min(axis=1) <= tol + 1e-12):
        raise AssertionError("an efficient grid profile has every effort above zero")
    order = np.lexsort(tuple(front_x[:, c] for c in reversed(range(n))))
    return [(tuple(front_u[j]), tuple(front_x[j])) for j in order]
