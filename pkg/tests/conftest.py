import numpy as np
import pytest

from curvegame.core import GameParams
from curvegame.equilibrium import candidates

TWIN = GameParams((0.75, 0.75), 0.70)
TEN = GameParams((0.38, 0.39, 0.42, 0.45, 0.5, 0.51, 0.55, 0.62, 0.65, 0.8), 0.85)


def random_params(rng, n, lo=0.05, hi=0.95):
    alpha = rng.uniform(lo, hi, size=n)
    m = rng.uniform(lo, hi)
    return GameParams(tuple(float(a) for a in alpha), float(m))


def min_margin(params):
    return min(abs(rep.margin) for _, rep in candidates(params))


def clean_params(rng, n, gap=0.01, **kw):
    """Random instance whose existence conditions are all at least ``gap`` away from equality."""
    while True:
        p = random_params(rng, n, **kw)
        if min_margin(p) >= gap:
            return p


@pytest.fixture
def twin():
    return TWIN


@pytest.fixture
def ten():
    return TEN


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
